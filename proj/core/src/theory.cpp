/* SPDX-License-Identifier: Apache-2.0 */
#include "prrtail/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prrtail {

namespace {

long call_size(const Expr& e, long n, double v) { return std::lround(eval_expr(e, static_cast<double>(n), v)); }

Poly monomial_upper(const Poly& es, long n_lo) {
  if (es.is_monomial()) return es;
  Mono lead = leading_monomial(es, Sym::N);
  if (!(lead.coeff > 0))
    throw TheoryError(TheoryError::Kind::DegenerateInterval, "expected pre cost is not eventually positive: " + es.str());
  Poly m = Poly::monomial(lead.coeff, lead.e);
  // The quotient tends to 1; scan a geometric grid for its supremum.
  double c = 1;
  Env env;
  for (double n = static_cast<double>(std::max<long>(n_lo, 2)); n < 1e9; n *= 1.05) {
    env.n = std::floor(n);
    c = std::max(c, eval_numeric(es, env) / eval_numeric(m, env));
  }
  return Poly(c) * m;
}

}  // namespace

ExpectedRuntime solve_expected_runtime(const CanonicalPrr& prr, long n_max, Poly symbolic) {
  ExpectedRuntime out;
  out.cp = prr.cp;
  out.symbolic_bound = std::move(symbolic);
  out.values.assign(static_cast<std::size_t>(std::max(n_max, 0L)) + 1, 0.0);
  for (long n = prr.cp; n <= n_max; ++n) {
    // E[p(n)] = rest + self * E[p(n)]
    double rest = 0, self = 0;
    for (const Branch& b : prr.branches) {
      rest += b.prob * eval_expr(b.pre, static_cast<double>(n));
      for (auto [v, pv] : support(b.dist, n)) {
        double p = b.prob * pv;
        for (const Expr* e : {&b.size1, b.size2 ? &*b.size2 : nullptr}) {
          if (!e) continue;
          long s = call_size(*e, n, v);
          if (s == n)
            self += p;
          else
            rest += p * out.at(s);
        }
      }
    }
    if (self >= 1 - 1e-12)
      throw TheoryError(TheoryError::Kind::DivergentRecurrence,
                        "self-loop probability " + format_coeff(self) + " at n=" + std::to_string(n));
    out.values[static_cast<std::size_t>(n)] = rest / (1 - self);
  }
  return out;
}

std::vector<double> expected_pre_cost(const CanonicalPrr& prr, long n_max) {
  std::vector<double> es(static_cast<std::size_t>(std::max(n_max, 0L)) + 1, 0.0);
  for (long n = 1; n <= n_max; ++n)
    for (const Branch& b : prr.branches) es[static_cast<std::size_t>(n)] += b.prob * eval_expr(b.pre, static_cast<double>(n));
  return es;
}

Poly expected_pre_cost_poly(const CanonicalPrr& prr) {
  Poly es;
  for (const Branch& b : prr.branches) es += b.prob * expr_to_poly(b.pre, Rounding::Upper);
  return es;
}

A1Constants estimate_a1_constants(const CanonicalPrr& prr, const ExpectedRuntime& ep, long n_lo, long n_hi) {
  A1Constants c{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  n_lo = std::max<long>(n_lo, prr.cp);
  for (long n = n_lo; n <= n_hi; ++n) {
    double es = 0;
    for (const Branch& b : prr.branches) es += b.prob * eval_expr(b.pre, static_cast<double>(n));
    if (es <= 0) continue;
    for (const Branch& b : prr.branches) {
      double base = eval_expr(b.pre, static_cast<double>(n)) - ep.at(n);
      for (auto [v, pv] : support(b.dist, n)) {
        if (pv <= 0) continue;
        double x = base + ep.at(call_size(b.size1, n, v));
        if (b.size2) x += ep.at(call_size(*b.size2, n, v));
        x /= es;
        c.m_lo = std::min(c.m_lo, x);
        c.m_hi = std::max(c.m_hi, x);
        any = true;
      }
    }
  }
  if (!any) throw TheoryError(TheoryError::Kind::EmptySupport, "no support points in the n range");
  return c;
}

bool check_a2(const CanonicalPrr& prr, long n_lo, long n_hi) {
  std::vector<double> es = expected_pre_cost(prr, n_hi);
  for (long n = std::max<long>(n_lo, 1); n < n_hi; ++n)
    if (es[static_cast<std::size_t>(n + 1)] < es[static_cast<std::size_t>(n)] - 1e-12) return false;
  return true;
}

double CompBound::lambda(double alpha) const {
  double w_ = w(alpha), d = m_hi - m_lo;
  return 8 * (w_ - 1) / (w_ * w_ * d * d);
}

double CompBound::f(double alpha, double n) const {
  Env env;
  env.n = n;
  return w(alpha) * eval_numeric(ep, env);
}

double CompBound::t(double alpha, double n) const {
  Env env;
  env.n = n;
  return lambda(alpha) / eval_numeric(es, env);
}

CompBound comp_tail_bound(const Poly& ep_sym, const Poly& es_sym, double m_lo, double m_hi, long n_lo) {
  if (!(m_hi > m_lo))
    throw TheoryError(TheoryError::Kind::DegenerateInterval,
                      "need M > M', got [" + format_coeff(m_lo) + ", " + format_coeff(m_hi) + "]");
  CompBound b;
  b.m_lo = m_lo;
  b.m_hi = m_hi;
  b.ep = ep_sym;
  b.es = es_sym;
  b.coefficient = 2 / ((m_hi - m_lo) * (m_hi - m_lo));
  b.es_bound = monomial_upper(es_sym, n_lo);
  b.ratio = ep_sym * b.es_bound.pow(-1);
  Poly a = Poly::var(Sym::Alpha);
  // (alpha - 1)^2 / alpha = alpha - 2 + 1/alpha
  b.exponent = -b.coefficient * (a - 2 + a.pow(-1)) * b.ratio;
  return b;
}

}  // namespace prrtail
