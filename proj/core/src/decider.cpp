/* SPDX-License-Identifier: Apache-2.0 */
#include "prrtail/decider.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace prrtail {

namespace {

constexpr std::size_t kKeptLimits = 256;
constexpr double kBoundarySlack = 1e-12;

// How an exponent h(alpha) behaves as alpha grows.
struct AlphaShape {
  LimitValue limit;
  // Finite limit: sign of the leading deviation h - lim h (0 when h is
  // constant) and its order (a, b) for alpha^a ln^b alpha.
  int dev_sign = 0;
  std::pair<double, double> dev_order{0, 0};
  // Limit -inf: decay order of exp(h), (k, 0) for alpha^k, or -inf.
  std::pair<double, double> decay{0, 0};
};

AlphaShape shape_of(const Poly& h) {
  AlphaShape s;
  s.limit = limit_at_infinity(h, Sym::Alpha);
  if (s.limit.is_finite()) {
    Poly dev = h.filter([](const Mono& m) { return !m.is_constant(); });
    if (!dev.is_zero()) {
      Mono lead = leading_monomial(dev, Sym::Alpha);
      s.dev_sign = lead.coeff > 0 ? 1 : -1;
      s.dev_order = {lead.pow(Sym::Alpha), lead.lnpow(Sym::Alpha)};
    }
  } else if (s.limit.kind == LimitValue::Kind::MinusInfinity) {
    Mono lead = leading_monomial(h, Sym::Alpha);
    if (lead.pow(Sym::Alpha) == 0 && lead.lnpow(Sym::Alpha) == 1)
      s.decay = {lead.coeff, 0};
    else
      s.decay = {-std::numeric_limits<double>::infinity(), 0};
  }
  return s;
}

// With the limit sum exactly at 1, Q <= 1 for large alpha holds when no
// finite term approaches its limit from above and every vanishing term
// decays faster than some term's deficit below its limit.
bool boundary_ok(const std::vector<AlphaShape>& shapes, int* bad) {
  bool have_dev = false;
  std::pair<double, double> best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const AlphaShape& s = shapes[i];
    if (!s.limit.is_finite()) continue;
    if (s.dev_sign > 0) {
      *bad = static_cast<int>(i);
      return false;
    }
    if (s.dev_sign < 0) {
      have_dev = true;
      best = std::max(best, s.dev_order);
    }
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const AlphaShape& s = shapes[i];
    if (s.limit.kind != LimitValue::Kind::MinusInfinity) continue;
    if (!have_dev || !(s.decay < best)) {
      *bad = static_cast<int>(i);
      return false;
    }
  }
  return true;
}

void keep(DecideReport& r, const DecideReport::Limit& l) {
  if (r.per_n_limits.size() < kKeptLimits) r.per_n_limits.push_back(l);
}

// Checks one value of n given the limit sum; returns false on rejection.
bool check_point(DecideReport& r, long n, double R, const std::vector<AlphaShape>& shapes) {
  DecideReport::Limit l{n, R, false};
  if (R < 1 - kDecideEps) {
    keep(r, l);
    return true;
  }
  int bad = -1;
  if (R <= 1 + kBoundarySlack && boundary_ok(shapes, &bad)) {
    l.boundary = true;
    keep(r, l);
    return true;
  }
  if (r.per_n_limits.size() >= kKeptLimits) r.per_n_limits.back() = l;
  else r.per_n_limits.push_back(l);
  r.failure_witness = std::pair{n, bad};
  r.reason = R > 1 + kBoundarySlack ? "limit sum above 1 at n=" + std::to_string(n)
                                    : "limit sum at 1 without a decreasing approach at n=" + std::to_string(n);
  return false;
}

}  // namespace

DecideReport decide_general(const CanonicalConstraint& q) {
  DecideReport r;
  long tn = q.cp;
  for (std::size_t i = 0; i < q.terms.size(); ++i) {
    const Poly& g = q.terms[i].g_n;
    if (g.is_constant()) continue;
    if (limit_at_infinity(g, Sym::N).kind == LimitValue::Kind::PlusInfinity) {
      r.failure_witness = std::pair{-1L, static_cast<int>(i)};
      r.reason = "n-exponent " + g.str() + " diverges";
      return r;
    }
    std::int64_t t = negative_lb(derivative_n(g), q.cp);
    if (t > kDecideScanCap)
      throw SymPolyError(SymPolyError::Kind::ScanCapExceeded, "n-scan bound beyond cap for " + g.str());
    tn = std::max<long>(tn, static_cast<long>(t));
  }
  r.T_n = tn;
  std::vector<AlphaShape> shapes;
  for (std::size_t i = 0; i < q.terms.size(); ++i) {
    shapes.push_back(shape_of(q.terms[i].f_alpha));
    if (shapes.back().limit.kind == LimitValue::Kind::PlusInfinity) {
      r.per_n_limits.push_back({q.cp, std::numeric_limits<double>::infinity(), false});
      r.failure_witness = std::pair{static_cast<long>(q.cp), static_cast<int>(i)};
      r.reason = "alpha-exponent " + q.terms[i].f_alpha.str() + " diverges";
      return r;
    }
  }
  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    if (shapes[i].limit.is_finite()) finite.push_back(i);
  Env env;
  for (long n = q.cp; n <= tn; ++n) {
    env.n = static_cast<double>(n);
    double R = 0;
    for (std::size_t i : finite) {
      const CanonicalTerm& t = q.terms[i];
      double g = t.g_n.is_zero() ? 0.0 : eval_numeric(t.g_n, env);
      R += t.gamma * std::exp(shapes[i].limit.value + g);
    }
    if (!check_point(r, n, R, shapes)) return r;
  }
  r.verdict = true;
  return r;
}

DecideReport decide_prefix(const CanonicalConstraint& q) {
  DecideReport r;
  for (const PointConstraint& pc : q.prefix) {
    std::vector<AlphaShape> shapes;
    double R = 0;
    for (std::size_t i = 0; i < pc.terms.size(); ++i) {
      shapes.push_back(shape_of(pc.terms[i].h_alpha));
      const LimitValue& l = shapes.back().limit;
      if (l.kind == LimitValue::Kind::PlusInfinity) {
        r.per_n_limits.push_back({pc.n, std::numeric_limits<double>::infinity(), false});
        r.failure_witness = std::pair{pc.n, static_cast<int>(i)};
        r.reason = "alpha-exponent diverges at n=" + std::to_string(pc.n);
        return r;
      }
      if (l.is_finite()) R += pc.terms[i].gamma * std::exp(l.value);
    }
    if (!check_point(r, pc.n, R, shapes)) return r;
  }
  r.verdict = true;
  return r;
}

DecideReport decide(const CanonicalConstraint& q) {
  DecideReport g = decide_general(q);
  if (!g.verdict) return g;
  DecideReport p = decide_prefix(q);
  p.T_n = g.T_n;
  p.per_n_limits.insert(p.per_n_limits.end(), g.per_n_limits.begin(), g.per_n_limits.end());
  return p;
}

std::string DecideReport::to_json(int indent) const {
  nlohmann::json j;
  j["verdict"] = verdict;
  j["T_n"] = T_n;
  j["per_n_limits"] = nlohmann::json::array();
  for (const Limit& l : per_n_limits) {
    nlohmann::json e{{"n", l.n}, {"boundary", l.boundary}};
    if (std::isfinite(l.R))
      e["R"] = l.R;
    else
      e["R"] = "inf";
    j["per_n_limits"].push_back(e);
  }
  if (failure_witness)
    j["failure_witness"] = {{"n", failure_witness->first}, {"term", failure_witness->second}};
  else
    j["failure_witness"] = nullptr;
  if (!reason.empty()) j["reason"] = reason;
  return j.dump(indent);
}

}  // namespace prrtail
