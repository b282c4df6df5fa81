/* SPDX-License-Identifier: Apache-2.0 */
#ifndef PRRTAIL_TESTS_RANDOM_CONSTRAINT_HPP_
#define PRRTAIL_TESTS_RANDOM_CONSTRAINT_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "prrtail/decider.hpp"

namespace prrtail::testing {

// Random constraints whose asymptotic behaviour is already visible at
// alpha = 2^6: leading coefficients are at least 1, lower-order terms small,
// and the limit sum is either far from 1 or exactly 1.
struct ConstraintGenerator {
  std::mt19937_64 rng;
  explicit ConstraintGenerator(std::uint64_t seed) : rng(seed) {}

  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int pick(int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng); }

  Poly vanishing_alpha() {
    switch (pick(3)) {
      case 0:
        return parse_poly("-alpha") * Poly(uni(1, 3)) + Poly::log(Sym::Alpha) * Poly(uni(0, 0.3));
      case 1:
        return Poly::power(-uni(1, 2), Sym::Alpha, 1, -1) + Poly(uni(-1, 1));
      default:
        return Poly::power(-(2 + pick(2)), Sym::Alpha, 0, 1) + Poly(uni(-1, 0));
    }
  }

  Poly n_part(bool allow_divergent) {
    switch (pick(allow_divergent ? 5 : 4)) {
      case 0:
        return Poly();
      case 1:
        return Poly::power(-uni(1, 2), Sym::N, 1) + Poly::power(uni(0, 3), Sym::N, 0, 1) + Poly(uni(0, 3));
      case 2:
        return Poly::power(-uni(1, 2), Sym::N, 0, 1) + Poly(uni(0, 1));
      case 3:
        return Poly::power(-uni(1, 2), Sym::N, 1, 1) + Poly::power(uni(0, 2), Sym::N, 1);
      default:
        return Poly::power(uni(1, 2), Sym::N, 0, 1);
    }
  }

  CanonicalConstraint next() {
    CanonicalConstraint q;
    q.cp = 1 + pick(4);
    int kind = pick(4);
    if (kind == 0) {
      // Limit sum exactly 1 from n-free terms, approached from below or above.
      static const std::vector<std::vector<double>> splits = {{1}, {0.5, 0.5}, {0.5, 0.25, 0.25}};
      const auto& gs = splits[pick(3)];
      bool above = pick(4) == 0;
      int dev_kind = pick(2);  // alpha^-1 or ln(alpha)^-1
      for (double g : gs) {
        Poly dev = dev_kind == 0 ? Poly::power(uni(0.5, 2), Sym::Alpha, -1) : Poly::power(uni(0.5, 2), Sym::Alpha, 0, -1);
        q.terms.push_back(CanonicalTerm{g, above ? dev : -dev, Poly(), "boundary"});
      }
      // Vanishing terms decay strictly faster than alpha^-1.
      int extra = pick(3);
      for (int i = 0; i < extra; ++i) {
        Poly f = pick(2) ? parse_poly("-alpha") * Poly(uni(1, 3))
                         : Poly::power(-(2.0 + pick(2)), Sym::Alpha, 0, 1);
        q.terms.push_back(CanonicalTerm{uni(0.01, 0.1), f, n_part(false) - parse_poly("n"), "vanishing"});
      }
      return q;
    }
    int k = 1 + pick(4);
    double budget = kind == 1 ? 2.5 : 0.85;  // kind 1 tends to reject
    for (int i = 0; i < k; ++i) {
      CanonicalTerm t;
      t.gamma = uni(0.05, 1);
      int fk = pick(kind == 3 ? 4 : 3);
      if (fk == 0) {
        t.f_alpha = vanishing_alpha();
      } else if (fk == 3) {
        t.f_alpha = Poly::power(uni(1, 2), Sym::Alpha, 0, 1);  // divergent
      } else {
        double L = std::log(budget / k / t.gamma) - uni(0, 0.2);
        t.f_alpha = Poly(L) + (fk == 1 ? Poly::power(-uni(0, 1), Sym::Alpha, -1) : Poly());
      }
      t.g_n = n_part(kind == 3);
      t.origin = "random";
      q.terms.push_back(t);
    }
    return q;
  }
};

inline double Q_at(const CanonicalConstraint& q, double a, long n) {
  Env env;
  env.alpha = a;
  env.n = static_cast<double>(n);
  double s = 0;
  for (const CanonicalTerm& t : q.terms) s += t.gamma * std::exp(eval_numeric(t.f_alpha, env) + eval_numeric(t.g_n, env));
  return s;
}

// Limit sum close to but not at 1 somewhere in the first few thousand n.
inline bool near_one(const CanonicalConstraint& q) {
  for (long n = q.cp; n <= 3000; ++n) {
    Env env;
    env.n = static_cast<double>(n);
    double R = 0;
    for (const CanonicalTerm& t : q.terms) {
      LimitValue l = limit_at_infinity(t.f_alpha, Sym::Alpha);
      if (l.is_finite()) R += t.gamma * std::exp(l.value + eval_numeric(t.g_n, env));
    }
    if (R != 1 && std::abs(R - 1) < 0.05) return true;
  }
  return false;
}

}  // namespace prrtail::testing

#endif  // PRRTAIL_TESTS_RANDOM_CONSTRAINT_HPP_
