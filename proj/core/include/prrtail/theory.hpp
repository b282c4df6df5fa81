/* SPDX-License-Identifier: Apache-2.0 */
// Expected-runtime oracle, difference-boundedness constants and the
// closed-form concentration bound
//   Pr[C >= alpha * E[p(n)]] <= exp(-2 (alpha-1)^2 / (alpha (M - M')^2) * E[p(n)] / E[S(n)]).
#ifndef PRRTAIL_THEORY_HPP_
#define PRRTAIL_THEORY_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "prrtail/canonical.hpp"
#include "prrtail/sympoly.hpp"

namespace prrtail {

class TheoryError : public std::runtime_error {
 public:
  enum class Kind { DivergentRecurrence, EmptySupport, DegenerateInterval };
  TheoryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct ExpectedRuntime {
  int cp = 1;
  std::vector<double> values;  // E[p(n)] for n in [0, n_max]
  Poly symbolic_bound;         // user supplied, may be zero
  // Sizes below c_p (including negative ones) cost nothing.
  double at(long n) const { return n < cp ? 0.0 : values.at(static_cast<std::size_t>(n)); }
  long n_max() const { return static_cast<long>(values.size()) - 1; }
};

ExpectedRuntime solve_expected_runtime(const CanonicalPrr& prr, long n_max, Poly symbolic = Poly());

// E[S(n)] of the branch mixture, for n in [0, n_max].
std::vector<double> expected_pre_cost(const CanonicalPrr& prr, long n_max);
// E[S(n)] as a pseudo-polynomial, using the upper rounding of each pre cost.
Poly expected_pre_cost_poly(const CanonicalPrr& prr);

struct A1Constants {
  double m_lo = 0;
  double m_hi = 0;
};

// min and max over n in [n_lo, n_hi], branches and support points of
// (V + sum_i E[p(s_i)] - E[p(n)]) / E[S(n)].
A1Constants estimate_a1_constants(const CanonicalPrr& prr, const ExpectedRuntime& ep, long n_lo, long n_hi);

// True when E[S(n)] is non-decreasing on [n_lo, n_hi].
bool check_a2(const CanonicalPrr& prr, long n_lo, long n_hi);

struct CompBound {
  double m_lo = 0, m_hi = 0;
  double coefficient = 0;  // 2 / (M - M')^2
  Poly ratio;              // E[p(n)] / es_bound
  Poly es_bound;           // E[S(n)], or a monomial upper bound of it for n >= n_lo
  Poly exponent;           // -coefficient * (alpha - 2 + 1/alpha) * ratio
  Poly ep, es;

  static double w(double alpha) { return 2 * alpha / (1 + alpha); }
  double lambda(double alpha) const;
  // f(alpha, n) = w(alpha) E[p(n)] and t(alpha, n) = lambda(alpha) / E[S(n)].
  double f(double alpha, double n) const;
  double t(double alpha, double n) const;
};

// A non-monomial E[S(n)] is replaced by c * lead(E[S(n)]) with c the supremum
// of their quotient over n >= n_lo, which only shrinks the ratio.
CompBound comp_tail_bound(const Poly& ep_sym, const Poly& es_sym, double m_lo, double m_hi, long n_lo = 10);

}  // namespace prrtail

#endif  // PRRTAIL_THEORY_HPP_
