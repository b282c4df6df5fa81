// Copyright 2026 The prr-tail Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Rewrites the supermartingale condition
//   E[exp(t(S + sum_i f(size_i) - f(n)))] <= 1
// for concrete f, t into a canonical constraint
//   sum_i gamma_i * exp(f_i(alpha) + g_i(n)) <= 1.
//
// The canonical terms are valid for n >= cp (the general threshold n0). For
// c_p <= n < n0 the condition is kept exactly: at a fixed n the left-hand
// side is a finite sum of exp(h(alpha)) terms, stored as point constraints.

#ifndef PRRTAIL_STRENGTHENER_HPP_
#define PRRTAIL_STRENGTHENER_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "prrtail/canonical.hpp"
#include "prrtail/sympoly.hpp"

namespace prrtail {

struct CanonicalTerm {
  double gamma = 1.0;
  Poly f_alpha;  // alpha only
  Poly g_n;      // n only, non-negative powers of n and ln n
  std::string origin;
};

struct PointTerm {
  double gamma = 1.0;
  Poly h_alpha;
};

struct PointConstraint {
  long n = 0;
  std::vector<PointTerm> terms;
};

struct CanonicalConstraint {
  std::vector<CanonicalTerm> terms;
  long cp = 1;  // the terms hold for n >= cp
  std::vector<PointConstraint> prefix;

  // Numeric Q_L(alpha, n); uses the point constraint when n < cp.
  double eval(double alpha, long n) const;
  std::string to_json(int indent = 2) const;
};

struct TraceStep {
  std::string rule;
  std::string scope;
  std::string before;
  std::string after;
};
using Trace = std::vector<TraceStep>;
std::string trace_to_json(const Trace& trace, int indent = 2);

class StrengtheningFailure : public std::runtime_error {
 public:
  StrengtheningFailure(int branch, int arm, const std::string& what)
      : std::runtime_error(what), branch_(branch), arm_(arm) {}
  int branch() const { return branch_; }
  int arm() const { return arm_; }

 private:
  int branch_, arm_;
};

struct StrengthenContext {
  long cp = 1;   // threshold of the PRR
  long n0 = 32;  // start of the general part
  int Q = 8;
  int branch = 0;
  Trace* trace = nullptr;
};

// Smallest admissible n0: at least max(32, 2Q, cp) and large enough that
// every deterministic call size is at least cp from n0 on.
long choose_n0(const CanonicalPrr& prr, int Q);

// Upper bound of X(alpha, n) for n >= n0 as alpha_part + n_part; throws
// StrengtheningFailure when a cross monomial cannot be bounded.
struct Separated {
  Poly f_alpha;
  Poly g_n;
};
Separated separate(const Poly& x, const StrengthenContext& ctx, const std::string& scope);

// Over-approximates int_0^upper exp(exponent) dv. Returns the prefactor and
// the v-free exponent: integral <= prefactor * exp(exponent_out).
class NonPositiveW : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
struct ExpIntegral {
  Poly prefactor;
  Poly exponent;
};
ExpIntegral exp_integral(const Poly& exponent, const Poly& upper);

std::vector<CanonicalTerm> strengthen_branch_discrete(const Branch& branch, const Poly& f_bar, const Poly& t_bar,
                                                      const StrengthenContext& ctx);
std::vector<CanonicalTerm> strengthen_branch_uniform(const Branch& branch, const Poly& f_bar, const Poly& t_bar,
                                                     const StrengthenContext& ctx);
std::vector<CanonicalTerm> strengthen_branch_dnc(const Branch& branch, const Poly& f_bar, const Poly& t_bar,
                                                 const StrengthenContext& ctx);

struct BranchTerms {
  double prob = 1.0;
  std::vector<CanonicalTerm> terms;
};
CanonicalConstraint combine_branches(const std::vector<BranchTerms>& per_branch, long cp);

// General part only (n >= n0), then the exact prefix for c_p <= n < n0.
CanonicalConstraint strengthen_general(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, int Q,
                                       Trace* trace = nullptr, long n0 = 0);
std::vector<PointConstraint> exact_prefix(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, long n0);
CanonicalConstraint strengthen(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, int Q = 8,
                               Trace* trace = nullptr, long n0 = 0);

// E[exp(t(S + sum f(size_i) - f(n)))] by exact summation over the support,
// with f taken as 0 below c_p.
double exact_lhs(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, double alpha, long n);

}  // namespace prrtail

#endif  // PRRTAIL_STRENGTHENER_HPP_
