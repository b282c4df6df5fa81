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

// Template-based synthesis of f and t such that
//   Pr[C >= alpha * kappa(n)] <= exp(t(alpha, n) * (f(alpha, n) - alpha * kappa(n))).

#ifndef PRRTAIL_SYNTHESIZER_HPP_
#define PRRTAIL_SYNTHESIZER_HPP_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prrtail/canonical.hpp"
#include "prrtail/decider.hpp"
#include "prrtail/strengthener.hpp"
#include "prrtail/sympoly.hpp"

namespace prrtail {

// Coefficients are tried as c_t in {1, 1/2, ..., 2^-M} (outer) and
// c_f in {1/2, 1, ..., 2^(M-1)} extended by one doubling, i.e. M + 1 values.
// f = c_f * alpha^p_f * ln(alpha)^q_f * n^u_f * ln(n)^v_f, t likewise.
struct BoundTemplate {
  int p_f = 0, q_f = 0, u_f = 0, v_f = 0;
  int p_t = 0, q_t = 0, u_t = 0, v_t = 0;

  Poly f(double c_f) const;
  Poly t(double c_t) const;
  std::array<int, 8> tuple() const { return {p_f, q_f, u_f, v_f, p_t, q_t, u_t, v_t}; }
  std::string str() const;
  bool operator==(const BoundTemplate&) const = default;
};

struct CandidateBound {
  BoundTemplate tpl;
  double c_f = 1, c_t = 1;
  Poly f_bar, t_bar;
  Poly bound_exponent;  // t * (f - alpha * kappa)
  std::string exp_form() const { return "exp(" + bound_exponent.str() + ")"; }
  std::string to_json(int indent = 2) const;
};

class NoBoundFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (2B+1)^4 (B+1)^4 sign-restricted tuples before pruning.
long raw_template_count(int B);

// Pruned and ordered from the tightest asymptotic bound down.
std::vector<BoundTemplate> enumerate_templates(int B, const Poly& ep, const Poly& kappa);

// Strengthens and decides one (c_f, c_t) pair.
struct CheckResult {
  bool accepted = false;
  std::string failure;  // strengthening failure or decider reason
};
CheckResult check_cond(const CanonicalPrr& prr, const BoundTemplate& tpl, double c_f, double c_t, int Q);

struct Guess {
  double c_f = 0, c_t = 0;
};
std::optional<Guess> guess_coefficients(const BoundTemplate& tpl, const CanonicalPrr& prr, int M, int Q = 8);

CandidateBound assemble_bound(const BoundTemplate& tpl, double c_f, double c_t, const Poly& kappa);

struct TemplateDiagnostic {
  std::size_t index = 0;
  BoundTemplate tpl;
  bool accepted = false;
  int pairs_tried = 0;
  std::optional<Guess> guess;
  std::string last_failure;
};

struct SynthOptions {
  int B = 2;
  int M = 4;
  int Q = 8;
  unsigned threads = 1;
  // Evaluate every template instead of stopping at the first success.
  bool all_templates = false;
};

struct SynthResult {
  std::optional<CandidateBound> bound;
  std::size_t templates_total = 0;
  std::vector<TemplateDiagnostic> diagnostics;
  std::string to_json(int indent = 2) const;
};

// Throws NoBoundFound when no template succeeds.
CandidateBound synthesize(const CanonicalPrr& prr, const Poly& kappa, const Poly& ep, int B = 2, int M = 4,
                          int Q = 8);
SynthResult synthesize_report(const CanonicalPrr& prr, const Poly& kappa, const Poly& ep,
                              const SynthOptions& opts);

}  // namespace prrtail

#endif  // PRRTAIL_SYNTHESIZER_HPP_
