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

// Stack-machine semantics of a PRR: Monte Carlo runs, exact small-n cost
// distributions, tail estimates and empirical validation of tail bounds.

#ifndef PRRTAIL_SIMULATOR_HPP_
#define PRRTAIL_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prrtail/canonical.hpp"
#include "prrtail/lrec.hpp"
#include "prrtail/sympoly.hpp"

namespace prrtail {

// SplitMix64. Run i of a sampling job with seed s uses the stream
// substream(s, i), so results do not depend on how runs are scheduled.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kName = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., m-1}; m > 0.
  std::uint64_t below(std::uint64_t m);

 private:
  std::uint64_t state_;
};

class SimError : public std::runtime_error {
 public:
  enum class Kind { StepCapExceeded, SizeRangeViolation, UnsupportedShape, StateExplosion };
  SimError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint64_t kStepCap = 10'000'000;

// One run from p(n_star); returns the total cost C_tau.
double run_once(const CanonicalPrr& prr, long n_star, SplitMix64& rng);
// The same semantics executed directly on the AST (no flattening).
double run_once(const PrrAst& ast, long n_star, SplitMix64& rng);

// `samples` runs using substreams 0..samples-1 of `seed`. threads = 0 picks
// the hardware concurrency.
std::vector<double> sample_costs(const CanonicalPrr& prr, long n_star, std::size_t samples,
                                 std::uint64_t seed, unsigned threads = 0);
std::vector<double> sample_costs(const PrrAst& ast, long n_star, std::size_t samples,
                                 std::uint64_t seed, unsigned threads = 0);

// Cost distribution of p(n_star) for single-recursion PRRs, n_star <= 30.
// Each pruning step drops the least likely entries up to a total mass of
// 1e-12; self-loops are unrolled until their
// remaining mass drops below that threshold.
std::map<double, double> exact_distribution(const CanonicalPrr& prr, long n_star);

// One-sided Clopper-Pearson confidence bounds for a binomial proportion k/n.
double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence = 0.99);
double clopper_pearson_lower(std::size_t k, std::size_t n, double confidence = 0.99);

// Asymptotic two-sample Kolmogorov-Smirnov p-value.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

class EmpiricalTail {
 public:
  EmpiricalTail(std::vector<double> samples, long n_star, std::uint64_t seed);

  long n_star() const { return n_star_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

  std::size_t count_at_least(double x) const;
  double tail(double x) const;        // fraction of samples >= x
  double tail_upper(double x, double confidence = 0.99) const;
  double mean() const;
  double std_error() const;

 private:
  std::vector<double> sorted_;
  long n_star_;
  std::uint64_t seed_;
};

EmpiricalTail estimate_tail(const CanonicalPrr& prr, long n_star, std::size_t samples,
                            std::uint64_t seed);

// A bound Pr[C >= alpha * kappa(n)] <= exp(exponent(alpha, n)). A row passes
// when the bound is vacuous (> 1) or the 99% upper confidence bound of the
// tail is at most the bound. When t_bar
// and f_bar are given the MGF inequality E[exp(t C)] <= exp(t f) is also
// checked at every grid point.
struct BoundSpec {
  Poly exponent;
  Poly kappa;
  std::optional<Poly> t_bar;
  std::optional<Poly> f_bar;
};

struct ValidationRow {
  double alpha = 0;
  long n_star = 0;
  double threshold = 0;
  double bound = 0;
  std::size_t hits = 0;
  double tail = 0;
  double tail_upper = 0;
  double tail_lower = 0;
  bool vacuous = false;
  // False when the bound lies below the smallest upper confidence bound the
  // sample can produce (the zero-hit bound). Such rows pass unless the lower
  // confidence bound exceeds the bound.
  bool resolvable = true;
  bool tail_pass = true;
  std::optional<double> mgf_mean, mgf_se, mgf_rhs;
  bool mgf_pass = true;
  bool pass() const { return tail_pass && mgf_pass; }
};

struct ValidationReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<ValidationRow> rows;
  bool all_pass() const;
  std::string to_json(int indent = 2) const;
  std::string to_csv() const;
};

ValidationReport validate_bound(const CanonicalPrr& prr, const BoundSpec& bound,
                                const std::vector<double>& alphas, const std::vector<long>& ns,
                                std::size_t samples, std::uint64_t seed);
// Same, reusing an existing sample for each n (keys of `tails`).
ValidationReport validate_bound(const std::map<long, EmpiricalTail>& tails, const BoundSpec& bound,
                                const std::vector<double>& alphas);

std::string samples_to_csv(const std::vector<double>& costs);

}  // namespace prrtail

#endif  // PRRTAIL_SIMULATOR_HPP_
