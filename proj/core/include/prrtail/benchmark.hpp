/* SPDX-License-Identifier: Apache-2.0 */
// Benchmark descriptions: a .prr program plus kappa, the expected-runtime
// bound and published reference bounds, stored as JSON next to the program.
//
// Reference bounds are stored as exponents: "karp": "1.15 - 0.28*alpha"
// stands for exp(1.15 - 0.28*alpha).
#ifndef PRRTAIL_BENCHMARK_HPP_
#define PRRTAIL_BENCHMARK_HPP_

#include <optional>
#include <string>
#include <vector>

#include "prrtail/canonical.hpp"
#include "prrtail/sympoly.hpp"

namespace prrtail {

struct SynthesisReference {
  std::string f, t, bound;
};

struct BenchmarkSpec {
  std::string name;
  std::string prr_path;  // absolute or relative to the working directory
  std::string kappa, ep;
  std::optional<std::string> karp, comp;
  SynthesisReference table3;
  std::string table1_bound;

  Poly kappa_poly() const { return parse_poly(kappa); }
  Poly ep_poly() const { return parse_poly(ep); }
  CanonicalPrr load() const;
};

// The "prr" field is resolved against the directory of the JSON file.
BenchmarkSpec load_benchmark(const std::string& json_path);
// Every *.json in `dir`, sorted by name.
std::vector<BenchmarkSpec> load_corpus(const std::string& dir);

}  // namespace prrtail

#endif  // PRRTAIL_BENCHMARK_HPP_
