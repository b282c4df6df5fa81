/* SPDX-License-Identifier: Apache-2.0 */
// Corpus runs and comparison tables: synthesis of each benchmark against its
// stored reference, concrete bound values at (alpha, n*) points, and
// two-column plot data.

#ifndef PRRTAIL_REPORT_HPP_
#define PRRTAIL_REPORT_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prrtail/benchmark.hpp"
#include "prrtail/synthesizer.hpp"

namespace prrtail {

struct BenchRow {
  std::string name;
  std::optional<CandidateBound> bound;  // empty when synthesis failed
  std::string error;
  double seconds = 0;
  // Canonical printing of the synthesized and reference expressions.
  std::string f, t, exponent;
  std::string ref_f, ref_t, ref_exponent;
  std::string karp, comp;  // stored reference exponents, empty when absent
  bool match_f = false, match_t = false, match_bound = false;
  bool match() const { return match_f && match_t && match_bound; }
};

struct BenchReport {
  std::vector<BenchRow> rows;  // sorted by name
  double total_seconds = 0;
  bool all_synthesized() const;
  // name,f,t,bound,time_s,karp,comp,match
  std::string to_csv() const;
  // name,f,t,bound: the columns that are compared with the golden file.
  std::string expressions_csv() const;
};

// Synthesizes every spec on a pool of `threads` workers (0 = hardware
// concurrency). Failures are recorded per row.
BenchReport run_benchmarks(const std::vector<BenchmarkSpec>& specs, const SynthOptions& opts,
                           unsigned threads = 0);

// Golden rows (name,f,t,bound) built from the stored references.
std::string golden_csv(const std::vector<BenchmarkSpec>& specs);

struct GoldenDiff {
  std::string name;
  std::string column;
  std::string expected, actual;
};
// Compares the expression columns of `report` with a golden CSV text. Rows
// absent from the report are skipped.
std::vector<GoldenDiff> diff_golden(const BenchReport& report, const std::string& golden_text);

class MissingReference : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ComparisonRow {
  double alpha = 0;
  long n = 0;
  double ours = 0;
  double karp = 0;
  double ratio = 0;  // karp / ours
};

// exp(exponent) evaluated at (alpha, n).
double bound_value(const Poly& exponent, double alpha, double n);

std::vector<ComparisonRow> compare_reference(const BenchmarkSpec& spec, const Poly& ours,
                                             const std::vector<std::pair<double, long>>& points);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

// Parses "10,13;11,15;12,17".
std::vector<std::pair<double, long>> parse_points(const std::string& text);

// (alpha, exp(exponent(alpha, n))) for alpha = lo, lo + step, ..., hi.
std::vector<std::pair<double, double>> plot_series(const Poly& exponent, double lo, double hi, double step, long n);
// Gnuplot data: a comment header, then one "alpha value" line per point.
std::string gnuplot_data(const std::vector<std::pair<double, double>>& series, const std::string& title);

}  // namespace prrtail

#endif  // PRRTAIL_REPORT_HPP_
