/* SPDX-License-Identifier: Apache-2.0 */
#include "prrtail/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

namespace prrtail {

namespace {

std::string canonical(const std::string& expr) { return parse_poly(expr).str(); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

BenchRow run_one(const BenchmarkSpec& spec, const SynthOptions& opts) {
  BenchRow row;
  row.name = spec.name;
  row.ref_f = canonical(spec.table3.f);
  row.ref_t = canonical(spec.table3.t);
  row.ref_exponent = canonical(spec.table3.bound);
  if (spec.karp) row.karp = canonical(*spec.karp);
  if (spec.comp) row.comp = canonical(*spec.comp);
  auto t0 = std::chrono::steady_clock::now();
  try {
    SynthResult r = synthesize_report(spec.load(), spec.kappa_poly(), spec.ep_poly(), opts);
    row.bound = r.bound;
    if (!r.bound) row.error = "no template succeeded";
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (row.bound) {
    row.f = row.bound->f_bar.str();
    row.t = row.bound->t_bar.str();
    row.exponent = row.bound->bound_exponent.str();
    row.match_f = row.f == row.ref_f;
    row.match_t = row.t == row.ref_t;
    row.match_bound = row.exponent == row.ref_exponent;
  }
  return row;
}

}  // namespace

bool BenchReport::all_synthesized() const {
  return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.bound.has_value(); });
}

std::string BenchReport::to_csv() const {
  std::ostringstream o;
  o << "name,f,t,bound,time_s,karp,comp,match\n";
  for (const BenchRow& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.4f", r.seconds);
    o << r.name << ',' << r.f << ',' << r.t << ',' << r.exponent << ',' << secs << ',' << r.karp << ',' << r.comp
      << ',' << (r.match() ? "true" : "false") << '\n';
  }
  return o.str();
}

std::string BenchReport::expressions_csv() const {
  std::ostringstream o;
  o << "name,f,t,bound\n";
  for (const BenchRow& r : rows) o << r.name << ',' << r.f << ',' << r.t << ',' << r.exponent << '\n';
  return o.str();
}

BenchReport run_benchmarks(const std::vector<BenchmarkSpec>& specs, const SynthOptions& opts, unsigned threads) {
  BenchReport rep;
  rep.rows.resize(specs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, specs.size())));
  auto t0 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) rep.rows[i] = run_one(specs[i], opts);
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  rep.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::sort(rep.rows.begin(), rep.rows.end(), [](const BenchRow& a, const BenchRow& b) { return a.name < b.name; });
  return rep;
}

std::string golden_csv(const std::vector<BenchmarkSpec>& specs) {
  std::vector<BenchmarkSpec> sorted = specs;
  std::sort(sorted.begin(), sorted.end(), [](const BenchmarkSpec& a, const BenchmarkSpec& b) { return a.name < b.name; });
  std::ostringstream o;
  o << "name,f,t,bound\n";
  for (const BenchmarkSpec& s : sorted)
    o << s.name << ',' << canonical(s.table3.f) << ',' << canonical(s.table3.t) << ',' << canonical(s.table3.bound)
      << '\n';
  return o.str();
}

std::vector<GoldenDiff> diff_golden(const BenchReport& report, const std::string& golden_text) {
  static const char* kCols[] = {"name", "f", "t", "bound"};
  std::map<std::string, std::vector<std::string>> golden;
  std::istringstream in(golden_text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto cells = split(line, ',');
    cells.resize(4);
    golden[cells[0]] = cells;
  }
  std::vector<GoldenDiff> out;
  for (const BenchRow& r : report.rows) {
    auto it = golden.find(r.name);
    if (it == golden.end()) {
      out.push_back({r.name, "name", "", r.name});
      continue;
    }
    const std::vector<std::string> actual = {r.name, r.f, r.t, r.exponent};
    for (int c = 1; c < 4; ++c)
      if (trim(it->second[c]) != actual[c]) out.push_back({r.name, kCols[c], trim(it->second[c]), actual[c]});
  }
  return out;
}

double bound_value(const Poly& exponent, double alpha, double n) {
  Env env;
  env.alpha = alpha;
  env.n = n;
  return std::exp(eval_numeric(exponent, env));
}

std::vector<ComparisonRow> compare_reference(const BenchmarkSpec& spec, const Poly& ours,
                                             const std::vector<std::pair<double, long>>& points) {
  if (!spec.karp) throw MissingReference(spec.name + " has no stored Karp bound");
  Poly karp = parse_poly(*spec.karp);
  std::vector<ComparisonRow> rows;
  for (auto [a, n] : points) {
    ComparisonRow r;
    r.alpha = a;
    r.n = n;
    r.ours = bound_value(ours, a, static_cast<double>(n));
    r.karp = bound_value(karp, a, static_cast<double>(n));
    r.ratio = r.karp / r.ours;
    rows.push_back(r);
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream o;
  o << "alpha,n,ours,karp,ratio\n";
  o.precision(6);
  for (const ComparisonRow& r : rows) o << r.alpha << ',' << r.n << ',' << r.ours << ',' << r.karp << ',' << r.ratio << '\n';
  return o.str();
}

std::vector<std::pair<double, long>> parse_points(const std::string& text) {
  std::vector<std::pair<double, long>> out;
  for (const std::string& p : split(text, ';')) {
    if (trim(p).empty()) continue;
    auto xy = split(p, ',');
    if (xy.size() != 2) throw std::invalid_argument("point must be alpha,n: " + p);
    double a = std::stod(trim(xy[0]));
    long n = std::stol(trim(xy[1]));
    out.emplace_back(a, n);
  }
  if (out.empty()) throw std::invalid_argument("no points given");
  return out;
}

std::vector<std::pair<double, double>> plot_series(const Poly& exponent, double lo, double hi, double step, long n) {
  std::vector<std::pair<double, double>> out;
  int k = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= k; ++i) {
    double a = lo + i * step;
    out.emplace_back(a, bound_value(exponent, a, static_cast<double>(n)));
  }
  return out;
}

std::string gnuplot_data(const std::vector<std::pair<double, double>>& series, const std::string& title) {
  std::ostringstream o;
  o << "# " << title << "\n# alpha bound\n";
  o.precision(10);
  for (auto [a, v] : series) o << a << ' ' << v << '\n';
  return o.str();
}

}  // namespace prrtail
