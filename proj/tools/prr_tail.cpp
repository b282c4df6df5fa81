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

// prr-tail: tail-bound synthesis and validation for probabilistic
// recurrence relations. Exit codes: 0 success, 1 synthesis or verification
// failure, 2 usage error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "prrtail/benchmark.hpp"
#include "prrtail/report.hpp"
#include "prrtail/simulator.hpp"
#include "prrtail/synthesizer.hpp"
#include "prrtail/theory.hpp"

namespace fs = std::filesystem;
using namespace prrtail;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Bad input (missing file, unparsable program or expression).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CanonicalPrr load_prr(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such file: " + path);
  try {
    return to_canonical(parse_lrec_file(path));
  } catch (const LrecError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Poly expr(const std::string& text, const char* what) {
  try {
    return parse_poly(text);
  } catch (const SymPolyError& e) {
    throw UsageError(std::string("cannot parse ") + what + " '" + text + "': " + e.what());
  }
}

// Accepts "exp(E)" or the exponent E itself.
Poly bound_exponent(std::string text) {
  auto b = text.find_first_not_of(' ');
  auto e = text.find_last_not_of(' ');
  if (b != std::string::npos) text = text.substr(b, e - b + 1);
  if (text.rfind("exp(", 0) == 0 && text.back() == ')') text = text.substr(4, text.size() - 5);
  return expr(text, "bound");
}

BenchmarkSpec find_benchmark(const std::string& corpus, const std::string& name) {
  fs::path p = fs::path(corpus) / (name + ".json");
  if (!fs::exists(p)) throw UsageError("unknown benchmark '" + name + "' (no " + p.string() + ")");
  return load_benchmark(p.string());
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct SynthArgs {
  std::string file, kappa, ep;
  SynthOptions opts;
  bool json = false;
};

int cmd_synth(const SynthArgs& a) {
  CanonicalPrr prr = load_prr(a.file);
  SynthResult r = synthesize_report(prr, expr(a.kappa, "kappa"), expr(a.ep, "ep"), a.opts);
  if (a.json) {
    std::cout << r.to_json() << '\n';
  } else if (r.bound) {
    const CandidateBound& b = *r.bound;
    std::cout << "template: " << b.tpl.str() << "\n"
              << "c_f: " << b.c_f << "\nc_t: " << b.c_t << "\n"
              << "f: " << b.f_bar.str() << "\n"
              << "t: " << b.t_bar.str() << "\n"
              << "bound: " << b.exp_form() << "\n"
              << "templates tried: " << r.diagnostics.size() << " of " << r.templates_total << "\n";
  } else {
    std::cerr << "no bound found (" << r.templates_total << " templates)\n";
  }
  return r.bound ? kOk : kFailure;
}

struct SimulateArgs {
  std::string file, csv;
  long n = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  CanonicalPrr prr = load_prr(a.file);
  std::vector<double> costs = sample_costs(prr, a.n, a.samples, a.seed);
  if (!a.csv.empty()) write_file(a.csv, samples_to_csv(costs));
  EmpiricalTail t(costs, a.n, a.seed);
  auto q = [&](double p) {
    std::size_t i = std::min(t.size() - 1, static_cast<std::size_t>(std::floor(p * static_cast<double>(t.size()))));
    return t.sorted()[i];
  };
  nlohmann::json j{{"n", a.n},
                   {"samples", a.samples},
                   {"seed", a.seed},
                   {"rng", SplitMix64::kName},
                   {"mean", t.mean()},
                   {"std_error", t.std_error()},
                   {"median", q(0.5)},
                   {"q90", q(0.9)},
                   {"q99", q(0.99)},
                   {"max", t.sorted().back()}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

struct VerifyArgs {
  std::string file, bound, kappa, t, f;
  std::vector<double> alphas;
  std::vector<long> ns;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string csv;
};

int cmd_verify(const VerifyArgs& a) {
  CanonicalPrr prr = load_prr(a.file);
  BoundSpec spec{bound_exponent(a.bound), expr(a.kappa, "kappa"), std::nullopt, std::nullopt};
  if (!a.t.empty()) spec.t_bar = expr(a.t, "t");
  if (!a.f.empty()) spec.f_bar = expr(a.f, "f");
  ValidationReport r = validate_bound(prr, spec, a.alphas, a.ns, a.samples, a.seed);
  if (!a.csv.empty()) write_file(a.csv, r.to_csv());
  std::cout << r.to_json() << '\n';
  if (!r.all_pass()) std::cerr << "bound violated at some grid point\n";
  return r.all_pass() ? kOk : kFailure;
}

struct CompArgs {
  std::string file, ep;
  long n_max = 1000;
};

int cmd_comp(const CompArgs& a) {
  if (a.n_max < 20) throw UsageError("--n-max must be at least 20");
  CanonicalPrr prr = load_prr(a.file);
  Poly ep = expr(a.ep, "ep");
  ExpectedRuntime er = solve_expected_runtime(prr, a.n_max, ep);
  A1Constants m = estimate_a1_constants(prr, er, 10, a.n_max / 2);
  Poly es = expected_pre_cost_poly(prr);
  CompBound cb = comp_tail_bound(ep, es, m.m_lo, m.m_hi);
  nlohmann::json j{{"n_range", {10, a.n_max / 2}},
                   {"m_lo", m.m_lo},
                   {"m_hi", m.m_hi},
                   {"a2", check_a2(prr, prr.cp, a.n_max)},
                   {"expected_pre_cost", es.str()},
                   {"expected_pre_cost_bound", cb.es_bound.str()},
                   {"ratio", cb.ratio.str()},
                   {"coefficient", cb.coefficient},
                   {"bound", "exp(" + cb.exponent.str() + ")"}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

struct BenchArgs {
  bool all = false;
  std::string name, out, corpus, golden;
  unsigned threads = 0;
  bool strict = false;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<BenchmarkSpec> specs;
  if (a.all)
    specs = load_corpus(a.corpus);
  else
    specs.push_back(find_benchmark(a.corpus, a.name));
  BenchReport rep = run_benchmarks(specs, SynthOptions{}, a.threads);
  std::string csv = rep.to_csv();
  std::cout << csv;
  if (!a.out.empty()) {
    write_file(fs::path(a.out) / "bench.csv", csv);
    write_file(fs::path(a.out) / "bench_expressions.csv", rep.expressions_csv());
  }
  for (const BenchRow& r : rep.rows)
    if (!r.bound) std::cerr << r.name << ": " << r.error << '\n';
  std::size_t diffs = 0;
  fs::path golden = a.golden.empty() ? fs::path(a.corpus) / "golden_bench.csv" : fs::path(a.golden);
  if (fs::exists(golden)) {
    auto d = diff_golden(rep, read_file(golden));
    diffs = d.size();
    for (const GoldenDiff& g : d)
      std::cerr << "golden " << g.name << " " << g.column << ": expected '" << g.expected << "' got '" << g.actual << "'\n";
    std::cerr << "golden: " << d.size() << " difference(s) against " << golden.string() << '\n';
  }
  std::cerr << "total: " << rep.total_seconds << " s\n";
  if (!rep.all_synthesized()) return kFailure;
  return a.strict && diffs > 0 ? kFailure : kOk;
}

struct CompareArgs {
  std::string name, points = "10,13;11,15;12,17", out, corpus;
  long n_star = 17;
};

int cmd_compare(const CompareArgs& a) {
  BenchmarkSpec spec = find_benchmark(a.corpus, a.name);
  if (!spec.karp) throw UsageError(spec.name + " has no stored Karp bound to compare with");
  std::vector<std::pair<double, long>> points;
  try {
    points = parse_points(a.points);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad --points: ") + e.what());
  }
  CandidateBound b = synthesize(spec.load(), spec.kappa_poly(), spec.ep_poly());
  std::cout << "# " << spec.name << " ours=" << b.exp_form() << " karp=exp(" << parse_poly(*spec.karp).str() << ")\n"
            << comparison_csv(compare_reference(spec, b.bound_exponent, points));
  if (!a.out.empty()) {
    fs::path dir(a.out);
    auto series = [&](const Poly& e) { return plot_series(e, 10, 15, 0.1, a.n_star); };
    std::string at = " at n*=" + std::to_string(a.n_star);
    write_file(dir / (spec.name + "_ours.dat"), gnuplot_data(series(b.bound_exponent), "synthesized" + at));
    write_file(dir / (spec.name + "_karp.dat"), gnuplot_data(series(parse_poly(*spec.karp)), "karp" + at));
    if (spec.comp)
      write_file(dir / (spec.name + "_comp.dat"), gnuplot_data(series(parse_poly(*spec.comp)), "comp" + at));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential tail bounds for probabilistic recurrence relations", "prr-tail"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "synthesize a tail bound");
  synth->add_option("file", sa.file, "program (.prr)")->required();
  synth->add_option("--kappa", sa.kappa, "kappa(n)")->required();
  synth->add_option("--ep", sa.ep, "upper bound of the expected runtime")->required();
  synth->add_option("--B", sa.opts.B, "exponent range")->default_val(2)->check(CLI::NonNegativeNumber);
  synth->add_option("--M", sa.opts.M, "doubling/halving steps")->default_val(4)->check(CLI::PositiveNumber);
  synth->add_option("--Q", sa.opts.Q, "divide-and-conquer blocks")->default_val(8)->check(CLI::PositiveNumber);
  synth->add_option("--threads", sa.opts.threads, "worker threads")->default_val(1);
  synth->add_flag("--all-templates", sa.opts.all_templates, "evaluate every template");
  synth->add_flag("--json", sa.json, "JSON report");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "sample the total cost");
  sim->add_option("file", ma.file, "program (.prr)")->required();
  sim->add_option("--n", ma.n, "initial size")->required();
  sim->add_option("--samples", ma.samples, "number of runs")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", ma.seed, "seed")->required();
  sim->add_option("--csv", ma.csv, "write the samples to this file");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check a bound against simulation");
  ver->add_option("file", va.file, "program (.prr)")->required();
  ver->add_option("--bound", va.bound, "exp(E) or E")->required();
  ver->add_option("--kappa", va.kappa, "kappa(n)")->required();
  ver->add_option("--alpha", va.alphas, "comma-separated alphas")->required()->delimiter(',');
  ver->add_option("--n", va.ns, "comma-separated initial sizes")->required()->delimiter(',');
  ver->add_option("--samples", va.samples, "runs per size")->required()->check(CLI::PositiveNumber);
  ver->add_option("--seed", va.seed, "seed")->required();
  ver->add_option("--t", va.t, "t(alpha, n) for the moment check");
  ver->add_option("--f", va.f, "f(alpha, n) for the moment check");
  ver->add_option("--csv", va.csv, "write the rows to this file");

  CompArgs ca;
  auto* comp = app.add_subcommand("comp-bound", "closed-form bound from the expected runtime");
  comp->add_option("file", ca.file, "program (.prr)")->required();
  comp->add_option("--ep", ca.ep, "expected runtime")->required();
  comp->add_option("--n-max", ca.n_max, "largest n of the exact recurrence")->default_val(1000);

  BenchArgs ba;
  ba.corpus = PRRTAIL_CORPUS_DIR;
  auto* bench = app.add_subcommand("bench", "run the benchmark corpus");
  auto* all = bench->add_flag("--all", ba.all, "every benchmark");
  auto* name = bench->add_option("--name", ba.name, "one benchmark");
  all->excludes(name);
  bench->add_option("--out", ba.out, "output directory");
  bench->add_option("--corpus", ba.corpus, "corpus directory")->check(CLI::ExistingDirectory);
  bench->add_option("--golden", ba.golden, "golden CSV (default: <corpus>/golden_bench.csv)");
  bench->add_option("--threads", ba.threads, "worker threads (0 = all cores)");
  bench->add_flag("--strict", ba.strict, "fail on golden differences");

  CompareArgs pa;
  pa.corpus = PRRTAIL_CORPUS_DIR;
  auto* cmp = app.add_subcommand("compare", "concrete values against the stored Karp bound");
  cmp->add_option("--name", pa.name, "benchmark")->required();
  cmp->add_option("--points", pa.points, "alpha,n pairs separated by ';'")->capture_default_str();
  cmp->add_option("--out", pa.out, "directory for gnuplot data files");
  cmp->add_option("--n-star", pa.n_star, "n* of the plot data")->default_val(17);
  cmp->add_option("--corpus", pa.corpus, "corpus directory")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
    if (bench->parsed() && !ba.all && ba.name.empty()) throw CLI::RequiredError("--all or --name");
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;  // help is not an error
  }

  try {
    if (synth->parsed()) return cmd_synth(sa);
    if (sim->parsed()) return cmd_simulate(ma);
    if (ver->parsed()) return cmd_verify(va);
    if (comp->parsed()) return cmd_comp(ca);
    if (bench->parsed()) return cmd_bench(ba);
    if (cmp->parsed()) return cmd_compare(pa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NoBoundFound& e) {
    std::cerr << "no bound found: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
