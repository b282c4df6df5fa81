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

#include "prrtail/simulator.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace prrtail {

namespace {

constexpr double kIntTol = 1e-9;
constexpr double kPrune = 1e-12;
constexpr double kLoopTail = 1e-16;
constexpr std::size_t kMaxSupport = 1'000'000;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Evaluates a call size and checks it dynamically. Sizes below c_p end the
// recursion, so only the upper end is checked.
long size_value(const Expr& e, long n, double v) {
  double x = eval_expr(e, static_cast<double>(n), v);
  double r = std::round(x);
  if (!std::isfinite(x) || std::abs(x - r) > kIntTol)
    throw SimError(SimError::Kind::SizeRangeViolation,
                   "size " + print_expr(e) + " is not an integer at n=" + std::to_string(n));
  if (r > static_cast<double>(n))
    throw SimError(SimError::Kind::SizeRangeViolation,
                   "size " + print_expr(e) + " = " + format_coeff(r) + " exceeds n=" + std::to_string(n));
  return static_cast<long>(r);
}

struct CompiledDist {
  Dist::Kind kind;
  std::vector<double> cum;  // cumulative arm or piece weights
  const Dist* src;
};

CompiledDist compile(const Dist& d) {
  CompiledDist c{d.kind, {}, &d};
  double acc = 0;
  if (d.kind == Dist::Kind::Discrete)
    for (const DiscreteArm& a : d.arms) c.cum.push_back(acc += eval_expr(a.prob, 0));
  if (d.kind == Dist::Kind::PUniform)
    for (const Piece& p : d.pieces) c.cum.push_back(acc += eval_expr(p.weight, 0));
  return c;
}

std::size_t pick(const std::vector<double>& cum, double u) {
  u *= cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
}

double sample_v(const CompiledDist& d, long n, SplitMix64& rng) {
  switch (d.kind) {
    case Dist::Kind::Uniform: return static_cast<double>(rng.below(n));
    case Dist::Kind::MUniform: {
      long i = static_cast<long>(rng.below(n));
      return static_cast<double>(std::max(i, n - 1 - i));
    }
    case Dist::Kind::Discrete:
      return eval_expr(d.src->arms[pick(d.cum, rng.uniform01())].value, static_cast<double>(n));
    case Dist::Kind::PUniform: {
      const Piece& p = d.src->pieces[pick(d.cum, rng.uniform01())];
      long lo = std::lround(eval_expr(p.lo, static_cast<double>(n)));
      long hi = std::lround(eval_expr(p.hi, static_cast<double>(n)));
      if (hi < lo)
        throw SimError(SimError::Kind::SizeRangeViolation,
                       "empty puniform piece at n=" + std::to_string(n));
      return static_cast<double>(lo + static_cast<long>(rng.below(hi - lo + 1)));
    }
  }
  return 0;
}

struct CompiledBranch {
  const Branch* b;
  CompiledDist dist;
};

struct CompiledPrr {
  int cp;
  std::vector<double> cum;
  std::vector<CompiledBranch> branches;

  explicit CompiledPrr(const CanonicalPrr& prr) : cp(prr.cp) {
    double acc = 0;
    for (const Branch& b : prr.branches) {
      cum.push_back(acc += b.prob);
      branches.push_back({&b, compile(b.dist)});
    }
  }
};

double run_compiled(const CompiledPrr& c, long n_star, SplitMix64& rng) {
  std::vector<long> stack{n_star};
  double cost = 0;
  std::uint64_t steps = 0;
  while (!stack.empty()) {
    long n = stack.back();
    stack.pop_back();
    if (n < c.cp) continue;
    if (++steps > kStepCap)
      throw SimError(SimError::Kind::StepCapExceeded, "step cap exceeded from n=" + std::to_string(n_star));
    const CompiledBranch& cb =
        c.branches.size() == 1 ? c.branches[0] : c.branches[pick(c.cum, rng.uniform01())];
    const Branch& b = *cb.b;
    cost += eval_expr(b.pre, static_cast<double>(n));
    double v = sample_v(cb.dist, n, rng);
    if (b.size2) stack.push_back(size_value(*b.size2, n, v));
    stack.push_back(size_value(b.size1, n, v));
  }
  return cost;
}

// AST execution: returns the calls made by one step of `c` at size n.
void exec(const Command& c, long n, SplitMix64& rng, double& cost, std::vector<long>& stack) {
  switch (c.kind) {
    case Command::Kind::Choice: {
      double u = rng.uniform01(), acc = 0;
      for (std::size_t i = 0; i < c.arms.size(); ++i) {
        acc += eval_expr(c.arms[i].prob, 0);
        if (u < acc || i + 1 == c.arms.size()) return exec(c.arms[i].cmd, n, rng, cost, stack);
      }
      return;
    }
    case Command::Kind::Sample:
    case Command::Kind::Direct: {
      double v = std::numeric_limits<double>::quiet_NaN();
      if (c.kind == Command::Kind::Sample) v = sample_v(compile(c.dist), n, rng);
      cost += eval_expr(c.body.pre, static_cast<double>(n));
      for (auto it = c.body.calls.rbegin(); it != c.body.calls.rend(); ++it)
        stack.push_back(size_value(*it, n, v));
      return;
    }
  }
}

// Run i uses substream i of `seed`; results land in slot i.
template <class Fn>
std::vector<double> parallel_runs(std::size_t samples, std::uint64_t seed, unsigned threads, Fn run) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, samples / 256)));
  std::vector<double> out(samples);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned t) {
    try {
      for (std::size_t i = t; i < samples; i += threads) {
        SplitMix64 rng = SplitMix64::substream(seed, i);
        out[i] = run(rng);
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

using CostDist = std::map<double, double>;

// Drops the least likely entries while their total mass stays below kPrune,
// so every pruning step loses at most kPrune.
CostDist prune(const CostDist& d, double budget = kPrune) {
  std::vector<std::pair<double, double>> byp;
  for (auto [c, p] : d) byp.emplace_back(p, c);
  std::sort(byp.begin(), byp.end());
  double dropped = 0;
  std::size_t k = 0;
  while (k < byp.size() && dropped + byp[k].first < budget) dropped += byp[k++].first;
  CostDist out;
  for (; k < byp.size(); ++k) out.emplace(byp[k].second, byp[k].first);
  return out;
}

void add_mass(CostDist& d, double cost, double p) {
  double tol = 1e-9 * std::max(1.0, std::abs(cost));
  auto it = d.lower_bound(cost - tol);
  if (it != d.end() && it->first <= cost + tol)
    it->second += p;
  else
    d.emplace(cost, p);
}

}  // namespace

SplitMix64 SplitMix64::substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix(seed ^ mix(index + 0x9e3779b97f4a7c15ULL)));
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

std::uint64_t SplitMix64::below(std::uint64_t m) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 x = static_cast<unsigned __int128>((*this)()) * m;
  auto lo = static_cast<std::uint64_t>(x);
  if (lo < m) {
    std::uint64_t t = (0 - m) % m;
    while (lo < t) {
      x = static_cast<unsigned __int128>((*this)()) * m;
      lo = static_cast<std::uint64_t>(x);
    }
  }
  return static_cast<std::uint64_t>(x >> 64);
}

double run_once(const CanonicalPrr& prr, long n_star, SplitMix64& rng) {
  return run_compiled(CompiledPrr(prr), n_star, rng);
}

double run_once(const PrrAst& ast, long n_star, SplitMix64& rng) {
  std::vector<long> stack{n_star};
  double cost = 0;
  std::uint64_t steps = 0;
  while (!stack.empty()) {
    long n = stack.back();
    stack.pop_back();
    if (n < ast.cp) continue;
    if (++steps > kStepCap)
      throw SimError(SimError::Kind::StepCapExceeded, "step cap exceeded from n=" + std::to_string(n_star));
    exec(ast.body, n, rng, cost, stack);
  }
  return cost;
}

std::vector<double> sample_costs(const CanonicalPrr& prr, long n_star, std::size_t samples,
                                 std::uint64_t seed, unsigned threads) {
  CompiledPrr c(prr);
  return parallel_runs(samples, seed, threads, [&](SplitMix64& rng) { return run_compiled(c, n_star, rng); });
}

std::vector<double> sample_costs(const PrrAst& ast, long n_star, std::size_t samples,
                                 std::uint64_t seed, unsigned threads) {
  return parallel_runs(samples, seed, threads, [&](SplitMix64& rng) { return run_once(ast, n_star, rng); });
}

std::map<double, double> exact_distribution(const CanonicalPrr& prr, long n_star) {
  for (const Branch& b : prr.branches)
    if (b.r != 1) throw SimError(SimError::Kind::UnsupportedShape, "exact_distribution needs r = 1");
  if (n_star > 30) throw SimError(SimError::Kind::StateExplosion, "n_star > 30");
  if (n_star < prr.cp) return {{0.0, 1.0}};

  std::vector<CostDist> dist(n_star + 1);
  for (long m = 0; m < std::min<long>(prr.cp, n_star + 1); ++m) dist[m] = {{0.0, 1.0}};
  for (long m = prr.cp; m <= n_star; ++m) {
    CostDist direct;
    std::vector<std::pair<double, double>> loops;  // (shift, prob) back to size m
    double loop_mass = 0;
    for (const Branch& b : prr.branches) {
      double s = eval_expr(b.pre, static_cast<double>(m));
      for (auto [v, pv] : support(b.dist, m)) {
        double p = b.prob * pv;
        if (p <= 0) continue;
        long size = size_value(b.size1, m, v);
        if (size == m) {
          loops.emplace_back(s, p);
          loop_mass += p;
        } else if (size < prr.cp) {
          add_mass(direct, s, p);
        } else {
          for (auto [c, pc] : dist[size]) add_mass(direct, c + s, p * pc);
        }
      }
    }
    if (loop_mass >= 1 - 1e-15)
      throw SimError(SimError::Kind::StateExplosion, "self-loop with probability 1 at n=" + std::to_string(m));
    // D = direct + sum_j p_j shift(D, s_j), unrolled.
    CostDist total = direct, term = direct;
    double mass = 1;
    while (!loops.empty() && mass > kLoopTail) {
      CostDist next;
      for (auto [s, p] : loops)
        for (auto [c, pc] : term) add_mass(next, c + s, p * pc);
      term = prune(next, kLoopTail);
      mass = 0;
      for (auto& [c, pc] : term) {
        mass += pc;
        add_mass(total, c, pc);
      }
      if (total.size() > kMaxSupport) throw SimError(SimError::Kind::StateExplosion, "support too large");
    }
    CostDist pruned = prune(total);
    if (pruned.size() > kMaxSupport) throw SimError(SimError::Kind::StateExplosion, "support too large");
    dist[m] = std::move(pruned);
  }
  return dist[n_star];
}

double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence) {
  if (n == 0 || k >= n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), confidence);
}

double clopper_pearson_lower(std::size_t k, std::size_t n, double confidence) {
  if (n == 0 || k == 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), 1 - confidence);
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double en = std::sqrt(na * nb / (na + nb));
  double lambda = (en + 0.12 + 0.11 / en) * d;
  // Kolmogorov distribution survival function.
  double sum = 0, sign = 1;
  for (int k = 1; k <= 100; ++k) {
    double t = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += t;
    if (std::abs(t) < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  return lambda < 1e-3 ? 1.0 : std::clamp(2 * sum, 0.0, 1.0);
}

EmpiricalTail::EmpiricalTail(std::vector<double> samples, long n_star, std::uint64_t seed)
    : sorted_(std::move(samples)), n_star_(n_star), seed_(seed) {
  if (sorted_.empty()) throw std::invalid_argument("EmpiricalTail needs at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t EmpiricalTail::count_at_least(double x) const {
  return static_cast<std::size_t>(sorted_.end() - std::lower_bound(sorted_.begin(), sorted_.end(), x));
}

double EmpiricalTail::tail(double x) const {
  return static_cast<double>(count_at_least(x)) / static_cast<double>(sorted_.size());
}

double EmpiricalTail::tail_upper(double x, double confidence) const {
  return clopper_pearson_upper(count_at_least(x), sorted_.size(), confidence);
}

double EmpiricalTail::mean() const {
  double s = 0;
  for (double c : sorted_) s += c;
  return s / static_cast<double>(sorted_.size());
}

double EmpiricalTail::std_error() const {
  double m = mean(), s = 0;
  for (double c : sorted_) s += (c - m) * (c - m);
  double n = static_cast<double>(sorted_.size());
  return n > 1 ? std::sqrt(s / (n - 1) / n) : 0.0;
}

EmpiricalTail estimate_tail(const CanonicalPrr& prr, long n_star, std::size_t samples, std::uint64_t seed) {
  return EmpiricalTail(sample_costs(prr, n_star, samples, seed), n_star, seed);
}

bool ValidationReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.pass(); });
}

std::string ValidationReport::to_json(int indent) const {
  nlohmann::json j;
  j["rng"] = SplitMix64::kName;
  j["seed"] = seed;
  j["samples"] = samples;
  j["all_pass"] = all_pass();
  j["rows"] = nlohmann::json::array();
  for (const ValidationRow& r : rows) {
    nlohmann::json jr{{"alpha", r.alpha},       {"n", r.n_star},         {"threshold", r.threshold},
                      {"bound", r.bound},       {"hits", r.hits},        {"tail", r.tail},
                      {"tail_upper", r.tail_upper}, {"tail_lower", r.tail_lower},
                      {"resolvable", r.resolvable}, {"vacuous", r.vacuous}, {"tail_pass", r.tail_pass},
                      {"pass", r.pass()}};
    if (r.mgf_mean) {
      jr["mgf_mean"] = *r.mgf_mean;
      jr["mgf_se"] = *r.mgf_se;
      jr["mgf_rhs"] = *r.mgf_rhs;
      jr["mgf_pass"] = r.mgf_pass;
    }
    j["rows"].push_back(jr);
  }
  return j.dump(indent);
}

std::string ValidationReport::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "alpha,n,threshold,bound,hits,tail,tail_upper,tail_lower,resolvable,vacuous,tail_pass,mgf_mean,mgf_se,mgf_rhs,mgf_pass,pass\n";
  for (const ValidationRow& r : rows) {
    os << r.alpha << ',' << r.n_star << ',' << r.threshold << ',' << r.bound << ',' << r.hits << ','
       << r.tail << ',' << r.tail_upper << ',' << r.tail_lower << ',' << r.resolvable << ',' << r.vacuous << ',' << r.tail_pass << ',';
    if (r.mgf_mean)
      os << *r.mgf_mean << ',' << *r.mgf_se << ',' << *r.mgf_rhs << ',' << r.mgf_pass;
    else
      os << ",,,";
    os << ',' << r.pass() << '\n';
  }
  return os.str();
}

ValidationReport validate_bound(const std::map<long, EmpiricalTail>& tails, const BoundSpec& bound,
                                const std::vector<double>& alphas) {
  ValidationReport rep;
  for (const auto& [n, tail] : tails) {
    rep.samples = tail.size();
    rep.seed = tail.seed();
    for (double a : alphas) {
      Env env;
      env.alpha = a;
      env.n = static_cast<double>(n);
      ValidationRow row;
      row.alpha = a;
      row.n_star = n;
      row.threshold = a * eval_numeric(bound.kappa, env);
      row.bound = std::exp(eval_numeric(bound.exponent, env));
      row.hits = tail.count_at_least(row.threshold);
      row.tail = tail.tail(row.threshold);
      row.tail_upper = tail.tail_upper(row.threshold);
      row.tail_lower = clopper_pearson_lower(row.hits, tail.size());
      row.vacuous = row.bound > 1.0;
      row.resolvable = row.bound >= clopper_pearson_upper(0, tail.size());
      row.tail_pass = row.vacuous || row.tail_upper <= row.bound || (!row.resolvable && row.tail_lower <= row.bound);
      if (bound.t_bar && bound.f_bar) {
        double t = eval_numeric(*bound.t_bar, env), f = eval_numeric(*bound.f_bar, env);
        // Scaled by exp(-shift) to keep exp(t C) finite.
        double shift = t * tail.sorted().back();
        double s = 0, s2 = 0;
        for (double c : tail.sorted()) {
          double x = std::exp(t * c - shift);
          s += x;
          s2 += x * x;
        }
        double cnt = static_cast<double>(tail.size());
        double m = s / cnt;
        double var = std::max(0.0, (s2 / cnt - m * m) * cnt / std::max(1.0, cnt - 1));
        double se = std::sqrt(var / cnt);
        double rhs = std::exp(t * f - shift);
        row.mgf_pass = m <= rhs + 3 * se;
        row.mgf_mean = m * std::exp(shift);
        row.mgf_se = se * std::exp(shift);
        row.mgf_rhs = std::exp(t * f);
      }
      rep.rows.push_back(row);
    }
  }
  return rep;
}

ValidationReport validate_bound(const CanonicalPrr& prr, const BoundSpec& bound,
                                const std::vector<double>& alphas, const std::vector<long>& ns,
                                std::size_t samples, std::uint64_t seed) {
  std::map<long, EmpiricalTail> tails;
  for (long n : ns) tails.emplace(n, estimate_tail(prr, n, samples, seed));
  return validate_bound(tails, bound, alphas);
}

std::string samples_to_csv(const std::vector<double>& costs) {
  std::ostringstream os;
  os.precision(17);
  os << "cost\n";
  for (double c : costs) os << c << '\n';
  return os.str();
}

}  // namespace prrtail
