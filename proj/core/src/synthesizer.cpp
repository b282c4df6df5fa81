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

#include "prrtail/synthesizer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <tuple>

#include "json.hpp"

namespace prrtail {

namespace {

Poly template_poly(double c, int p, int q, int u, int v) { return Poly::monomial(c, Exps{p, q, u, v, 0, 0}); }

Magnitude n_magnitude(const Poly& p, const char* what) {
  if (!p.is_monomial() || !p.only_in(Sym::N))
    throw std::invalid_argument(std::string(what) + " must be a single monomial in n: " + p.str());
  return magnitude(p.terms()[0], Sym::N);
}

std::string part(const char* sym, int p, int q) {
  std::string s;
  auto add = [&](const std::string& base, int k) {
    if (k == 0) return;
    if (!s.empty()) s += "*";
    s += base;
    if (k != 1) s += "^" + std::to_string(k);
  };
  add(sym, p);
  add(std::string("ln(") + sym + ")", q);
  return s.empty() ? "1" : s;
}

nlohmann::json template_json(const BoundTemplate& t) {
  return {{"p_f", t.p_f}, {"q_f", t.q_f}, {"u_f", t.u_f}, {"v_f", t.v_f},
          {"p_t", t.p_t}, {"q_t", t.q_t}, {"u_t", t.u_t}, {"v_t", t.v_t}, {"text", t.str()}};
}

}  // namespace

Poly BoundTemplate::f(double c_f) const { return template_poly(c_f, p_f, q_f, u_f, v_f); }
Poly BoundTemplate::t(double c_t) const { return template_poly(c_t, p_t, q_t, u_t, v_t); }

std::string BoundTemplate::str() const {
  return "f: " + part("alpha", p_f, q_f) + " * " + part("n", u_f, v_f) + "; t: " + part("alpha", p_t, q_t) + " * " +
         part("n", u_t, v_t);
}

std::string CandidateBound::to_json(int indent) const {
  nlohmann::json j;
  j["template"] = template_json(tpl);
  j["c_f"] = c_f;
  j["c_t"] = c_t;
  j["f"] = f_bar.str();
  j["t"] = t_bar.str();
  j["bound_exponent"] = bound_exponent.str();
  j["bound"] = exp_form();
  return j.dump(indent);
}

long raw_template_count(int B) {
  long a = 2L * B + 1, b = B + 1L;
  return a * a * a * a * b * b * b * b;
}

std::vector<BoundTemplate> enumerate_templates(int B, const Poly& ep, const Poly& kappa) {
  Magnitude lo = n_magnitude(ep, "ep"), hi = n_magnitude(kappa, "kappa");
  const Magnitude f_cap{1, 0}, t_floor{-1, 0};
  std::vector<BoundTemplate> out;
  for (int p_f = -B; p_f <= B; ++p_f)
    for (int q_f = -B; q_f <= B; ++q_f) {
      if (Magnitude{p_f, q_f} > f_cap) continue;
      for (int u_f = 0; u_f <= B; ++u_f)
        for (int v_f = 0; v_f <= B; ++v_f) {
          Magnitude fm{u_f, v_f};
          if (fm < lo || fm > hi) continue;
          for (int p_t = -B; p_t <= B; ++p_t)
            for (int q_t = -B; q_t <= B; ++q_t) {
              if (Magnitude{p_t, q_t} < t_floor) continue;
              for (int u_t = -B; u_t <= 0; ++u_t)
                for (int v_t = -B; v_t <= 0; ++v_t) {
                  if (Magnitude{-u_t, -v_t} > hi) continue;
                  out.push_back(BoundTemplate{p_f, q_f, u_f, v_f, p_t, q_t, u_t, v_t});
                }
            }
        }
    }
  // Tightest first: n-magnitude of t * kappa, then alpha-magnitude of
  // t * alpha, both descending. Within a level f = alpha * kappa (a bound
  // that cannot decrease for c_f >= 1) goes last, then smaller f first.
  auto key = [&](const BoundTemplate& t) {
    Magnitude level{t.u_t + hi.pow, t.v_t + hi.ln};
    Magnitude alev{t.p_t + 1, t.q_t};
    bool demoted = t.p_f == 1 && t.q_f == 0 && Magnitude{t.u_f, t.v_f} == hi;
    return std::tuple{Magnitude{-level.pow, -level.ln}, Magnitude{-alev.pow, -alev.ln}, demoted,
                      Magnitude{t.u_f, t.v_f}, Magnitude{t.p_f, t.q_f}, t.tuple()};
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const BoundTemplate& a, const BoundTemplate& b) { return key(a) < key(b); });
  return out;
}

CheckResult check_cond(const CanonicalPrr& prr, const BoundTemplate& tpl, double c_f, double c_t, int Q) {
  Poly f = tpl.f(c_f), t = tpl.t(c_t);
  try {
    CanonicalConstraint q = strengthen_general(prr, f, t, Q);
    DecideReport g = decide_general(q);
    if (!g.verdict) return {false, g.reason};
    q.prefix = exact_prefix(prr, f, t, q.cp);
    DecideReport p = decide_prefix(q);
    if (!p.verdict) return {false, p.reason};
    return {true, ""};
  } catch (const StrengtheningFailure& e) {
    return {false, std::string("strengthening: ") + e.what()};
  } catch (const SymPolyError& e) {
    return {false, std::string("symbolic: ") + e.what()};
  } catch (const NonPositiveW& e) {
    return {false, std::string("integral: ") + e.what()};
  }
}

namespace {

TemplateDiagnostic run_template(const CanonicalPrr& prr, const BoundTemplate& tpl, std::size_t index, int M, int Q) {
  TemplateDiagnostic d;
  d.index = index;
  d.tpl = tpl;
  for (int i = 0; i <= M; ++i) {
    double c_t = std::ldexp(1.0, -i);
    for (int j = 0; j <= M; ++j) {
      double c_f = std::ldexp(1.0, j - 1);
      ++d.pairs_tried;
      CheckResult r = check_cond(prr, tpl, c_f, c_t, Q);
      if (r.accepted) {
        d.accepted = true;
        d.guess = Guess{c_f, c_t};
        return d;
      }
      d.last_failure = r.failure;
    }
  }
  return d;
}

}  // namespace

std::optional<Guess> guess_coefficients(const BoundTemplate& tpl, const CanonicalPrr& prr, int M, int Q) {
  return run_template(prr, tpl, 0, M, Q).guess;
}

CandidateBound assemble_bound(const BoundTemplate& tpl, double c_f, double c_t, const Poly& kappa) {
  CandidateBound b;
  b.tpl = tpl;
  b.c_f = c_f;
  b.c_t = c_t;
  b.f_bar = tpl.f(c_f);
  b.t_bar = tpl.t(c_t);
  b.bound_exponent = b.t_bar * (b.f_bar - Poly::var(Sym::Alpha) * kappa);
  return b;
}

SynthResult synthesize_report(const CanonicalPrr& prr, const Poly& kappa, const Poly& ep, const SynthOptions& opts) {
  std::vector<BoundTemplate> tpls = enumerate_templates(opts.B, ep, kappa);
  SynthResult res;
  res.templates_total = tpls.size();
  unsigned threads = std::max(1u, opts.threads);
  std::size_t batch = threads == 1 ? 1 : 4 * static_cast<std::size_t>(threads);
  for (std::size_t start = 0; start < tpls.size(); start += batch) {
    std::size_t end = std::min(tpls.size(), start + batch);
    std::vector<TemplateDiagnostic> diag(end - start);
    if (threads == 1) {
      for (std::size_t i = start; i < end; ++i) diag[i - start] = run_template(prr, tpls[i], i, opts.M, opts.Q);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = start + w; i < end; i += threads)
            diag[i - start] = run_template(prr, tpls[i], i, opts.M, opts.Q);
        });
      for (std::thread& th : pool) th.join();
    }
    for (TemplateDiagnostic& d : diag) {
      bool first = d.accepted && !res.bound;
      if (first) res.bound = assemble_bound(d.tpl, d.guess->c_f, d.guess->c_t, kappa);
      res.diagnostics.push_back(std::move(d));
      if (first && !opts.all_templates) return res;
    }
  }
  return res;
}

CandidateBound synthesize(const CanonicalPrr& prr, const Poly& kappa, const Poly& ep, int B, int M, int Q) {
  SynthOptions o;
  o.B = B;
  o.M = M;
  o.Q = Q;
  SynthResult r = synthesize_report(prr, kappa, ep, o);
  if (!r.bound) throw NoBoundFound("no template admits a bound (" + std::to_string(r.templates_total) + " tried)");
  return *r.bound;
}

std::string SynthResult::to_json(int indent) const {
  nlohmann::json j;
  j["templates_total"] = templates_total;
  j["bound"] = bound ? nlohmann::json::parse(bound->to_json()) : nlohmann::json(nullptr);
  j["diagnostics"] = nlohmann::json::array();
  for (const TemplateDiagnostic& d : diagnostics) {
    nlohmann::json e{{"index", d.index}, {"template", template_json(d.tpl)}, {"accepted", d.accepted},
                     {"pairs_tried", d.pairs_tried}};
    if (d.guess) e["guess"] = {{"c_f", d.guess->c_f}, {"c_t", d.guess->c_t}};
    if (!d.last_failure.empty()) e["last_failure"] = d.last_failure;
    j["diagnostics"].push_back(e);
  }
  return j.dump(indent);
}

}  // namespace prrtail
