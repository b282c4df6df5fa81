/* SPDX-License-Identifier: Apache-2.0 */
#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "corpus.hpp"
#include "json.hpp"
#include "prrtail/benchmark.hpp"
#include "prrtail/decider.hpp"
#include "prrtail/strengthener.hpp"
#include "prrtail/synthesizer.hpp"

using namespace prrtail;
using prrtail::testing::corpus_config;
using prrtail::testing::corpus_names;
using prrtail::testing::corpus_path;

namespace {

CanonicalPrr canon(const std::string& name) { return to_canonical(parse_lrec_file(corpus_path(name))); }

// f = alpha ln^-1 alpha n, t = ln alpha n^-1.
const BoundTemplate kQuickSelectWinner{1, -1, 1, 0, 0, 1, -1, 0};

bool contains(const std::vector<BoundTemplate>& v, const BoundTemplate& t) {
  return std::find(v.begin(), v.end(), t) != v.end();
}

// Template whose f(1), t(1) have the monomial shapes of the given polynomials.
BoundTemplate template_of(const Poly& f, const Poly& t) {
  EXPECT_TRUE(f.is_monomial() && t.is_monomial()) << f.str() << " " << t.str();
  const Mono& a = f.terms()[0];
  const Mono& b = t.terms()[0];
  return BoundTemplate{a.pow(Sym::Alpha), a.lnpow(Sym::Alpha), a.pow(Sym::N), a.lnpow(Sym::N),
                       b.pow(Sym::Alpha), b.lnpow(Sym::Alpha), b.pow(Sym::N), b.lnpow(Sym::N)};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST(Templates, QuickSelectCountsAtB1) {
  EXPECT_EQ(raw_template_count(1), 1296);
  EXPECT_EQ(raw_template_count(2), 625L * 81);
  auto tpls = enumerate_templates(1, parse_poly("4*n"), parse_poly("n"));
  EXPECT_LE(tpls.size(), 200u);
  EXPECT_EQ(tpls.size(), 192u);
  EXPECT_TRUE(contains(tpls, kQuickSelectWinner));
  for (const BoundTemplate& t : tpls) {
    EXPECT_EQ(t.u_f, 1);
    EXPECT_EQ(t.v_f, 0);
  }
}

TEST(Templates, KappaEqualsEpForcesF) {
  for (const BoundTemplate& t : enumerate_templates(2, parse_poly("n*ln(n)"), parse_poly("n*ln(n)"))) {
    EXPECT_EQ(t.u_f, 1);
    EXPECT_EQ(t.v_f, 1);
  }
}

TEST(Templates, DegenerateB0) {
  EXPECT_TRUE(enumerate_templates(0, parse_poly("n"), parse_poly("n")).empty());
  auto c = enumerate_templates(0, Poly(1), Poly(1));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], BoundTemplate{});
}

TEST(Templates, OrderedByTightness) {
  Poly kappa = parse_poly("n*ln(n)");
  auto tpls = enumerate_templates(2, parse_poly("2*n*ln(n)"), kappa);
  for (std::size_t i = 1; i < tpls.size(); ++i) {
    const BoundTemplate& a = tpls[i - 1];
    const BoundTemplate& b = tpls[i];
    Magnitude la{a.u_t + 1, a.v_t + 1}, lb{b.u_t + 1, b.v_t + 1};
    ASSERT_GE(la, lb) << a.str() << " then " << b.str();
    if (la == lb) ASSERT_GE((Magnitude{a.p_t, a.q_t}), (Magnitude{b.p_t, b.q_t})) << a.str() << " then " << b.str();
  }
}

TEST(Templates, ReferenceTemplatesSurvivePruning) {
  for (const auto& name : corpus_names()) {
    BenchmarkSpec spec = load_benchmark(corpus_config(name));
    auto tpls = enumerate_templates(2, spec.ep_poly(), spec.kappa_poly());
    BoundTemplate ref = template_of(parse_poly(spec.table3.f), parse_poly(spec.table3.t));
    EXPECT_TRUE(contains(tpls, ref)) << name << " " << ref.str();
  }
}

TEST(Guess, DoublingReachesTwo) {
  CanonicalPrr c = canon("quickselect");
  auto g = guess_coefficients(kQuickSelectWinner, c, 2);
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(g->c_f, 2.0);
  EXPECT_EQ(g->c_t, 1.0);
  EXPECT_TRUE(check_cond(c, kQuickSelectWinner, 4, 1, 8).accepted);
}

TEST(Guess, CappedBelowTwoFallsBackToSmallerT) {
  CanonicalPrr c = canon("quickselect");
  // With c_f in {1/2, 1} no pair at c_t = 1 holds: the exact expectation
  // exceeds 1 somewhere on the grid.
  for (double c_f : {0.5, 1.0}) {
    EXPECT_FALSE(check_cond(c, kQuickSelectWinner, c_f, 1, 8).accepted) << c_f;
    Poly f = kQuickSelectWinner.f(c_f), t = kQuickSelectWinner.t(1);
    double worst = 0;
    for (double a = 2; a <= 1024; a *= 2)
      for (long n = 2; n <= 200; ++n) worst = std::max(worst, exact_lhs(c, f, t, a, n));
    EXPECT_GT(worst, 1.0) << c_f;
  }
  // The halved t of the second row is valid once alpha is large, and M = 1
  // returns it.
  auto g = guess_coefficients(kQuickSelectWinner, c, 1);
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(g->c_f, 0.5);
  EXPECT_EQ(g->c_t, 0.5);
  Poly f = kQuickSelectWinner.f(g->c_f), t = kQuickSelectWinner.t(g->c_t);
  for (long n = 2; n <= 3000; n += 7) EXPECT_LE(exact_lhs(c, f, t, 1024, n), 1.0) << n;
}

TEST(Assemble, Examples) {
  CandidateBound qs = assemble_bound(kQuickSelectWinner, 2, 1, parse_poly("n"));
  EXPECT_TRUE(qs.bound_exponent.approx_equal(parse_poly("2*alpha - alpha*ln(alpha)"), 1e-12)) << qs.exp_form();
  CandidateBound qk = assemble_bound(BoundTemplate{0, 0, 1, 1, 0, 0, -1, 0}, 4, 1, parse_poly("n*ln(n)"));
  EXPECT_TRUE(qk.bound_exponent.approx_equal(parse_poly("(4 - alpha)*ln(n)"), 1e-12)) << qk.exp_form();
  CandidateBound v = assemble_bound(BoundTemplate{1, 0, 1, 0, 0, 0, -1, 0}, 1, 0.5, parse_poly("n"));
  EXPECT_TRUE(v.bound_exponent.is_zero()) << v.exp_form();
  auto j = nlohmann::json::parse(qs.to_json());
  EXPECT_EQ(j["c_f"], 2.0);
}

TEST(Synthesize, QuickSelectFamilyUnderOneSecond) {
  struct Row {
    const char* name;
    const char* bound;
  };
  for (Row r : {Row{"quickselect", "2*alpha - alpha*ln(alpha)"}, Row{"randsearch", "(2*alpha - alpha*ln(alpha))*ln(n)"},
                Row{"mc4", "2*alpha - alpha*ln(alpha)"}}) {
    BenchmarkSpec spec = load_benchmark(corpus_config(r.name));
    auto t0 = std::chrono::steady_clock::now();
    CandidateBound b = synthesize(spec.load(), spec.kappa_poly(), spec.ep_poly());
    EXPECT_LT(seconds_since(t0), 1.0) << r.name;
    EXPECT_TRUE(b.bound_exponent.approx_equal(parse_poly(r.bound), 1e-9)) << r.name << " " << b.exp_form();
  }
}

TEST(Synthesize, NoBoundThrows) {
  // kappa below the expected runtime admits no template.
  BenchmarkSpec spec = load_benchmark(corpus_config("quickselect"));
  EXPECT_THROW(synthesize(spec.load(), parse_poly("ln(n)"), parse_poly("ln(n)")), NoBoundFound);
}

TEST(Synthesize, ThreadCountDoesNotChangeResult) {
  BenchmarkSpec spec = load_benchmark(corpus_config("l1diameter"));
  SynthOptions one, three;
  three.threads = 3;
  SynthResult a = synthesize_report(spec.load(), spec.kappa_poly(), spec.ep_poly(), one);
  SynthResult b = synthesize_report(spec.load(), spec.kappa_poly(), spec.ep_poly(), three);
  ASSERT_TRUE(a.bound && b.bound);
  EXPECT_EQ(a.bound->tpl, b.bound->tpl);
  EXPECT_EQ(a.bound->c_f, b.bound->c_f);
  EXPECT_EQ(a.bound->c_t, b.bound->c_t);
  auto ja = nlohmann::json::parse(a.to_json());
  EXPECT_EQ(ja["templates_total"], a.templates_total);
}

// Properties of every corpus synthesis.
class CorpusSynthesis : public ::testing::TestWithParam<std::string> {};

TEST_P(CorpusSynthesis, WinnerProperties) {
  BenchmarkSpec spec = load_benchmark(corpus_config(GetParam()));
  CanonicalPrr c = spec.load();
  CandidateBound b = synthesize(c, spec.kappa_poly(), spec.ep_poly());

  // Lattice: larger f or smaller t stays valid.
  EXPECT_TRUE(check_cond(c, b.tpl, 2 * b.c_f, b.c_t, 8).accepted);
  EXPECT_TRUE(check_cond(c, b.tpl, 4 * b.c_f, b.c_t, 8).accepted);
  EXPECT_TRUE(check_cond(c, b.tpl, b.c_f, b.c_t / 2, 8).accepted);

  // The bound decays in alpha at every fixed n.
  for (double n : {10.0, 100.0, 1000.0}) {
    Poly at_n = substitute(b.bound_exponent, Sym::N, Poly(n));
    LimitValue l = limit_at_infinity(at_n, Sym::Alpha);
    EXPECT_TRUE(l.kind == LimitValue::Kind::MinusInfinity || (l.is_finite() && l.value <= 0))
        << GetParam() << " " << b.exp_form();
  }

  // The accepted canonical constraint holds numerically on a grid.
  CanonicalConstraint q = strengthen(c, b.f_bar, b.t_bar, 8);
  DecideReport r = decide(q);
  ASSERT_TRUE(r.verdict) << r.reason;
  for (int e = 6; e <= 20; e += 2)
    for (long n = c.cp; n <= std::min<long>(r.T_n + 1000, 3000); n += (n < 100 ? 1 : 23))
      ASSERT_LE(q.eval(std::ldexp(1.0, e), n), 1 + 1e-9) << GetParam() << " alpha=2^" << e << " n=" << n;
}

INSTANTIATE_TEST_SUITE_P(All, CorpusSynthesis, ::testing::ValuesIn(corpus_names()));
