/* SPDX-License-Identifier: Apache-2.0 */
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "corpus.hpp"
#include "prrtail/simulator.hpp"
#include "prrtail/theory.hpp"

using namespace prrtail;
using prrtail::testing::corpus_names;
using prrtail::testing::corpus_path;

namespace {

CanonicalPrr canon(const std::string& name) { return to_canonical(parse_lrec_file(corpus_path(name))); }

double eval_an(const Poly& p, double a, double n) {
  Env env;
  env.alpha = a;
  env.n = n;
  return eval_numeric(p, env);
}

}  // namespace

TEST(ExpectedRuntime, QuickSelectBelowFourN) {
  ExpectedRuntime ep = solve_expected_runtime(canon("quickselect"), 2000, parse_poly("4*n"));
  for (long n = 100; n <= 2000; ++n) {
    double r = ep.at(n) / n;
    EXPECT_GE(r, 3.0);
    EXPECT_LE(r, 4.0);
  }
  EXPECT_GT(ep.at(2000) / 2000, ep.at(100) / 100);
  EXPECT_EQ(ep.at(1), 0.0);
  EXPECT_EQ(ep.at(0), 0.0);
}

TEST(ExpectedRuntime, ChannelAtOneIsE) {
  ExpectedRuntime ep = solve_expected_runtime(canon("channel"), 5);
  EXPECT_EQ(ep.at(1), 0.0);  // c_p = 2
  // With threshold 2 the first nontrivial size is 2: x = 1 + (1 - 1/e) x.
  EXPECT_NEAR(ep.at(2), std::numbers::e, 1e-12);
  CanonicalPrr c1 = to_canonical(parse_lrec(
      "def p(n; 1) = { with { 1/e: { pre(1); invoke p(n - 1); }; 1-1/e: { pre(1); invoke p(n); }; } }"));
  ExpectedRuntime e1 = solve_expected_runtime(c1, 3);
  EXPECT_NEAR(e1.at(1), std::numbers::e, 1e-12);
  EmpiricalTail t = estimate_tail(c1, 1, 100000, 8);
  EXPECT_NEAR(t.mean(), std::numbers::e, 3 * t.std_error());
}

TEST(ExpectedRuntime, RdwalkAtOneIsTwo) {
  EXPECT_NEAR(solve_expected_runtime(canon("rdwalk"), 1).at(1), 2.0, 1e-12);
}

TEST(ExpectedRuntime, Divergent) {
  CanonicalPrr c = to_canonical(parse_lrec("def p(n; 2) = { pre(1); invoke p(n); }"));
  EXPECT_THROW(
      {
        try {
          solve_expected_runtime(c, 5);
        } catch (const TheoryError& e) {
          EXPECT_EQ(e.kind(), TheoryError::Kind::DivergentRecurrence);
          throw;
        }
      },
      TheoryError);
}

TEST(ExpectedRuntime, MonteCarloAgreesAcrossCorpus) {
  for (const auto& name : corpus_names()) {
    CanonicalPrr c = canon(name);
    ExpectedRuntime ep = solve_expected_runtime(c, 200);
    for (long n : {50L, 200L}) {
      EmpiricalTail t = estimate_tail(c, n, 100000, 1000 + n);
      EXPECT_NEAR(t.mean(), ep.at(n), 3 * t.std_error() + 1e-9) << name << " n=" << n;
    }
  }
}

TEST(A1, QuickSelect) {
  CanonicalPrr c = canon("quickselect");
  A1Constants m = estimate_a1_constants(c, solve_expected_runtime(c, 500), 10, 500);
  EXPECT_NEAR(m.m_lo, -1.0, 0.15);
  EXPECT_NEAR(m.m_hi, 1.0, 0.15);
}

// The exact DP gives min (1 - 2 ln 2) for QuickSort, attained near the middle
// pivot; -2 ln 2 is a valid but looser constant.
TEST(A1, QuickSortUpperConstant) {
  CanonicalPrr c = canon("quicksort");
  A1Constants m = estimate_a1_constants(c, solve_expected_runtime(c, 300), 10, 300);
  EXPECT_NEAR(m.m_hi, 1.0, 0.2);
  EXPECT_NEAR(m.m_lo, 1 - 2 * std::numbers::ln2, 0.2);
  EXPECT_GE(m.m_lo, -2 * std::numbers::ln2);
}

TEST(A1, DeterministicIsZero) {
  CanonicalPrr c = to_canonical(parse_lrec("def p(n; 1) = { pre(1); invoke p(n - 1); }"));
  A1Constants m = estimate_a1_constants(c, solve_expected_runtime(c, 50), 1, 50);
  EXPECT_NEAR(m.m_lo, 0.0, 1e-12);
  EXPECT_NEAR(m.m_hi, 0.0, 1e-12);
  EXPECT_THROW(estimate_a1_constants(c, solve_expected_runtime(c, 50), 60, 50), TheoryError);
}

TEST(A2, CorpusPreCostsNonDecreasing) {
  for (const auto& name : corpus_names()) EXPECT_TRUE(check_a2(canon(name), canon(name).cp, 1000)) << name;
}

TEST(CompBound, QuickSelect) {
  CompBound b = comp_tail_bound(parse_poly("4*n"), parse_poly("n"), -1, 1);
  EXPECT_TRUE(b.exponent.approx_equal(parse_poly("-2*(alpha - 2 + alpha^-1)"), 1e-12)) << b.exponent.str();
  EXPECT_TRUE(b.ratio.approx_equal(Poly(4), 1e-12));
  for (double a : {2.0, 5.0, 9.0})
    EXPECT_NEAR(std::exp(eval_an(b.exponent, a, 30)), std::exp(-2 * (a - 1) * (a - 1) / a), 1e-12);
  EXPECT_NEAR(b.f(3, 10), 1.5 * 40, 1e-12);
  EXPECT_NEAR(b.lambda(3), 8 * 0.5 / (2.25 * 4), 1e-12);
  EXPECT_NEAR(b.t(3, 10), b.lambda(3) / 10, 1e-12);
}

TEST(CompBound, QuickSortCoefficient) {
  CompBound b = comp_tail_bound(parse_poly("2*n*ln(n)"), parse_poly("n"), -2 * std::numbers::ln2, 1);
  // exponent = -c (alpha-1)^2/alpha ln n
  double c = -eval_an(b.exponent, 3, std::numbers::e) / (4.0 / 3);
  EXPECT_NEAR(c, 0.70, 0.01);
  EXPECT_NEAR(c, 4 / std::pow(1 + 2 * std::numbers::ln2, 2), 1e-12);
}

TEST(CompBound, NonMonomialPreCostIsBoundedAbove) {
  // 0.5 + 0.5 n <= 0.55 n from n = 10 on.
  CompBound b = comp_tail_bound(parse_poly("2.5*n"), parse_poly("0.5 + 0.5*n"), -1, 1);
  EXPECT_TRUE(b.es_bound.approx_equal(parse_poly("0.55*n"), 1e-9)) << b.es_bound.str();
  EXPECT_TRUE(b.ratio.approx_equal(Poly(2.5 / 0.55), 1e-9)) << b.ratio.str();
  CompBound neg = comp_tail_bound(parse_poly("n"), parse_poly("n - 1"), -1, 1);
  EXPECT_TRUE(neg.es_bound.approx_equal(parse_poly("n"), 1e-12)) << neg.es_bound.str();
  EXPECT_THROW(comp_tail_bound(parse_poly("n"), parse_poly("1 - n"), -1, 1), TheoryError);
}

TEST(CompBound, Degenerate) {
  EXPECT_THROW(comp_tail_bound(parse_poly("n"), parse_poly("1"), 1, 1), TheoryError);
}

TEST(CompBound, NeverAboveOneAndDominatesTail) {
  CanonicalPrr c = canon("quickselect");
  A1Constants m = estimate_a1_constants(c, solve_expected_runtime(c, 1000), c.cp, 1000);
  CompBound b = comp_tail_bound(parse_poly("4*n"), expected_pre_cost_poly(c), m.m_lo, m.m_hi);
  for (double a = 1; a < 50; a += 0.5) EXPECT_LE(eval_an(b.exponent, a, 100), 1e-12);
  BoundSpec spec{b.exponent, b.ep, std::nullopt, std::nullopt};
  ValidationReport r = validate_bound(c, spec, {2, 4, 8}, {64, 256}, 20000, 4);
  for (const ValidationRow& row : r.rows) EXPECT_LE(row.tail, row.bound + 3 * std::sqrt(row.bound / 20000) + 1e-12);
}
