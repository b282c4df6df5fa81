/* SPDX-License-Identifier: Apache-2.0 */
#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "corpus.hpp"
#include "json.hpp"
#include "prrtail/canonical.hpp"
#include "prrtail/simulator.hpp"

using namespace prrtail;
using prrtail::testing::corpus_names;
using prrtail::testing::corpus_path;

namespace {

CanonicalPrr canon(const std::string& name) { return to_canonical(parse_lrec_file(corpus_path(name))); }

double total_prob(const CanonicalPrr& c) {
  double s = 0;
  for (const Branch& b : c.branches) s += b.prob;
  return s;
}

}  // namespace

TEST(Canonical, QuickSelect) {
  CanonicalPrr c = canon("quickselect");
  EXPECT_EQ(c.cp, 2);
  ASSERT_EQ(c.branches.size(), 1u);
  const Branch& b = c.branches[0];
  EXPECT_EQ(b.prob, 1.0);
  EXPECT_EQ(b.pre_poly->str(), "n");
  EXPECT_EQ(b.dist.kind, Dist::Kind::MUniform);
  EXPECT_EQ(b.r, 1);
  EXPECT_EQ(print_expr(b.size1), "v");
  EXPECT_FALSE(b.size2.has_value());
}

TEST(Canonical, QuickSort) {
  CanonicalPrr c = canon("quicksort");
  ASSERT_EQ(c.branches.size(), 1u);
  const Branch& b = c.branches[0];
  EXPECT_EQ(b.pre_poly->str(), "n");
  EXPECT_EQ(b.dist.kind, Dist::Kind::Uniform);
  EXPECT_EQ(b.r, 2);
  EXPECT_EQ(print_expr(b.size1), "v");
  ASSERT_TRUE(b.size2.has_value());
  EXPECT_EQ(print_expr(*b.size2), "n - 1 - v");
}

TEST(Canonical, Channel) {
  CanonicalPrr c = canon("channel");
  ASSERT_EQ(c.branches.size(), 2u);
  EXPECT_NEAR(c.branches[0].prob, 1 / std::numbers::e, 1e-15);
  EXPECT_NEAR(c.branches[1].prob, 1 - 1 / std::numbers::e, 1e-15);
  for (const Branch& b : c.branches) {
    EXPECT_EQ(b.pre_poly->str(), "1");
    EXPECT_EQ(b.dist.kind, Dist::Kind::Discrete);
    ASSERT_EQ(b.dist.arms.size(), 1u);
    EXPECT_EQ(b.r, 1);
  }
  EXPECT_EQ(print_expr(c.branches[0].dist.arms[0].value), "n - 1");
  EXPECT_EQ(print_expr(c.branches[1].dist.arms[0].value), "n");
}

TEST(Canonical, NestedChoiceMultipliesAndDropsZeroArms) {
  PrrAst a = parse_lrec(
      "def p(n; 2) = { with { 0.5: { with { 0.25: { pre(1); invoke p(n-1); }; 0.75: { pre(2); invoke p(n-2); }; } };"
      " 0.5: { pre(3); invoke p(n-1); }; 0: { pre(4); invoke p(n-1); }; } }");
  CanonicalPrr c = to_canonical(a);
  ASSERT_EQ(c.branches.size(), 3u);
  EXPECT_DOUBLE_EQ(c.branches[0].prob, 0.125);
  EXPECT_DOUBLE_EQ(c.branches[1].prob, 0.375);
  EXPECT_DOUBLE_EQ(c.branches[2].prob, 0.5);
  EXPECT_EQ(c.warnings.size(), 1u);
}

TEST(Canonical, JsonDump) {
  auto j = nlohmann::json::parse(canonical_to_json(canon("mc4")));
  EXPECT_EQ(j["cp"], 2);
  ASSERT_EQ(j["branches"].size(), 2u);
  EXPECT_EQ(j["branches"][0]["r"], 2);
  EXPECT_EQ(j["branches"][1]["dist"]["kind"], "muniform");
}

TEST(Canonical, ProbabilityConservationCorpus) {
  for (const auto& name : corpus_names()) EXPECT_NEAR(total_prob(canon(name)), 1.0, 1e-9) << name;
}

TEST(Canonical, ProbabilityConservationRandomChoiceTrees) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    // Random nested choice trees with valid probabilities.
    std::function<std::string(int)> gen = [&](int depth) -> std::string {
      int arms = std::uniform_int_distribution<int>(1, 4)(rng);
      if (depth > 2 || std::uniform_int_distribution<int>(0, 2)(rng) == 0)
        return "pre(1); invoke p(n - 1);";
      std::vector<int> w(arms);
      int tot = 0;
      for (int& x : w) tot += (x = std::uniform_int_distribution<int>(1, 9)(rng));
      std::string s = "with {";
      for (int k = 0; k < arms; ++k)
        s += " " + std::to_string(w[k]) + "/" + std::to_string(tot) + ": { " + gen(depth + 1) + " };";
      return s + " }";
    };
    std::string src = "def p(n; 2) = { " + gen(0) + " }";
    PrrAst a = parse_lrec(src);
    ASSERT_TRUE(validate(a).empty()) << src;
    EXPECT_NEAR(total_prob(to_canonical(a)), 1.0, 1e-9) << src;
  }
}

// The AST and its flattened form generate the same cost distribution.
TEST(Canonical, SemanticEquivalenceKs) {
  for (const auto& name : corpus_names()) {
    PrrAst a = parse_lrec_file(corpus_path(name));
    CanonicalPrr c = to_canonical(a);
    for (long n : {5L, 20L}) {
      auto xs = sample_costs(a, n, 10000, 101);
      auto ys = sample_costs(c, n, 10000, 202);
      double p = ks_two_sample_pvalue(xs, ys);
      EXPECT_GT(p, 0.01) << name << " n=" << n;
    }
  }
}
