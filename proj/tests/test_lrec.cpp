/* SPDX-License-Identifier: Apache-2.0 */
#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <string>

#include "corpus.hpp"
#include "prrtail/lrec.hpp"

using namespace prrtail;

namespace {

const char* kQuickSelect =
    "def p(n; 2) = { sample v <- muniform(n) in { pre(n); invoke p(v); } }";

LrecError parse_error(const std::string& src) {
  try {
    (void)parse_lrec(src);
  } catch (const LrecError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error for: " << src;
  return LrecError(LrecError::Kind::SyntaxError, 0, 0, "", "");
}

bool has_violation(const std::vector<Violation>& vs, Violation::Kind k) {
  for (const Violation& v : vs)
    if (v.kind == k) return true;
  return false;
}

// Random AST generation for round-trip testing.
class AstGen {
 public:
  explicit AstGen(std::uint64_t seed) : rng_(seed) {}

  PrrAst program() {
    PrrAst a;
    a.proc = pick({"p", "q", "rec"});
    a.cp = uni(1, 5);
    a.body = command(0);
    return a;
  }

 private:
  int uni(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::string pick(std::initializer_list<const char*> xs) {
    auto it = xs.begin();
    std::advance(it, uni(0, static_cast<int>(xs.size()) - 1));
    return *it;
  }

  Expr number() {
    switch (uni(0, 2)) {
      case 0: return Expr::num(uni(0, 20));
      case 1: return Expr::num(uni(1, 99) / 100.0);
      default: return Expr::num(std::uniform_real_distribution<double>(0, 5)(rng_));
    }
  }

  Expr expr(int depth, bool allow_v) {
    using K = Expr::Kind;
    if (depth > 3 || uni(0, 3) == 0) {
      switch (uni(0, allow_v ? 5 : 4)) {
        case 0: return number();
        case 1: return Expr::euler();
        case 2: return Expr::var_n();
        case 3: return Expr::unary(K::Ln, Expr::var_n());
        case 4: return number();
        default: return uni(0, 1) ? Expr::var_v() : Expr::unary(K::Ln, Expr::var_v());
      }
    }
    switch (uni(0, 7)) {
      case 0: return Expr::binary(K::Add, expr(depth + 1, allow_v), expr(depth + 1, allow_v));
      case 1: return Expr::binary(K::Sub, expr(depth + 1, allow_v), expr(depth + 1, allow_v));
      case 2: return Expr::binary(K::Mul, expr(depth + 1, allow_v), expr(depth + 1, allow_v));
      case 3: return Expr::binary(K::Div, expr(depth + 1, allow_v), expr(depth + 1, allow_v));
      case 4: return Expr::unary(K::Neg, expr(depth + 1, allow_v));
      case 5: return Expr::unary(K::Pow, expr(depth + 1, allow_v), uni(-3, 3));
      case 6: return Expr::unary(K::Floor, expr(depth + 1, allow_v), uni(1, 4));
      default: return Expr::unary(K::Ceil, expr(depth + 1, allow_v), uni(1, 4));
    }
  }

  Expr const_expr() {
    using K = Expr::Kind;
    switch (uni(0, 3)) {
      case 0: return number();
      case 1: return Expr::binary(K::Div, Expr::num(1), Expr::euler());
      case 2: return Expr::binary(K::Sub, Expr::num(1), Expr::binary(K::Div, Expr::num(1), Expr::euler()));
      default: return Expr::binary(K::Div, number(), Expr::num(uni(1, 9)));
    }
  }

  RecBody body(bool allow_v) {
    RecBody b;
    b.pre = expr(0, allow_v);
    int calls = uni(1, 2);
    for (int i = 0; i < calls; ++i) b.calls.push_back(expr(1, allow_v));
    return b;
  }

  Command command(int depth) {
    Command c;
    int k = depth >= 2 ? uni(0, 1) : uni(0, 2);
    if (k == 0) {
      c.kind = Command::Kind::Direct;
      c.body = body(false);
    } else if (k == 1) {
      c.kind = Command::Kind::Sample;
      c.var = pick({"v", "x", "piv"});
      switch (uni(0, 3)) {
        case 0: c.dist.kind = Dist::Kind::Uniform; break;
        case 1: c.dist.kind = Dist::Kind::MUniform; break;
        case 2:
          c.dist.kind = Dist::Kind::Discrete;
          for (int i = uni(1, 3); i > 0; --i) c.dist.arms.push_back({const_expr(), expr(1, false)});
          break;
        default:
          c.dist.kind = Dist::Kind::PUniform;
          for (int i = uni(1, 3); i > 0; --i)
            c.dist.pieces.push_back({expr(1, false), expr(1, false), const_expr()});
          break;
      }
      c.body = body(true);
    } else {
      c.kind = Command::Kind::Choice;
      for (int i = uni(1, 3); i > 0; --i) c.arms.push_back({const_expr(), command(depth + 1)});
    }
    return c;
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST(LrecParse, QuickSelect) {
  PrrAst a = parse_lrec(kQuickSelect);
  EXPECT_EQ(a.cp, 2);
  EXPECT_EQ(a.proc, "p");
  ASSERT_EQ(a.body.kind, Command::Kind::Sample);
  EXPECT_EQ(a.body.dist.kind, Dist::Kind::MUniform);
  ASSERT_EQ(a.body.body.calls.size(), 1u);
  EXPECT_EQ(a.body.body.calls[0].kind, Expr::Kind::V);
  EXPECT_EQ(a.body.body.pre.kind, Expr::Kind::N);
}

TEST(LrecParse, QuickSortDivideAndConquer) {
  PrrAst a = parse_lrec(
      "def p(n; 2) = { sample v <- uniform(n) in { pre(n); invoke p(v); p(n-1-v); } }");
  ASSERT_EQ(a.body.body.calls.size(), 2u);
  const Expr& s2 = a.body.body.calls[1];
  ASSERT_EQ(s2.kind, Expr::Kind::Sub);
  EXPECT_EQ(s2.kids[1].kind, Expr::Kind::V);
  EXPECT_EQ(eval_expr(s2.kids[0], 10), 9.0);  // size base floor(n/1) - 1
}

TEST(LrecParse, ChannelChoice) {
  PrrAst a = parse_lrec(
      "def p(n; 2) = { with { 1/e: { pre(1); invoke p(n-1); }; 1-1/e: { pre(1); invoke p(n); }; } }");
  ASSERT_EQ(a.body.kind, Command::Kind::Choice);
  ASSERT_EQ(a.body.arms.size(), 2u);
  EXPECT_NEAR(eval_expr(a.body.arms[0].prob, 0), 1 / std::numbers::e, 1e-15);
  EXPECT_NEAR(eval_expr(a.body.arms[1].prob, 0), 1 - 1 / std::numbers::e, 1e-15);
}

TEST(LrecParse, DistributionsAndExpressions) {
  PrrAst a = parse_lrec(
      "def p(n; 3) = { sample w <- puniform{ [0, floor(n/2) - 1]: 1/3, [floor(n/2), n - 1]: 2/3, } in {"
      " pre(2*n^2 + ln(n) - 0.5); invoke p(w); } }");
  EXPECT_EQ(a.body.var, "w");
  ASSERT_EQ(a.body.dist.pieces.size(), 2u);
  EXPECT_EQ(eval_expr(a.body.dist.pieces[0].hi, 10), 4.0);
  EXPECT_NEAR(eval_expr(a.body.body.pre, 4), 32 + std::log(4.0) - 0.5, 1e-12);
  a = parse_lrec("def p(n; 2) = { sample v <- discrete{ 0.5: n - 1, 0.5: ceil(n/3), } in { pre(1); invoke p(v); } }");
  ASSERT_EQ(a.body.dist.arms.size(), 2u);
  EXPECT_EQ(eval_expr(a.body.dist.arms[1].value, 10), 4.0);
}

TEST(LrecParse, Errors) {
  LrecError e = parse_error("def p(n; 2) = { sample v <- uniform(n) in { pre(n) invoke p(v); } }");
  EXPECT_EQ(e.kind(), LrecError::Kind::SyntaxError);
  EXPECT_EQ(e.line(), 1);
  EXPECT_EQ(e.expected(), "';'");
  e = parse_error("def p(n; 2) = {\n  sample v <- uniform(n) in {\n    pre(m);\n invoke p(v); } }");
  EXPECT_EQ(e.kind(), LrecError::Kind::UnboundVariable);
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.col(), 9);
  e = parse_error(std::string(kQuickSelect) + "\n" + kQuickSelect);
  EXPECT_EQ(e.kind(), LrecError::Kind::MultipleProcedures);
  EXPECT_EQ(e.line(), 2);
  e = parse_error("def p(n; 2) = { pre(1); invoke p(v); }");
  EXPECT_EQ(e.kind(), LrecError::Kind::UnboundVariable);
  e = parse_error("def p(n; 2) = { with { n: { pre(1); invoke p(n-1); }; } }");
  EXPECT_EQ(e.expected(), "constant probability");
  e = parse_error("def p(n; 0) = { pre(1); invoke p(n-1); }");
  EXPECT_EQ(e.kind(), LrecError::Kind::SyntaxError);
}

TEST(LrecValidate, Examples) {
  EXPECT_TRUE(validate(parse_lrec(kQuickSelect)).empty());
  auto vs = validate(parse_lrec(
      "def p(n; 2) = { with { 0.5: { pre(1); invoke p(n-1); }; 0.6: { pre(1); invoke p(n); }; } }"));
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].kind, Violation::Kind::ProbSumViolation);
  EXPECT_NEAR(vs[0].value, 1.1, 1e-12);
  vs = validate(parse_lrec(
      "def p(n; 2) = { sample v <- discrete{ 1: n + 1, } in { pre(1); invoke p(v); } }"));
  EXPECT_TRUE(has_violation(vs, Violation::Kind::SizeRangeViolation));
  vs = validate(parse_lrec("def p(n; 2) = { sample v <- uniform(n) in { pre(v); invoke p(v); } }"));
  EXPECT_TRUE(has_violation(vs, Violation::Kind::PreCostUsesV));
  vs = validate(parse_lrec("def p(n; 2) = { sample v <- uniform(n) in { pre(1); invoke p(2*v); } }"));
  EXPECT_TRUE(has_violation(vs, Violation::Kind::CallShapeViolation));
  vs = validate(parse_lrec("def p(n; 2) = { sample v <- uniform(n) in { pre(1); invoke p(n - v); } }"));
  EXPECT_TRUE(vs.empty());
  vs = validate(parse_lrec("def p(n; 2) = { sample v <- uniform(n) in { pre(1); invoke p(n + 1 - v); } }"));
  EXPECT_TRUE(has_violation(vs, Violation::Kind::SizeRangeViolation));
  vs = validate(parse_lrec(
      "def p(n; 4) = { sample v <- puniform{ [0, floor(n/2)]: 0.5, [floor(n/2), n-1]: 0.5, } in { pre(1); invoke p(v); } }"));
  EXPECT_TRUE(has_violation(vs, Violation::Kind::PieceViolation));
  vs = validate(parse_lrec(
      "def p(n; 4) = { sample v <- puniform{ [0, floor(n/2) - 1]: 0.5, [floor(n/2), n-1]: 0.5, } in { pre(1); invoke p(v); } }"));
  EXPECT_TRUE(vs.empty());
}

TEST(LrecCorpus, AllBenchmarksWellFormed) {
  for (const auto& name : prrtail::testing::corpus_names()) {
    PrrAst a = parse_lrec_file(prrtail::testing::corpus_path(name));
    auto vs = validate(a);
    EXPECT_TRUE(vs.empty()) << name << ": " << (vs.empty() ? "" : vs[0].detail);
  }
}

TEST(LrecRoundTrip, Corpus) {
  for (const auto& name : prrtail::testing::corpus_names()) {
    PrrAst a = parse_lrec_file(prrtail::testing::corpus_path(name));
    std::string printed = print_lrec(a);
    EXPECT_EQ(parse_lrec(printed), a) << name << "\n" << printed;
    EXPECT_EQ(print_lrec(parse_lrec(printed)), printed);
  }
}

TEST(LrecRoundTrip, RandomAsts) {
  AstGen gen(7);
  for (int i = 0; i < 1000; ++i) {
    PrrAst a = gen.program();
    std::string printed = print_lrec(a);
    PrrAst b;
    ASSERT_NO_THROW(b = parse_lrec(printed)) << printed;
    ASSERT_EQ(b, a) << printed;
  }
}

TEST(LrecFuzz, RandomBytesNeverCrash) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 200);
  const std::string alphabet = "def p(n;2)={}sample v<-uniform muniform discrete puniform in pre invoke with:;,[]+-*/^ln floor ceil e 0123456789.\n";
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  int parsed = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    int l = len(rng);
    bool structured = i % 2 == 0;
    for (int k = 0; k < l; ++k)
      s += structured ? alphabet[pick(rng)] : static_cast<char>(byte(rng));
    if (i % 10 == 0) {
      // Mutations of a valid program exercise deeper parser states.
      s = kQuickSelect;
      for (int k = 0; k < 3; ++k) s[std::uniform_int_distribution<size_t>(0, s.size() - 1)(rng)] =
                                      alphabet[pick(rng)];
    }
    try {
      (void)parse_lrec(s);
      ++parsed;
    } catch (const LrecError& e) {
      EXPECT_GE(e.line(), 1);
      EXPECT_GE(e.col(), 1);
    }
  }
  SUCCEED() << parsed << " inputs parsed";
}

TEST(LrecExpr, ToPolyRounding) {
  PrrAst a = parse_lrec("def p(n; 2) = { pre(floor(n/2) - ceil(n/3)); invoke p(n-1); }");
  const Expr& e = a.body.body.pre;
  Poly up = expr_to_poly(e, Rounding::Upper), lo = expr_to_poly(e, Rounding::Lower);
  for (int n = 2; n < 200; ++n) {
    Env env;
    env.n = n;
    EXPECT_LE(eval_expr(e, n), eval_numeric(up, env) + 1e-12);
    EXPECT_GE(eval_expr(e, n), eval_numeric(lo, env) - 1e-12);
  }
  EXPECT_THROW((void)expr_to_poly(e, Rounding::Exact), SymPolyError);
}
