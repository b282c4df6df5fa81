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

#include "prrtail/lrec.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

namespace prrtail {

// ---------------------------------------------------------------------------
// Expressions

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind || ival != o.ival || kids.size() != o.kids.size()) return false;
  if (kind == Kind::Num && value != o.value) return false;
  for (size_t i = 0; i < kids.size(); ++i)
    if (!(kids[i] == o.kids[i])) return false;
  return true;
}

bool Command::operator==(const Command& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Sample: return var == o.var && dist == o.dist && body == o.body;
    case Kind::Direct: return body == o.body;
    case Kind::Choice: return arms == o.arms;
  }
  return false;
}

bool uses_v(const Expr& e) {
  if (e.kind == Expr::Kind::V) return true;
  for (const Expr& k : e.kids)
    if (uses_v(k)) return true;
  return false;
}

bool uses_n(const Expr& e) {
  if (e.kind == Expr::Kind::N) return true;
  for (const Expr& k : e.kids)
    if (uses_n(k)) return true;
  return false;
}

double eval_expr(const Expr& e, double n, double v) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Num: return e.value;
    case K::E: return std::numbers::e;
    case K::N: return n;
    case K::V: return v;
    case K::Ln: return std::log(eval_expr(e.kids[0], n, v));
    case K::Add: return eval_expr(e.kids[0], n, v) + eval_expr(e.kids[1], n, v);
    case K::Sub: return eval_expr(e.kids[0], n, v) - eval_expr(e.kids[1], n, v);
    case K::Mul: return eval_expr(e.kids[0], n, v) * eval_expr(e.kids[1], n, v);
    case K::Div: return eval_expr(e.kids[0], n, v) / eval_expr(e.kids[1], n, v);
    case K::Neg: return -eval_expr(e.kids[0], n, v);
    case K::Pow: return std::pow(eval_expr(e.kids[0], n, v), e.ival);
    case K::Floor: return std::floor(eval_expr(e.kids[0], n, v) / e.ival + 1e-12);
    case K::Ceil: return std::ceil(eval_expr(e.kids[0], n, v) / e.ival - 1e-12);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

int prec(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Add:
    case K::Sub: return 1;
    case K::Mul:
    case K::Div: return 2;
    case K::Neg: return 3;
    case K::Pow: return 4;
    default: return 5;
  }
}

// Shortest round-trip text in fixed notation; the lexer has no exponent syntax
// because `e` is a constant.
std::string num_text(double v) {
  char buf[400];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, r.ptr);
}

std::string wrap(const Expr& e, bool parens, const std::string& vname) {
  std::string s = print_expr(e, vname);
  return parens ? "(" + s + ")" : s;
}

}  // namespace

std::string print_expr(const Expr& e, const std::string& vname) {
  using K = Expr::Kind;
  auto bin = [&](const char* op) {
    int p = prec(e);
    return wrap(e.kids[0], prec(e.kids[0]) < p, vname) + " " + op + " " +
           wrap(e.kids[1], prec(e.kids[1]) <= p, vname);
  };
  switch (e.kind) {
    case K::Num: return num_text(e.value);
    case K::E: return "e";
    case K::N: return "n";
    case K::V: return vname;
    case K::Ln: return "ln(" + print_expr(e.kids[0], vname) + ")";
    case K::Add: return bin("+");
    case K::Sub: return bin("-");
    case K::Mul: return bin("*");
    case K::Div: return bin("/");
    case K::Neg: return "-" + wrap(e.kids[0], prec(e.kids[0]) < 3, vname);
    case K::Pow: return wrap(e.kids[0], prec(e.kids[0]) < 5, vname) + "^" + std::to_string(e.ival);
    case K::Floor:
    case K::Ceil:
      return std::string(e.kind == K::Floor ? "floor(" : "ceil(") +
             wrap(e.kids[0], prec(e.kids[0]) <= 2, vname) + "/" + std::to_string(e.ival) + ")";
  }
  return "?";
}

Poly expr_to_poly(const Expr& e, Rounding r) {
  using K = Expr::Kind;
  auto flip = [](Rounding x) {
    return x == Rounding::Upper ? Rounding::Lower : x == Rounding::Lower ? Rounding::Upper : x;
  };
  switch (e.kind) {
    case K::Num: return Poly(e.value);
    case K::E: return Poly(std::numbers::e);
    case K::N: return Poly::var(Sym::N);
    case K::V: return Poly::var(Sym::V);
    case K::Ln: {
      Poly arg = expr_to_poly(e.kids[0], Rounding::Exact);
      return log_of_monomial(arg);
    }
    case K::Add: return expr_to_poly(e.kids[0], r) + expr_to_poly(e.kids[1], r);
    case K::Sub: return expr_to_poly(e.kids[0], r) - expr_to_poly(e.kids[1], flip(r));
    case K::Neg: return -expr_to_poly(e.kids[0], flip(r));
    case K::Mul: {
      const Expr &a = e.kids[0], &b = e.kids[1];
      if (is_constant(a) || is_constant(b)) {
        const Expr& c = is_constant(a) ? a : b;
        const Expr& x = is_constant(a) ? b : a;
        double cv = eval_expr(c, 0);
        return expr_to_poly(x, cv < 0 ? flip(r) : r).scaled(cv);
      }
      return expr_to_poly(a, Rounding::Exact) * expr_to_poly(b, Rounding::Exact);
    }
    case K::Div: {
      Poly d = expr_to_poly(e.kids[1], Rounding::Exact);
      if (!d.is_monomial()) throw SymPolyError(SymPolyError::Kind::NonMonomialLogSubstitution,
                                               "division by non-monomial " + d.str());
      Poly inv = d.pow(-1);
      bool neg = d.terms()[0].coeff < 0;
      if (inv.is_constant()) return expr_to_poly(e.kids[0], neg ? flip(r) : r) * inv;
      return expr_to_poly(e.kids[0], Rounding::Exact) * inv;
    }
    case K::Pow: {
      Rounding inner = Rounding::Exact;
      return expr_to_poly(e.kids[0], inner).pow(e.ival);
    }
    case K::Floor:
    case K::Ceil: {
      if (r == Rounding::Exact)
        throw SymPolyError(SymPolyError::Kind::NonMonomialLogSubstitution,
                           "floor/ceil has no exact pseudo-polynomial form");
      Poly x = expr_to_poly(e.kids[0], r).scaled(1.0 / e.ival);
      double slack = static_cast<double>(e.ival - 1) / e.ival;
      bool floor = e.kind == K::Floor;
      if (r == Rounding::Upper) return floor ? x : x + slack;
      return floor ? x - slack : x;
    }
  }
  return Poly();
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

struct Token {
  enum class T { Ident, Int, Decimal, Sym, End };
  T type = T::End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      unsigned char c = static_cast<unsigned char>(s_[pos_]);
      if (std::isalpha(c) || c == '_') {
        t.type = Token::T::Ident;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
          t.text += advance();
      } else if (std::isdigit(c)) {
        t.type = Token::T::Int;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
          t.text += advance();
        if (pos_ + 1 < s_.size() && s_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
          t.type = Token::T::Decimal;
          t.text += advance();
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            t.text += advance();
        }
      } else if (c == '<' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '-') {
        t.type = Token::T::Sym;
        t.text = "<-";
        advance();
        advance();
      } else if (std::string_view("(){}[];:,+-*/^=").find(static_cast<char>(c)) !=
                 std::string_view::npos) {
        t.type = Token::T::Sym;
        t.text = std::string(1, advance());
      } else {
        throw LrecError(LrecError::Kind::SyntaxError, line_, col_, "token",
                        "line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                            ": unexpected character");
      }
      out.push_back(t);
    }
  }

 private:
  char advance() {
    char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_ws() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
      if (pos_ < s_.size() && s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
        continue;
      }
      return;
    }
  }
  std::string_view s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  PrrAst program() {
    PrrAst ast;
    expect_word("def");
    ast.proc = ident("procedure name");
    proc_ = ast.proc;
    expect("(");
    expect_word("n");
    expect(";");
    const Token& cp = peek();
    if (cp.type != Token::T::Int) error("positive integer threshold");
    ast.cp = std::stoi(cp.text);
    if (ast.cp < 1) error("positive integer threshold");
    ++pos_;
    expect(")");
    expect("=");
    expect("{");
    ast.body = command();
    expect("}");
    if (is_word("def"))
      throw LrecError(LrecError::Kind::MultipleProcedures, peek().line, peek().col, "end of input",
                      where() + ": only one procedure per program is supported");
    if (peek().type != Token::T::End) error("end of input");
    return ast;
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  std::string where() const {
    return "line " + std::to_string(peek().line) + ", col " + std::to_string(peek().col);
  }
  [[noreturn]] void error(const std::string& expected) {
    std::string got = peek().type == Token::T::End ? "end of input" : "'" + peek().text + "'";
    throw LrecError(LrecError::Kind::SyntaxError, peek().line, peek().col, expected,
                    where() + ": expected " + expected + ", got " + got);
  }
  bool is(const char* s) const { return peek().type == Token::T::Sym && peek().text == s; }
  bool is_word(const char* s) const { return peek().type == Token::T::Ident && peek().text == s; }
  void expect(const char* s) {
    if (!is(s)) error(std::string("'") + s + "'");
    ++pos_;
  }
  void expect_word(const char* s) {
    if (!is_word(s)) error(std::string("'") + s + "'");
    ++pos_;
  }
  bool accept(const char* s) {
    if (is(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string ident(const char* what) {
    if (peek().type != Token::T::Ident) error(what);
    return toks_[pos_++].text;
  }

  Command command() {
    Command c;
    if (is_word("sample")) {
      ++pos_;
      c.kind = Command::Kind::Sample;
      c.var = ident("variable name");
      if (c.var == "n" || c.var == proc_ || is_keyword(c.var)) {
        --pos_;
        error("fresh variable name");
      }
      expect("<-");
      c.dist = dist();
      expect_word("in");
      expect("{");
      var_ = c.var;
      c.body = body();
      var_.clear();
      expect("}");
    } else if (is_word("with")) {
      ++pos_;
      c.kind = Command::Kind::Choice;
      expect("{");
      do {
        ChoiceArm arm;
        arm.prob = prob();
        expect(":");
        expect("{");
        arm.cmd = command();
        expect("}");
        expect(";");
        c.arms.push_back(std::move(arm));
      } while (!is("}"));
      expect("}");
    } else if (is_word("pre")) {
      c.kind = Command::Kind::Direct;
      c.body = body();
    } else {
      error("'sample', 'with' or 'pre'");
    }
    return c;
  }

  static bool is_keyword(const std::string& s) {
    for (const char* k : {"def", "sample", "in", "pre", "invoke", "with", "uniform", "muniform",
                          "discrete", "puniform", "floor", "ceil", "ln", "e"})
      if (s == k) return true;
    return false;
  }

  Dist dist() {
    Dist d;
    std::string name = ident("distribution");
    if (name == "uniform" || name == "muniform") {
      d.kind = name == "uniform" ? Dist::Kind::Uniform : Dist::Kind::MUniform;
      expect("(");
      expect_word("n");
      expect(")");
    } else if (name == "discrete") {
      d.kind = Dist::Kind::Discrete;
      expect("{");
      do {
        DiscreteArm a;
        a.prob = prob();
        expect(":");
        a.value = expr();
        if (uses_v(a.value)) error("value free of the sampled variable");
        expect(",");
        d.arms.push_back(std::move(a));
      } while (!is("}"));
      expect("}");
    } else if (name == "puniform") {
      d.kind = Dist::Kind::PUniform;
      expect("{");
      do {
        Piece p;
        expect("[");
        p.lo = expr();
        expect(",");
        p.hi = expr();
        expect("]");
        if (uses_v(p.lo) || uses_v(p.hi)) error("range free of the sampled variable");
        expect(":");
        p.weight = prob();
        expect(",");
        d.pieces.push_back(std::move(p));
      } while (!is("}"));
      expect("}");
    } else {
      --pos_;
      error("'uniform', 'muniform', 'discrete' or 'puniform'");
    }
    return d;
  }

  RecBody body() {
    RecBody b;
    expect_word("pre");
    expect("(");
    b.pre = expr();
    expect(")");
    expect(";");
    expect_word("invoke");
    b.calls.push_back(call());
    if (accept(";")) {
      if (peek().type == Token::T::Ident && peek().text == proc_) {
        b.calls.push_back(call());
        expect(";");
      }
    } else {
      error("';'");
    }
    return b;
  }

  Expr call() {
    if (peek().type != Token::T::Ident || peek().text != proc_) error("'" + proc_ + "'");
    ++pos_;
    expect("(");
    Expr e = expr();
    expect(")");
    return e;
  }

  Expr prob() {
    Token at = peek();
    Expr e = expr();
    if (!is_constant(e))
      throw LrecError(LrecError::Kind::SyntaxError, at.line, at.col, "constant probability",
                      "line " + std::to_string(at.line) + ", col " + std::to_string(at.col) +
                          ": expected constant probability");
    return e;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept("+"))
        e = Expr::binary(Expr::Kind::Add, std::move(e), term());
      else if (accept("-"))
        e = Expr::binary(Expr::Kind::Sub, std::move(e), term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept("*"))
        e = Expr::binary(Expr::Kind::Mul, std::move(e), unary());
      else if (accept("/"))
        e = Expr::binary(Expr::Kind::Div, std::move(e), unary());
      else
        return e;
    }
  }

  Expr unary() {
    if (accept("-")) return Expr::unary(Expr::Kind::Neg, unary());
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept("^")) {
      bool paren = accept("(");
      bool neg = accept("-");
      if (peek().type != Token::T::Int) error("integer exponent");
      int k = std::stoi(toks_[pos_++].text);
      if (paren) expect(")");
      return Expr::unary(Expr::Kind::Pow, std::move(base), neg ? -k : k);
    }
    return base;
  }

  Expr atom() {
    const Token& t = peek();
    if (t.type == Token::T::Int || t.type == Token::T::Decimal) {
      ++pos_;
      return Expr::num(std::stod(t.text));
    }
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.type != Token::T::Ident) error("expression");
    std::string id = t.text;
    if (id == "n") {
      ++pos_;
      return Expr::var_n();
    }
    if (id == "e") {
      ++pos_;
      return Expr::euler();
    }
    if (id == "ln") {
      ++pos_;
      expect("(");
      Expr arg = atom_var();
      expect(")");
      return Expr::unary(Expr::Kind::Ln, std::move(arg));
    }
    if (id == "floor" || id == "ceil") {
      ++pos_;
      expect("(");
      Expr inner = expr();
      if (inner.kind != Expr::Kind::Div || inner.kids[1].kind != Expr::Kind::Num ||
          inner.kids[1].value != std::floor(inner.kids[1].value) || inner.kids[1].value < 1)
        error("expr '/' positive integer inside " + id);
      int b = static_cast<int>(inner.kids[1].value);
      expect(")");
      return Expr::unary(id == "floor" ? Expr::Kind::Floor : Expr::Kind::Ceil,
                         std::move(inner.kids[0]), b);
    }
    if (!var_.empty() && id == var_) {
      ++pos_;
      return Expr::var_v();
    }
    if (is_keyword(id)) error("expression");
    throw LrecError(LrecError::Kind::UnboundVariable, t.line, t.col, "bound variable",
                    where() + ": unbound variable '" + id + "'");
  }

  Expr atom_var() {
    const Token& t = peek();
    if (t.type == Token::T::Ident && t.text == "n") {
      ++pos_;
      return Expr::var_n();
    }
    if (t.type == Token::T::Ident && !var_.empty() && t.text == var_) {
      ++pos_;
      return Expr::var_v();
    }
    if (t.type == Token::T::Ident && !is_keyword(t.text))
      throw LrecError(LrecError::Kind::UnboundVariable, t.line, t.col, "bound variable",
                      where() + ": unbound variable '" + t.text + "'");
    error("'n' or the sampled variable");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::string proc_;
  std::string var_;
};

}  // namespace

PrrAst parse_lrec(std::string_view source) {
  Lexer lex(source);
  Parser p(lex.run());
  return p.program();
}

PrrAst parse_lrec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lrec(ss.str());
}

// ---------------------------------------------------------------------------
// Printer

namespace {

void print_body(std::ostringstream& os, const RecBody& b, const std::string& proc,
                const std::string& var, const std::string& ind) {
  os << ind << "pre(" << print_expr(b.pre, var) << ");\n";
  os << ind << "invoke " << proc << "(" << print_expr(b.calls[0], var) << ")";
  for (size_t i = 1; i < b.calls.size(); ++i) os << "; " << proc << "(" << print_expr(b.calls[i], var) << ")";
  os << ";\n";
}

void print_cmd(std::ostringstream& os, const Command& c, const std::string& proc,
               const std::string& ind) {
  switch (c.kind) {
    case Command::Kind::Direct: print_body(os, c.body, proc, "v", ind); break;
    case Command::Kind::Sample: {
      os << ind << "sample " << c.var << " <- ";
      switch (c.dist.kind) {
        case Dist::Kind::Uniform: os << "uniform(n)"; break;
        case Dist::Kind::MUniform: os << "muniform(n)"; break;
        case Dist::Kind::Discrete:
          os << "discrete{";
          for (const DiscreteArm& a : c.dist.arms)
            os << print_expr(a.prob) << ": " << print_expr(a.value) << ", ";
          os << "}";
          break;
        case Dist::Kind::PUniform:
          os << "puniform{";
          for (const Piece& p : c.dist.pieces)
            os << "[" << print_expr(p.lo) << ", " << print_expr(p.hi) << "]: " << print_expr(p.weight)
               << ", ";
          os << "}";
          break;
      }
      os << " in {\n";
      print_body(os, c.body, proc, c.var, ind + "  ");
      os << ind << "}\n";
      break;
    }
    case Command::Kind::Choice:
      os << ind << "with {\n";
      for (const ChoiceArm& a : c.arms) {
        os << ind << "  " << print_expr(a.prob) << ": {\n";
        print_cmd(os, a.cmd, proc, ind + "    ");
        os << ind << "  };\n";
      }
      os << ind << "}\n";
      break;
  }
}

}  // namespace

std::string print_lrec(const PrrAst& ast) {
  std::ostringstream os;
  os << "def " << ast.proc << "(n; " << ast.cp << ") = {\n";
  print_cmd(os, ast.body, ast.proc, "  ");
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Validation

const char* violation_name(Violation::Kind k) {
  using K = Violation::Kind;
  switch (k) {
    case K::ProbSumViolation: return "ProbSumViolation";
    case K::ProbRangeViolation: return "ProbRangeViolation";
    case K::NonConstantProbability: return "NonConstantProbability";
    case K::SizeRangeViolation: return "SizeRangeViolation";
    case K::PreCostUsesV: return "PreCostUsesV";
    case K::CallShapeViolation: return "CallShapeViolation";
    case K::PieceViolation: return "PieceViolation";
  }
  return "?";
}

namespace {

constexpr double kProbTol = 1e-9;

enum class Verdict { Holds, Fails, Unknown };

// Decides a(n) <= b(n) for all integers n >= cp, where a, b are v-free.
Verdict always_le(const Expr& a, const Expr& b, int cp) {
  std::int64_t t = kInfiniteLb;
  try {
    Poly d = expr_to_poly(a, Rounding::Upper) - expr_to_poly(b, Rounding::Lower);
    t = negative_lb(d, cp);
  } catch (const SymPolyError&) {
    t = kInfiniteLb;
  }
  std::int64_t scan_to = t == kInfiniteLb ? cp + 10000 : std::min<std::int64_t>(t, cp + 1000000);
  for (std::int64_t n = cp; n < scan_to; ++n) {
    double x = static_cast<double>(n);
    if (eval_expr(a, x) > eval_expr(b, x) + 1e-9) return Verdict::Fails;
  }
  return t == kInfiniteLb ? Verdict::Unknown : Verdict::Holds;
}

// size = coef * v + rest with coef in {-1, 0, 1}.
std::optional<std::pair<int, Expr>> split_v(const Expr& e) {
  using K = Expr::Kind;
  if (!uses_v(e)) return std::make_pair(0, e);
  if (e.kind == K::V) return std::make_pair(1, Expr::num(0));
  if ((e.kind == K::Add || e.kind == K::Sub) && e.kids[1].kind == K::V && !uses_v(e.kids[0]))
    return std::make_pair(e.kind == K::Add ? 1 : -1, e.kids[0]);
  if (e.kind == K::Add && e.kids[0].kind == K::V && !uses_v(e.kids[1]))
    return std::make_pair(1, e.kids[1]);
  if (e.kind == K::Sub && e.kids[0].kind == K::V && !uses_v(e.kids[1]))
    return std::make_pair(1, Expr::unary(K::Neg, e.kids[1]));
  return std::nullopt;
}

Expr size_at(int coef, const Expr& rest, const Expr& v) {
  using K = Expr::Kind;
  if (coef == 0) return rest;
  return Expr::binary(coef > 0 ? K::Add : K::Sub, rest, v);
}

class Validator {
 public:
  explicit Validator(const PrrAst& ast) : ast_(ast) {}

  std::vector<Violation> run() {
    check_cmd(ast_.body);
    return out_;
  }

 private:
  void add(Violation::Kind k, std::string detail, double value = 0.0) {
    out_.push_back(Violation{k, value, std::move(detail)});
  }

  void check_probs(const std::vector<const Expr*>& probs, const char* what) {
    double sum = 0;
    for (const Expr* p : probs) {
      if (!is_constant(*p)) {
        add(Violation::Kind::NonConstantProbability, what);
        return;
      }
      double x = eval_expr(*p, 0);
      if (x < -kProbTol || x > 1 + kProbTol)
        add(Violation::Kind::ProbRangeViolation, std::string(what) + " probability " + print_expr(*p), x);
      sum += x;
    }
    if (std::abs(sum - 1.0) > kProbTol)
      add(Violation::Kind::ProbSumViolation, std::string(what) + " probabilities sum to " + format_coeff(sum),
          sum);
  }

  // Sizes below c_p (negative ones included) end the recursion, so only the
  // upper end of [0, n] constrains a passed size.
  void check_range(const Expr& s, const std::string& what) {
    Expr n = Expr::var_n();
    if (always_le(s, n, ast_.cp) == Verdict::Fails)
      add(Violation::Kind::SizeRangeViolation, what + " size " + print_expr(s) + " exceeds n");
  }

  // Extreme values of the sampled variable as v-free expressions.
  std::vector<Expr> extremes(const Command& c) {
    using K = Expr::Kind;
    std::vector<Expr> xs;
    switch (c.kind) {
      case Command::Kind::Direct: break;
      case Command::Kind::Choice: break;
      case Command::Kind::Sample:
        switch (c.dist.kind) {
          case Dist::Kind::Uniform:
          case Dist::Kind::MUniform:
            xs.push_back(Expr::num(0));
            xs.push_back(Expr::binary(K::Sub, Expr::var_n(), Expr::num(1)));
            break;
          case Dist::Kind::Discrete:
            for (const DiscreteArm& a : c.dist.arms) xs.push_back(a.value);
            break;
          case Dist::Kind::PUniform:
            for (const Piece& p : c.dist.pieces) {
              xs.push_back(p.lo);
              xs.push_back(p.hi);
            }
            break;
        }
    }
    return xs;
  }

  void check_body(const Command& c) {
    const RecBody& b = c.body;
    if (uses_v(b.pre)) add(Violation::Kind::PreCostUsesV, "pre(" + print_expr(b.pre, c.var) + ")");
    if (b.calls.empty() || b.calls.size() > 2) {
      add(Violation::Kind::CallShapeViolation, "expected one or two calls");
      return;
    }
    std::vector<Expr> xs = extremes(c);
    for (size_t i = 0; i < b.calls.size(); ++i) {
      auto split = split_v(b.calls[i]);
      if (!split) {
        add(Violation::Kind::CallShapeViolation, "call size " + print_expr(b.calls[i], c.var) +
                                                     " is not of the form v, size - v or v-free");
        continue;
      }
      if (split->first == 0) {
        check_range(split->second, "call");
        continue;
      }
      for (const Expr& x : xs) check_range(size_at(split->first, split->second, x), "call");
    }
    if (b.calls.size() == 2) {
      auto s1 = split_v(b.calls[0]), s2 = split_v(b.calls[1]);
      if (s1 && s2 && !(s1->first == 1 && s2->first == -1 && s1->second == Expr::num(0)))
        add(Violation::Kind::CallShapeViolation, "two calls must be p(v); p(size - v)");
    }
  }

  void check_cmd(const Command& c) {
    switch (c.kind) {
      case Command::Kind::Direct:
        check_body(c);
        break;
      case Command::Kind::Choice: {
        std::vector<const Expr*> ps;
        for (const ChoiceArm& a : c.arms) ps.push_back(&a.prob);
        check_probs(ps, "choice");
        for (const ChoiceArm& a : c.arms) check_cmd(a.cmd);
        break;
      }
      case Command::Kind::Sample: {
        if (c.dist.kind == Dist::Kind::Discrete) {
          std::vector<const Expr*> ps;
          for (const DiscreteArm& a : c.dist.arms) ps.push_back(&a.prob);
          check_probs(ps, "discrete");
        } else if (c.dist.kind == Dist::Kind::PUniform) {
          std::vector<const Expr*> ps;
          for (const Piece& p : c.dist.pieces) ps.push_back(&p.weight);
          check_probs(ps, "puniform");
          check_pieces(c.dist.pieces);
        }
        check_body(c);
        break;
      }
    }
  }

  void check_pieces(const std::vector<Piece>& pieces) {
    using K = Expr::Kind;
    Expr zero = Expr::num(0);
    Expr top = Expr::binary(K::Sub, Expr::var_n(), Expr::num(1));
    for (size_t i = 0; i < pieces.size(); ++i) {
      const Piece& p = pieces[i];
      if (always_le(zero, p.lo, ast_.cp) == Verdict::Fails ||
          always_le(p.hi, top, ast_.cp) == Verdict::Fails ||
          always_le(p.lo, p.hi, ast_.cp) == Verdict::Fails)
        add(Violation::Kind::PieceViolation,
            "piece [" + print_expr(p.lo) + ", " + print_expr(p.hi) + "] is empty or leaves [0, n-1]");
      if (i > 0) {
        Expr prev_end = Expr::binary(K::Add, pieces[i - 1].hi, Expr::num(1));
        if (always_le(prev_end, p.lo, ast_.cp) == Verdict::Fails)
          add(Violation::Kind::PieceViolation, "pieces overlap or are out of order");
      }
    }
  }

  const PrrAst& ast_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const PrrAst& ast) { return Validator(ast).run(); }

}  // namespace prrtail
