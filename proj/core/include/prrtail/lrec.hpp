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

// The LRec language: concrete syntax, AST and well-formedness checks.
//
//   program := "def" ident "(" "n" ";" int ")" "=" "{" comm "}"
//   comm    := "sample" ident "<-" dist "in" "{" body "}"
//            | "with" "{" (prob ":" "{" comm "}" ";")+ "}"
//            | body
//   body    := "pre" "(" expr ")" ";" "invoke" call ";"
//   call    := p "(" expr ")" [ ";" p "(" expr ")" ]
//   dist    := "uniform(n)" | "muniform(n)"
//            | "discrete" "{" (prob ":" expr ",")+ "}"
//            | "puniform" "{" ("[" expr "," expr "]" ":" prob ",")+ "}"
//
// A bare body (no sample) is shorthand for sampling from discrete{1: size}.

#ifndef PRRTAIL_LREC_HPP_
#define PRRTAIL_LREC_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prrtail/sympoly.hpp"

namespace prrtail {

struct Expr {
  enum class Kind { Num, E, N, V, Ln, Add, Sub, Mul, Div, Neg, Pow, Floor, Ceil };
  Kind kind = Kind::Num;
  double value = 0.0;  // Num
  int ival = 0;        // Pow exponent, Floor/Ceil divisor
  std::vector<Expr> kids;

  static Expr num(double v) { return Expr{Kind::Num, v, 0, {}}; }
  static Expr var_n() { return Expr{Kind::N, 0, 0, {}}; }
  static Expr var_v() { return Expr{Kind::V, 0, 0, {}}; }
  static Expr euler() { return Expr{Kind::E, 0, 0, {}}; }
  static Expr unary(Kind k, Expr a, int ival = 0) { return Expr{k, 0, ival, {std::move(a)}}; }
  static Expr binary(Kind k, Expr a, Expr b) { return Expr{k, 0, 0, {std::move(a), std::move(b)}}; }

  bool operator==(const Expr& o) const;
};

bool uses_v(const Expr& e);
bool uses_n(const Expr& e);
inline bool is_constant(const Expr& e) { return !uses_v(e) && !uses_n(e); }
// NaN for an unbound v; floor/ceil are exact.
double eval_expr(const Expr& e, double n, double v = std::numeric_limits<double>::quiet_NaN());
std::string print_expr(const Expr& e, const std::string& vname = "v");

enum class Rounding { Exact, Upper, Lower };
// Pseudo-polynomial for `e`; floors and ceilings are replaced by the bound
// x/b (floor, upper) or x/b + (b-1)/b (ceil, upper) and the symmetric lower
// bounds, tracking sign. Exact mode rejects floors and ceilings.
Poly expr_to_poly(const Expr& e, Rounding r = Rounding::Exact);

struct DiscreteArm {
  Expr prob;
  Expr value;
  bool operator==(const DiscreteArm&) const = default;
};

struct Piece {
  Expr lo;
  Expr hi;
  Expr weight;
  bool operator==(const Piece&) const = default;
};

struct Dist {
  enum class Kind { Uniform, MUniform, Discrete, PUniform };
  Kind kind = Kind::Uniform;
  std::vector<DiscreteArm> arms;
  std::vector<Piece> pieces;
  bool operator==(const Dist&) const = default;
};

struct RecBody {
  Expr pre;
  std::vector<Expr> calls;  // one or two sizes
  bool operator==(const RecBody&) const = default;
};

struct ChoiceArm;

struct Command {
  enum class Kind { Sample, Choice, Direct };
  Kind kind = Kind::Direct;
  std::string var = "v";  // Sample
  Dist dist;              // Sample
  RecBody body;           // Sample, Direct
  std::vector<ChoiceArm> arms;  // Choice
  bool operator==(const Command&) const;
};

struct ChoiceArm {
  Expr prob;
  Command cmd;
  bool operator==(const ChoiceArm&) const = default;
};

struct PrrAst {
  std::string proc = "p";
  int cp = 1;
  Command body;
  bool operator==(const PrrAst&) const = default;
};

class LrecError : public std::runtime_error {
 public:
  enum class Kind { SyntaxError, UnboundVariable, MultipleProcedures };
  LrecError(Kind kind, int line, int col, std::string expected, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line), col_(col), expected_(std::move(expected)) {}
  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  Kind kind_;
  int line_, col_;
  std::string expected_;
};

PrrAst parse_lrec(std::string_view source);
PrrAst parse_lrec_file(const std::string& path);
std::string print_lrec(const PrrAst& ast);

struct Violation {
  enum class Kind {
    ProbSumViolation,
    ProbRangeViolation,
    NonConstantProbability,
    SizeRangeViolation,
    PreCostUsesV,
    CallShapeViolation,
    PieceViolation,
  };
  Kind kind;
  double value = 0.0;  // offending sum for ProbSumViolation
  std::string detail;
};
const char* violation_name(Violation::Kind k);

std::vector<Violation> validate(const PrrAst& ast);

}  // namespace prrtail

#endif  // PRRTAIL_LREC_HPP_
