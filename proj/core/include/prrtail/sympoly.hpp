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

// Pseudo-polynomials: finite sums of monomials
//   c * alpha^a * ln(alpha)^b * n^u * ln(n)^w * v^d * ln(v)^e
// with real coefficients and small integer exponents.

#ifndef PRRTAIL_SYMPOLY_HPP_
#define PRRTAIL_SYMPOLY_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prrtail {

enum class Sym : int { Alpha = 0, N = 1, V = 2 };

const char* sym_name(Sym s);

class SymPolyError : public std::runtime_error {
 public:
  enum class Kind {
    ExponentOverflow,
    NonMonomialLogSubstitution,
    UnboundSymbol,
    NonPositiveValue,
    NonFinite,
    ZeroPolynomial,
    MixedSymbols,
    ScanCapExceeded,
    Parse,
  };
  SymPolyError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr double kZeroEps = 1e-12;
inline constexpr int kMaxExponent = 64;

// Exponent vector layout: {alpha, ln alpha, n, ln n, v, ln v}.
using Exps = std::array<int, 6>;

struct Mono {
  double coeff = 0.0;
  Exps e{};

  int pow(Sym s) const { return e[2 * static_cast<int>(s)]; }
  int lnpow(Sym s) const { return e[2 * static_cast<int>(s) + 1]; }
  bool has(Sym s) const { return pow(s) != 0 || lnpow(s) != 0; }
  bool is_constant() const;
};

// Magnitude of s^p ln(s)^l, compared lexicographically on (p, l).
struct Magnitude {
  int pow = 0;
  int ln = 0;
  auto operator<=>(const Magnitude&) const = default;
};

inline Magnitude magnitude(const Mono& m, Sym s) {
  return {m.pow(s), m.lnpow(s)};
}

class Poly {
 public:
  Poly() = default;
  Poly(double c);  // NOLINT(google-explicit-constructor)

  static Poly var(Sym s);
  static Poly log(Sym s);
  static Poly monomial(double c, const Exps& e);
  static Poly monomial(const Mono& m) { return monomial(m.coeff, m.e); }
  // c * s^p * ln(s)^l
  static Poly power(double c, Sym s, int p, int l = 0);

  const std::vector<Mono>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  double constant_term() const;
  bool depends_on(Sym s) const;
  // True if no symbol other than `s` occurs.
  bool only_in(Sym s) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Poly& b) { return a *= b; }

  // Integer power; negative k is allowed only for monomials.
  Poly pow(int k) const;
  Poly scaled(double c) const;

  // Terms whose monomial satisfies `pred`.
  template <class Pred>
  Poly filter(Pred pred) const {
    Poly r;
    for (const Mono& m : terms_)
      if (pred(m)) r.terms_.push_back(m);
    return r;
  }

  // Structural equality with coefficient tolerance `tol` (relative).
  bool approx_equal(const Poly& o, double tol = 1e-9) const;
  bool operator==(const Poly& o) const { return approx_equal(o, 0.0); }

  std::string str() const;

 private:
  void normalize();
  std::vector<Mono> terms_;
};

struct Env {
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double n = std::numeric_limits<double>::quiet_NaN();
  double v = std::numeric_limits<double>::quiet_NaN();
  double get(Sym s) const;
};

double eval_numeric(const Poly& p, const Env& env);
// Natural logarithm of a positive monomial free of ln factors, as a sum.
Poly log_of_monomial(const Poly& m);
Poly substitute(const Poly& p, Sym s, const Poly& value);
Poly derivative(const Poly& p, Sym s);
inline Poly derivative_n(const Poly& p) { return derivative(p, Sym::N); }
Mono leading_monomial(const Poly& p, Sym s);

struct LimitValue {
  enum class Kind { PlusInfinity, MinusInfinity, Finite };
  Kind kind = Kind::Finite;
  double value = 0.0;
  static LimitValue plus_inf() { return {Kind::PlusInfinity, 0.0}; }
  static LimitValue minus_inf() { return {Kind::MinusInfinity, 0.0}; }
  static LimitValue finite(double v) { return {Kind::Finite, v}; }
  bool is_finite() const { return kind == Kind::Finite; }
};
LimitValue limit_at_infinity(const Poly& p, Sym s);

// T such that p(n) <= 0 for every real n >= T; kInfinite when the method
// gives no guarantee.
inline constexpr std::int64_t kInfiniteLb = std::numeric_limits<std::int64_t>::max();
std::int64_t negative_lb(const Poly& p, std::int64_t floor = 2);

struct MonoClass {
  enum class Kind { Constant, NonDecreasing, NonIncreasing, UpThenDown, DownThenUp };
  Kind kind = Kind::Constant;
  double turn = 0.0;
};
// Shape of n^a ln^b n (positive coefficient) on (1, inf).
MonoClass monotonicity_class(const Mono& m);

// Parses the textual expression syntax, e.g. "2*alpha*ln(alpha)^-1*n".
Poly parse_poly(std::string_view text);

std::string format_coeff(double c);

}  // namespace prrtail

#endif  // PRRTAIL_SYMPOLY_HPP_
