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

#include "prrtail/sympoly.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numbers>

namespace prrtail {

namespace {

using Kind = SymPolyError::Kind;

[[noreturn]] void fail(Kind k, const std::string& msg) { throw SymPolyError(k, msg); }

int checked_add(int a, int b) {
  int r = a + b;
  if (r > kMaxExponent || r < -kMaxExponent)
    fail(Kind::ExponentOverflow, "exponent out of range: " + std::to_string(r));
  return r;
}

Exps add_exps(const Exps& a, const Exps& b) {
  Exps r{};
  for (size_t i = 0; i < r.size(); ++i) r[i] = checked_add(a[i], b[i]);
  return r;
}

}  // namespace

const char* sym_name(Sym s) {
  switch (s) {
    case Sym::Alpha: return "alpha";
    case Sym::N: return "n";
    case Sym::V: return "v";
  }
  return "?";
}

bool Mono::is_constant() const {
  return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

double Env::get(Sym s) const {
  switch (s) {
    case Sym::Alpha: return alpha;
    case Sym::N: return n;
    case Sym::V: return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Poly::Poly(double c) {
  if (std::abs(c) >= kZeroEps) terms_.push_back(Mono{c, {}});
}

Poly Poly::var(Sym s) { return power(1.0, s, 1, 0); }
Poly Poly::log(Sym s) { return power(1.0, s, 0, 1); }

Poly Poly::monomial(double c, const Exps& e) {
  for (int x : e)
    if (x > kMaxExponent || x < -kMaxExponent)
      fail(Kind::ExponentOverflow, "exponent out of range: " + std::to_string(x));
  Poly p;
  if (std::abs(c) >= kZeroEps) p.terms_.push_back(Mono{c, e});
  return p;
}

Poly Poly::power(double c, Sym s, int p, int l) {
  Exps e{};
  e[2 * static_cast<int>(s)] = p;
  e[2 * static_cast<int>(s) + 1] = l;
  return monomial(c, e);
}

void Poly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Mono& a, const Mono& b) { return a.e < b.e; });
  std::vector<Mono> out;
  out.reserve(terms_.size());
  for (const Mono& m : terms_) {
    if (!out.empty() && out.back().e == m.e)
      out.back().coeff += m.coeff;
    else
      out.push_back(m);
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const Mono& m) { return std::abs(m.coeff) < kZeroEps; }),
            out.end());
  terms_ = std::move(out);
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].is_constant());
}

double Poly::constant_term() const {
  for (const Mono& m : terms_)
    if (m.is_constant()) return m.coeff;
  return 0.0;
}

bool Poly::depends_on(Sym s) const {
  return std::any_of(terms_.begin(), terms_.end(), [s](const Mono& m) { return m.has(s); });
}

bool Poly::only_in(Sym s) const {
  for (Sym o : {Sym::Alpha, Sym::N, Sym::V})
    if (o != s && depends_on(o)) return false;
  return true;
}

Poly Poly::operator-() const { return scaled(-1.0); }

Poly& Poly::operator+=(const Poly& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  normalize();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly& Poly::operator*=(const Poly& o) {
  std::vector<Mono> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const Mono& a : terms_)
    for (const Mono& b : o.terms_) out.push_back(Mono{a.coeff * b.coeff, add_exps(a.e, b.e)});
  terms_ = std::move(out);
  normalize();
  return *this;
}

Poly Poly::pow(int k) const {
  if (k < 0) {
    if (!is_monomial()) fail(Kind::NonMonomialLogSubstitution, "negative power of a non-monomial");
    const Mono& m = terms_[0];
    Exps e{};
    for (size_t i = 0; i < e.size(); ++i) e[i] = -m.e[i];
    return monomial(1.0 / m.coeff, e).pow(-k);
  }
  Poly r(1.0), base = *this;
  while (k > 0) {
    if (k & 1) r *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return r;
}

Poly Poly::scaled(double c) const {
  Poly r;
  for (const Mono& m : terms_) r.terms_.push_back(Mono{m.coeff * c, m.e});
  r.normalize();
  return r;
}

bool Poly::approx_equal(const Poly& o, double tol) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].e != o.terms_[i].e) return false;
    double a = terms_[i].coeff, b = o.terms_[i].coeff;
    if (std::abs(a - b) > tol * std::max({1.0, std::abs(a), std::abs(b)}) && a != b) return false;
  }
  return true;
}

std::string format_coeff(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", c);
  return buf;
}

namespace {

std::string factor_str(const char* name, int p, bool ln) {
  std::string s = ln ? std::string("ln(") + name + ")" : std::string(name);
  if (p != 1) s += "^" + std::to_string(p);
  return s;
}

std::string mono_body(const Mono& m) {
  std::string out;
  for (Sym s : {Sym::Alpha, Sym::N, Sym::V}) {
    if (m.pow(s) != 0) {
      if (!out.empty()) out += "*";
      out += factor_str(sym_name(s), m.pow(s), false);
    }
    if (m.lnpow(s) != 0) {
      if (!out.empty()) out += "*";
      out += factor_str(sym_name(s), m.lnpow(s), true);
    }
  }
  return out;
}

}  // namespace

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    double c = it->coeff;
    bool neg = c < 0;
    double a = std::abs(c);
    std::string body = mono_body(*it);
    std::string t;
    if (body.empty())
      t = format_coeff(a);
    else if (a == 1.0)
      t = body;
    else
      t = format_coeff(a) + "*" + body;
    if (first)
      out = neg ? "-" + t : t;
    else
      out += neg ? " - " + t : " + " + t;
    first = false;
  }
  return out;
}

double eval_numeric(const Poly& p, const Env& env) {
  double sum = 0.0;
  for (const Mono& m : p.terms()) {
    double t = m.coeff;
    for (Sym s : {Sym::Alpha, Sym::N, Sym::V}) {
      if (!m.has(s)) continue;
      double x = env.get(s);
      if (std::isnan(x)) fail(Kind::UnboundSymbol, std::string("unbound symbol ") + sym_name(s));
      if (x <= 0) fail(Kind::NonPositiveValue, std::string("non-positive value for ") + sym_name(s));
      if (m.pow(s)) t *= std::pow(x, m.pow(s));
      if (m.lnpow(s)) t *= std::pow(std::log(x), m.lnpow(s));
    }
    sum += t;
  }
  if (!std::isfinite(sum)) fail(Kind::NonFinite, "non-finite value in evaluation of " + p.str());
  return sum;
}

Poly log_of_monomial(const Poly& mp) {
  if (!mp.is_monomial()) fail(Kind::NonMonomialLogSubstitution, "ln of a non-monomial: " + mp.str());
  const Mono& m = mp.terms()[0];
  if (m.coeff <= 0) fail(Kind::NonPositiveValue, "ln of a non-positive monomial: " + mp.str());
  Poly r(std::log(m.coeff));
  for (Sym s : {Sym::Alpha, Sym::N, Sym::V}) {
    if (m.lnpow(s) != 0)
      fail(Kind::NonMonomialLogSubstitution, "ln of a logarithmic factor: " + mp.str());
    if (m.pow(s) != 0) r += Poly::power(m.pow(s), s, 0, 1);
  }
  return r;
}

Poly substitute(const Poly& p, Sym s, const Poly& value) {
  Poly result;
  Poly ln_value;
  bool have_ln = false;
  for (const Mono& m : p.terms()) {
    Mono rest = m;
    rest.e[2 * static_cast<int>(s)] = 0;
    rest.e[2 * static_cast<int>(s) + 1] = 0;
    Poly term = Poly::monomial(rest);
    if (m.pow(s) != 0) {
      if (m.pow(s) < 0 && !value.is_monomial())
        fail(Kind::NonMonomialLogSubstitution, "negative power of non-monomial value " + value.str());
      term *= value.pow(m.pow(s));
    }
    if (m.lnpow(s) != 0) {
      if (!have_ln) {
        if (!value.is_monomial())
          fail(Kind::NonMonomialLogSubstitution,
               std::string("ln(") + sym_name(s) + ") with non-monomial value " + value.str());
        ln_value = log_of_monomial(value);
        have_ln = true;
      }
      if (m.lnpow(s) < 0 && !ln_value.is_monomial())
        fail(Kind::NonMonomialLogSubstitution, "negative power of ln(" + value.str() + ")");
      term *= ln_value.pow(m.lnpow(s));
    }
    result += term;
  }
  return result;
}

Poly derivative(const Poly& p, Sym s) {
  Poly r;
  int pi = 2 * static_cast<int>(s);
  for (const Mono& m : p.terms()) {
    int a = m.pow(s), b = m.lnpow(s);
    if (a != 0) {
      Mono d = m;
      d.coeff *= a;
      d.e[pi] = a - 1;
      r += Poly::monomial(d);
    }
    if (b != 0) {
      Mono d = m;
      d.coeff *= b;
      d.e[pi] = a - 1;
      d.e[pi + 1] = b - 1;
      r += Poly::monomial(d);
    }
  }
  return r;
}

Mono leading_monomial(const Poly& p, Sym s) {
  if (p.is_zero()) fail(Kind::ZeroPolynomial, "leading monomial of zero");
  if (!p.only_in(s)) fail(Kind::MixedSymbols, "polynomial mixes symbols: " + p.str());
  const Mono* best = &p.terms()[0];
  for (const Mono& m : p.terms())
    if (magnitude(m, s) > magnitude(*best, s)) best = &m;
  return *best;
}

LimitValue limit_at_infinity(const Poly& p, Sym s) {
  if (p.is_zero()) return LimitValue::finite(0.0);
  Mono lead = leading_monomial(p, s);
  if (magnitude(lead, s) > Magnitude{0, 0})
    return lead.coeff > 0 ? LimitValue::plus_inf() : LimitValue::minus_inf();
  return LimitValue::finite(p.constant_term());
}

MonoClass monotonicity_class(const Mono& m) {
  int a = m.pow(Sym::N), b = m.lnpow(Sym::N);
  using K = MonoClass::Kind;
  if (a < 0 && b > 0) return {K::UpThenDown, std::exp(-static_cast<double>(b) / a)};
  if (a > 0 && b < 0) return {K::DownThenUp, std::exp(-static_cast<double>(b) / a)};
  if (a == 0 && b == 0) return {K::Constant, 0.0};
  if (a < 0 || (a == 0 && b < 0)) return {K::NonIncreasing, 0.0};
  return {K::NonDecreasing, 0.0};
}

std::int64_t negative_lb(const Poly& p, std::int64_t floor) {
  floor = std::max<std::int64_t>(floor, 2);
  if (!p.only_in(Sym::N)) fail(Kind::MixedSymbols, "negative_lb expects a polynomial in n: " + p.str());
  if (p.is_zero()) return floor;
  Mono lead = leading_monomial(p, Sym::N);
  if (p.is_constant()) return lead.coeff <= 0 ? floor : kInfiniteLb;
  if (lead.coeff >= 0) return kInfiniteLb;

  // P1 = P / (n^a* ln^b* n); P2 drops non-constant negative terms.
  Poly inv = Poly::power(1.0, Sym::N, -lead.pow(Sym::N), -lead.lnpow(Sym::N));
  Poly p1 = p * inv;
  Poly p2 = p1.filter([](const Mono& m) { return m.is_constant() || m.coeff > 0; });

  double ne = static_cast<double>(floor);
  for (const Mono& m : p2.terms()) {
    MonoClass c = monotonicity_class(m);
    if (c.kind == MonoClass::Kind::UpThenDown) ne = std::max(ne, std::ceil(c.turn));
  }
  constexpr std::int64_t kCap = 1000000000;
  auto val = [&](std::int64_t n) {
    Env env;
    env.n = static_cast<double>(n);
    return eval_numeric(p2, env);
  };
  std::int64_t lo = static_cast<std::int64_t>(ne);
  if (lo > kCap) fail(Kind::ScanCapExceeded, "turning point beyond scan cap");
  if (val(lo) < 0) return lo;
  // P2 is non-increasing past n_e, so the first negative point is found by
  // doubling followed by bisection.
  std::int64_t hi = lo;
  while (val(hi) >= 0) {
    lo = hi;
    hi *= 2;
    if (hi > kCap) fail(Kind::ScanCapExceeded, "negative_lb scan exceeded 1e9 for " + p.str());
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (val(mid) < 0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class PolyParser {
 public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  Poly parse() {
    Poly p = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& msg) {
    fail(Kind::Parse, msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip();
    size_t b = pos_;
    while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }

  Poly expr() {
    Poly p = term();
    for (;;) {
      if (accept('+'))
        p += term();
      else if (accept('-'))
        p -= term();
      else
        return p;
    }
  }

  Poly term() {
    Poly p = unary();
    for (;;) {
      if (accept('*')) {
        p *= unary();
      } else if (accept('/')) {
        Poly d = unary();
        if (!d.is_monomial()) error("division by a non-monomial");
        p *= d.pow(-1);
      } else {
        return p;
      }
    }
  }

  Poly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  int signed_int() {
    skip();
    bool neg = false;
    bool paren = accept('(');
    if (accept('-')) neg = true;
    skip();
    size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) error("expected integer exponent");
    int v = std::stoi(std::string(s_.substr(b, pos_ - b)));
    if (paren) expect(')');
    return neg ? -v : v;
  }

  Poly power() {
    Poly base = atom();
    if (accept('^')) {
      int k = signed_int();
      if (k < 0 && !base.is_monomial()) error("negative power of a non-monomial");
      return base.pow(k);
    }
    return base;
  }

  Poly atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t b = pos_;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ + 1 < s_.size() &&
          (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '-' ||
           s_[pos_ + 1] == '+')) {
        ++pos_;
        if (s_[pos_] == '-' || s_[pos_] == '+') ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      return Poly(std::stod(std::string(s_.substr(b, pos_ - b))));
    }
    if (accept('(')) {
      Poly p = expr();
      expect(')');
      return p;
    }
    std::string id = ident();
    if (id == "alpha") return Poly::var(Sym::Alpha);
    if (id == "n") return Poly::var(Sym::N);
    if (id == "v") return Poly::var(Sym::V);
    if (id == "e") return Poly(std::numbers::e);
    if (id == "ln" || id == "log") {
      expect('(');
      Poly arg = expr();
      expect(')');
      if (arg.is_monomial() && arg.terms()[0].coeff == 1.0) {
        const Mono& m = arg.terms()[0];
        int nonzero = 0;
        Sym which = Sym::N;
        for (Sym s : {Sym::Alpha, Sym::N, Sym::V})
          if (m.has(s)) {
            ++nonzero;
            which = s;
          }
        if (nonzero == 1 && m.pow(which) == 1 && m.lnpow(which) == 0) return Poly::log(which);
      }
      return log_of_monomial(arg);
    }
    if (id.empty()) error(std::string("unexpected character '") + c + "'");
    error("unknown identifier '" + id + "'");
  }

  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text) { return PolyParser(text).parse(); }

}  // namespace prrtail
