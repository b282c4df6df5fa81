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

#include "prrtail/strengthener.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>

#include "json.hpp"

namespace prrtail {

namespace {

// c * A(alpha) * n^u * ln(n)^w, with A carrying the coefficient.
struct NTemplate {
  Poly a;  // alpha part including the coefficient
  int u = 0;
  int w = 0;
};

NTemplate split_template(const Poly& p, const char* what) {
  if (!p.is_monomial() || p.depends_on(Sym::V))
    throw std::invalid_argument(std::string(what) + " must be a single monomial in alpha and n: " + p.str());
  Mono m = p.terms()[0];
  NTemplate t;
  t.u = m.pow(Sym::N);
  t.w = m.lnpow(Sym::N);
  m.e[2] = m.e[3] = 0;
  t.a = Poly::monomial(m);
  return t;
}

double npart(int u, int w, double x) { return std::pow(x, u) * std::pow(std::log(x), w); }

// Numeric n-part of f at integer size h; zero below c_p.
double f_scalar(const NTemplate& f, double h, long cp) {
  if (h < static_cast<double>(cp)) return 0.0;
  return npart(f.u, f.w, h);
}

void note(const StrengthenContext& ctx, const char* rule, const std::string& scope, const Poly& before,
          const Poly& after) {
  if (ctx.trace) ctx.trace->push_back({rule, scope, before.str(), after.str()});
}

Expr subst_v(const Expr& e, const Expr& value) {
  if (e.kind == Expr::Kind::V) return value;
  Expr out = e;
  for (Expr& k : out.kids) k = subst_v(k, value);
  return out;
}

std::string scope_of(const StrengthenContext& ctx, int arm) {
  std::string s = "branch " + std::to_string(ctx.branch);
  if (arm >= 0) s += " arm " + std::to_string(arm);
  return s;
}

const Poly& pre_upper(const Branch& b, const StrengthenContext& ctx) {
  if (!b.pre_poly)
    throw StrengtheningFailure(ctx.branch, -1, "pre-cost has no pseudo-polynomial upper bound: " + print_expr(b.pre));
  return *b.pre_poly;
}

// Coefficients of a linear upper bound a*n + b; throws otherwise.
std::pair<double, double> linear_coeffs(const Poly& h, const StrengthenContext& ctx, int arm) {
  double a = 0, b = 0;
  for (const Mono& m : h.terms()) {
    if (m.is_constant())
      b += m.coeff;
    else if (m.pow(Sym::N) == 1 && m.lnpow(Sym::N) == 0 && !m.has(Sym::Alpha) && !m.has(Sym::V))
      a += m.coeff;
    else
      throw StrengtheningFailure(ctx.branch, arm, "call size is not linear in n: " + h.str());
  }
  if (a <= 0) throw StrengtheningFailure(ctx.branch, arm, "call size does not grow with n: " + h.str());
  return {a, b};
}

// Upper bound of f(H) for n >= n0 where H is a v-free size expression.
Poly f_upper_at(const NTemplate& f, const Expr& size, const StrengthenContext& ctx, int arm) {
  if (!uses_n(size)) return f.a.scaled(f_scalar(f, eval_expr(size, 0), ctx.cp));
  Poly hup = expr_to_poly(size, Rounding::Upper);
  auto [a, b] = linear_coeffs(hup, ctx, arm);
  Poly base = Poly::power(a, Sym::N, 1) + Poly(b);
  Poly out = f.a * base.pow(f.u);
  if (f.w == 0) return out;
  // ln H <= ln n + ln(min(1, a + max(b, 0)/n0)) since H <= n.
  double r = std::min(1.0, a + std::max(b, 0.0) / static_cast<double>(ctx.n0));
  if (r * static_cast<double>(ctx.n0) <= 1.0)
    throw StrengtheningFailure(ctx.branch, arm, "log bound of the call size is not positive: " + hup.str());
  Poly lnh = Poly::log(Sym::N) + Poly(std::log(r));
  Poly res = out * lnh.pow(f.w);
  note(ctx, "R2", scope_of(ctx, arm), f.a * Poly::power(1, Sym::N, f.u, f.w), res);
  return res;
}

Poly n_of(int u, int w) { return Poly::power(1.0, Sym::N, u, w); }

double sup_subconstant(int u, int w, long n0) {
  MonoClass c = monotonicity_class(Mono{1.0, Exps{0, 0, u, w, 0, 0}});
  double x = static_cast<double>(n0);
  if (c.kind == MonoClass::Kind::UpThenDown) x = std::max(x, c.turn);
  return npart(u, w, x);
}

double inf_superconstant(int u, int w, long n0) {
  MonoClass c = monotonicity_class(Mono{1.0, Exps{0, 0, u, w, 0, 0}});
  double x = static_cast<double>(n0);
  if (c.kind == MonoClass::Kind::DownThenUp) x = std::max(x, c.turn);
  return npart(u, w, x);
}

// Removes ln factors from a positive prefactor monomial (alpha >= e,
// n >= n0) and returns its logarithm as a pseudo-polynomial.
Poly log_prefactor(const Poly& p, const StrengthenContext& ctx, const std::string& scope) {
  if (!p.is_monomial() || p.terms()[0].coeff <= 0)
    throw StrengtheningFailure(ctx.branch, -1, "prefactor is not a positive monomial: " + p.str());
  Mono m = p.terms()[0];
  int b = m.lnpow(Sym::Alpha), d = m.lnpow(Sym::N);
  if (b > 0) m.e[0] += b;  // ln alpha <= alpha
  m.e[1] = 0;              // ln(alpha)^b <= 1 for b < 0
  if (d > 0) m.e[2] += d;  // ln n <= n
  if (d < 0) m.coeff *= std::pow(std::log(static_cast<double>(ctx.n0)), d);
  m.e[3] = 0;
  Poly q = Poly::monomial(m);
  if (b != 0 || d != 0) note(ctx, "R2", scope, p, q);
  return log_of_monomial(q);
}

}  // namespace

long choose_n0(const CanonicalPrr& prr, int Q) {
  long n0 = std::max<long>({32, 2L * Q, prr.cp});
  for (const Branch& b : prr.branches) {
    if (b.dist.kind != Dist::Kind::Discrete) continue;
    for (const DiscreteArm& arm : b.dist.arms) {
      std::vector<Expr> sizes{subst_v(b.size1, arm.value)};
      if (b.size2) sizes.push_back(subst_v(*b.size2, arm.value));
      for (const Expr& s : sizes) {
        if (!uses_n(s)) continue;
        while (n0 < 100000 && eval_expr(s, static_cast<double>(n0)) < prr.cp) ++n0;
      }
    }
  }
  return n0;
}

namespace {

// Non-throwing form of separate(); on failure returns false and sets *why.
bool separate_into(const Poly& x, const StrengthenContext& ctx, const std::string& scope, Separated& out,
                   std::string* why) {
  std::map<std::pair<int, int>, Poly> groups;
  for (const Mono& m : x.terms()) {
    if (m.has(Sym::V)) {
      *why = "v left in exponent: " + x.str();
      return false;
    }
    Mono a = m;
    a.e[2] = a.e[3] = 0;
    groups[{m.pow(Sym::N), m.lnpow(Sym::N)}] += Poly::monomial(a);
  }
  out = Separated{};
  bool changed = false;
  for (const auto& [key, a] : groups) {
    auto [u, w] = key;
    if (a.is_zero()) continue;
    if (u == 0 && w == 0) {
      out.f_alpha += a;
      continue;
    }
    bool sub = u < 0 || (u == 0 && w < 0);
    if (!a.depends_on(Sym::Alpha)) {
      double c = a.constant_term();
      if (u >= 0 && w >= 0) {
        out.g_n += n_of(u, w).scaled(c);
        continue;
      }
      changed = true;
      if (sub) {
        if (c > 0) out.f_alpha += Poly(c * sup_subconstant(u, w, ctx.n0));
      } else if (c > 0) {
        // u > 0, w < 0: ln(n)^w <= ln(n0)^w.
        out.g_n += n_of(u, 0).scaled(c * std::pow(std::log(static_cast<double>(ctx.n0)), w));
      } else {
        // n^u ln^w n >= K n^(u-1) with K = inf n ln^w n.
        double k = inf_superconstant(1, w, ctx.n0);
        if (u == 1)
          out.f_alpha += Poly(c * k);
        else
          out.g_n += n_of(u - 1, 0).scaled(c * k);
      }
      continue;
    }
    changed = true;
    double s = leading_monomial(a, Sym::Alpha).coeff;
    if (sub) {
      if (s > 0) out.f_alpha += a.scaled(sup_subconstant(u, w, ctx.n0));
    } else if (s < 0) {
      out.f_alpha += a.scaled(inf_superconstant(u, w, ctx.n0));
    } else {
      *why = "cross term with growing positive coefficient: (" + a.str() + ")*" + n_of(u, w).str();
      return false;
    }
  }
  if (changed && ctx.trace) ctx.trace->push_back({"R3", scope, x.str(), (out.f_alpha + out.g_n).str()});
  return true;
}

}  // namespace

Separated separate(const Poly& x, const StrengthenContext& ctx, const std::string& scope) {
  Separated out;
  std::string why;
  if (!separate_into(x, ctx, scope, out, &why)) throw StrengtheningFailure(ctx.branch, -1, why);
  return out;
}

ExpIntegral exp_integral(const Poly& exponent, const Poly& upper) {
  if (!upper.is_monomial() || upper.terms()[0].coeff <= 0 || upper.depends_on(Sym::V))
    throw std::invalid_argument("integration bound must be a positive monomial: " + upper.str());
  Poly x0 = exponent.filter([](const Mono& m) { return !m.has(Sym::V); });
  Poly vt = exponent.filter([](const Mono& m) { return m.has(Sym::V) && m.coeff > 0; });
  if (vt.is_zero()) return {upper, x0};
  auto mag = [](const Mono& m) { return std::pair{m.pow(Sym::V), m.lnpow(Sym::V)}; };
  const Mono* lead = &vt.terms()[0];
  for (const Mono& m : vt.terms()) {
    if (m.pow(Sym::V) < 0 || m.lnpow(Sym::V) < 0)
      throw NonPositiveW("decreasing v factor in exponent: " + exponent.str());
    if (mag(m) > mag(*lead)) lead = &m;
  }
  for (const Mono& m : vt.terms())
    if (&m != lead) x0 += substitute(Poly::monomial(m), Sym::V, upper);
  Mono k = *lead;
  int d = k.pow(Sym::V), e = k.lnpow(Sym::V);
  k.e[4] = k.e[5] = 0;
  Poly kp = Poly::monomial(k);
  Poly lnu = log_of_monomial(upper);
  Poly w;
  if (d >= 1)
    w = kp * upper.pow(d - 1) * lnu.pow(e);
  else
    w = kp * lnu.pow(e - 1);
  if (!w.is_monomial()) throw NonPositiveW("slope is not a monomial: " + w.str());
  if (w.terms()[0].coeff <= 0) throw NonPositiveW("slope is not positive: " + w.str());
  if (d >= 1) return {w.pow(-1), x0 + w * upper};
  return {upper * w.pow(-1), x0 + w * lnu};
}

std::vector<CanonicalTerm> strengthen_branch_discrete(const Branch& branch, const Poly& f_bar, const Poly& t_bar,
                                                      const StrengthenContext& ctx) {
  NTemplate f = split_template(f_bar, "f");
  const Poly& s = pre_upper(branch, ctx);
  std::vector<CanonicalTerm> out;
  for (std::size_t k = 0; k < branch.dist.arms.size(); ++k) {
    const DiscreteArm& arm = branch.dist.arms[k];
    int ai = static_cast<int>(k);
    std::string scope = scope_of(ctx, ai);
    double c = eval_expr(arm.prob, 0);
    Poly sk = s;
    if (s.depends_on(Sym::V)) sk = substitute(s, Sym::V, expr_to_poly(arm.value, Rounding::Upper));
    std::vector<Expr> sizes{subst_v(branch.size1, arm.value)};
    if (branch.size2) sizes.push_back(subst_v(*branch.size2, arm.value));
    CanonicalTerm term;
    term.gamma = c;
    try {
      Poly sum = sk - f_bar;
      for (const Expr& h : sizes) sum += f_upper_at(f, h, ctx, ai);
      Poly x = t_bar * sum;
      Separated sp = separate(x, ctx, scope);
      term.f_alpha = sp.f_alpha;
      term.g_n = sp.g_n;
      term.origin = "S2-D " + scope;
    } catch (const StrengtheningFailure&) {
      // f(H_1) + ... + f(H_r) <= f(n): needs superadditivity when r = 2.
      if (sizes.size() == 2 && f.u < 1)
        throw StrengtheningFailure(ctx.branch, ai, "no strategy for arm (f is not superadditive)");
      Poly x = t_bar * sk;
      note(ctx, "R1", scope, t_bar * (sk - f_bar), x);
      Separated sp = separate(x, ctx, scope);
      term.f_alpha = sp.f_alpha;
      term.g_n = sp.g_n;
      term.origin = "S1-D " + scope;
    }
    out.push_back(std::move(term));
  }
  return out;
}

namespace {

// Density bound (as a monomial in n) and whether size1 is v or n-1-v.
Poly uniform_density(const Branch& b) {
  return Poly::power(b.dist.kind == Dist::Kind::MUniform ? 2.0 : 1.0, Sym::N, -1);
}

bool size_is_v_or_mirror(const Expr& size) {
  Poly h;
  try {
    h = expr_to_poly(size, Rounding::Upper);
  } catch (const SymPolyError&) {
    return false;
  }
  Poly v = Poly::var(Sym::V);
  return h.approx_equal(v, 0) || h.approx_equal(Poly::var(Sym::N) - Poly(1) - v, 0);
}

// Empty when the separated exponent has an unbounded cross term (*why set).
std::optional<CanonicalTerm> case_two_term(const Poly& exponent, const Poly& density, const StrengthenContext& ctx,
                                           const std::string& scope, std::string* why) {
  ExpIntegral ei = exp_integral(exponent, Poly::var(Sym::N));
  Poly pre = density * ei.prefactor;
  Poly x = ei.exponent + log_prefactor(pre, ctx, scope);
  if (ctx.trace) ctx.trace->push_back({"R4", scope, exponent.str(), x.str()});
  Separated sp;
  if (!separate_into(x, ctx, scope, sp, why)) return std::nullopt;
  return CanonicalTerm{1.0, sp.f_alpha, sp.g_n, "S2-U " + scope};
}

}  // namespace

std::vector<CanonicalTerm> strengthen_branch_uniform(const Branch& branch, const Poly& f_bar, const Poly& t_bar,
                                                     const StrengthenContext& ctx) {
  split_template(f_bar, "f");
  const Poly& s = pre_upper(branch, ctx);
  std::string scope = scope_of(ctx, -1);
  Poly fv = substitute(f_bar, Sym::N, Poly::var(Sym::V));
  // f(H) <= f(n) for every sampled size H < n.
  auto fallback = [&](const std::string& why) -> std::vector<CanonicalTerm> {
    if (s.depends_on(Sym::V)) throw StrengtheningFailure(ctx.branch, -1, "no strategy for branch: " + why);
    Poly x = t_bar * s;
    note(ctx, "R1", scope, t_bar * (s - f_bar + fv), x);
    Separated sp = separate(x, ctx, scope);
    return {CanonicalTerm{1.0, sp.f_alpha, sp.g_n, "S1-U " + scope}};
  };
  // The S2-U attempt; failures fall back to S1-U below.
  std::string why;
  std::vector<CanonicalTerm> out;
  bool ok = true;
  try {
    if (branch.dist.kind == Dist::Kind::PUniform) {
      // Each piece [lo, hi] with weight w: density w / count, v <= hi.
      if (!size_is_v_or_mirror(branch.size1) ||
          !expr_to_poly(branch.size1, Rounding::Upper).approx_equal(Poly::var(Sym::V), 0))
        throw StrengtheningFailure(ctx.branch, -1, "puniform call size must be v");
      for (std::size_t i = 0; i < branch.dist.pieces.size(); ++i) {
        const Piece& pc = branch.dist.pieces[i];
        std::string ps = scope + " piece " + std::to_string(i);
        Poly cnt = expr_to_poly(pc.hi, Rounding::Lower) - expr_to_poly(pc.lo, Rounding::Upper) + Poly(1);
        double a = 0, b = 0;
        for (const Mono& m : cnt.terms()) {
          if (m.is_constant())
            b += m.coeff;
          else if (m.pow(Sym::N) == 1 && m.lnpow(Sym::N) == 0 && !m.has(Sym::Alpha) && !m.has(Sym::V))
            a += m.coeff;
          else
            throw StrengtheningFailure(ctx.branch, -1, "piece length is not linear: " + cnt.str());
        }
        double wgt = eval_expr(pc.weight, 0);
        Poly density;
        if (a > 0) {
          double lo_slope = a + std::min(b, 0.0) / static_cast<double>(ctx.n0);
          if (lo_slope <= 0) throw StrengtheningFailure(ctx.branch, -1, "piece length not positive");
          density = Poly::power(wgt / lo_slope, Sym::N, -1);
        } else if (a == 0 && b >= 1) {
          density = Poly(wgt / b);
        } else {
          throw StrengtheningFailure(ctx.branch, -1, "piece length not positive");
        }
        Poly x = t_bar * (s - f_bar + fv);
        auto term = case_two_term(x, density, ctx, ps, &why);
        if (!term) {
          ok = false;
          break;
        }
        out.push_back(*term);
      }
    } else {
      if (!size_is_v_or_mirror(branch.size1))
        throw StrengtheningFailure(ctx.branch, -1, "call size is neither v nor n-1-v");
      Poly x = t_bar * (s - f_bar + fv);
      auto term = case_two_term(x, uniform_density(branch), ctx, scope, &why);
      if (term) out.push_back(*term);
      ok = term.has_value();
    }
  } catch (const std::runtime_error& e) {
    ok = false;
    why = e.what();
  } catch (const std::invalid_argument& e) {
    ok = false;
    why = e.what();
  }
  return ok ? out : fallback(why);
}

std::vector<CanonicalTerm> strengthen_branch_dnc(const Branch& branch, const Poly& f_bar, const Poly& t_bar,
                                                 const StrengthenContext& ctx) {
  NTemplate f = split_template(f_bar, "f");
  const Poly& s = pre_upper(branch, ctx);
  std::string scope = scope_of(ctx, -1);
  if (branch.dist.kind != Dist::Kind::Uniform && branch.dist.kind != Dist::Kind::MUniform)
    throw StrengtheningFailure(ctx.branch, -1, "two calls need a uniform or muniform pivot");
  if (s.depends_on(Sym::V)) throw StrengtheningFailure(ctx.branch, -1, "pre-cost depends on the pivot");
  Poly v = Poly::var(Sym::V), n = Poly::var(Sym::N);
  Poly h1 = expr_to_poly(branch.size1, Rounding::Upper), h2 = expr_to_poly(*branch.size2, Rounding::Upper);
  bool split = (h1.approx_equal(v, 0) && h2.approx_equal(n - Poly(1) - v, 0)) ||
               (h2.approx_equal(v, 0) && h1.approx_equal(n - Poly(1) - v, 0));
  if (f.u < 1) throw StrengtheningFailure(ctx.branch, -1, "f must be at least linear for two calls");
  if (!split) {
    // Superadditive f: f(H1) + f(H2) <= f(H1 + H2) <= f(n).
    Poly sum = h1 + h2;
    if (sum.depends_on(Sym::V) || linear_coeffs(sum, ctx, -1).first > 1)
      throw StrengtheningFailure(ctx.branch, -1, "call sizes do not sum to at most n");
    Poly x = t_bar * s;
    note(ctx, "R1", scope, t_bar * (s - f_bar), x);
    Separated sp = separate(x, ctx, scope);
    return {CanonicalTerm{1.0, sp.f_alpha, sp.g_n, "S1-DC " + scope}};
  }
  Poly x0 = t_bar * (s + f_upper_at(f, Expr::binary(Expr::Kind::Sub, Expr::var_n(), Expr::num(1)), ctx, -1) - f_bar);
  if (f.u == 1 && f.w == 0) {
    // f(v) + f(n-1-v) <= f(n-1) for every pivot.
    Separated sp = separate(x0, ctx, scope);
    return {CanonicalTerm{1.0, sp.f_alpha, sp.g_n, "S2-DC " + scope}};
  }
  // psi(v) = f(v) + f(n-1-v) is convex and symmetric; blocks of width n/(2Q)
  // over [0, n/2) are bounded at their left endpoints.
  std::vector<CanonicalTerm> out;
  double gq = (1.0 + 1.0 / static_cast<double>(ctx.n0)) / ctx.Q;
  for (int j = 0; j < ctx.Q; ++j) {
    Poly xj;
    if (j == 0) {
      xj = x0;
    } else {
      double c = static_cast<double>(j) / (2.0 * ctx.Q);
      auto at = [&](double r) {
        return f.a * Poly::power(std::pow(r, f.u), Sym::N, f.u) * (Poly::log(Sym::N) + Poly(std::log(r))).pow(f.w);
      };
      xj = t_bar * (s + at(c) + at(1 - c) - f_bar);
    }
    std::string bs = scope + " block " + std::to_string(j);
    Separated sp = separate(xj, ctx, bs);
    out.push_back(CanonicalTerm{gq, sp.f_alpha, sp.g_n, "S2-DC " + bs});
  }
  Separated sp = separate(x0 - Poly::log(Sym::N), ctx, scope + " edge");
  out.push_back(CanonicalTerm{2.0, sp.f_alpha, sp.g_n, "S2-DC " + scope + " edge"});
  return out;
}

CanonicalConstraint combine_branches(const std::vector<BranchTerms>& per_branch, long cp) {
  CanonicalConstraint out;
  out.cp = cp;
  for (const BranchTerms& b : per_branch) {
    for (const CanonicalTerm& t : b.terms) {
      auto same = std::find_if(out.terms.begin(), out.terms.end(), [&](const CanonicalTerm& o) {
        return o.f_alpha == t.f_alpha && o.g_n == t.g_n;
      });
      if (same != out.terms.end()) {
        same->gamma += b.prob * t.gamma;
        same->origin += "; " + t.origin;
      } else {
        CanonicalTerm c = t;
        c.gamma *= b.prob;
        out.terms.push_back(std::move(c));
      }
    }
  }
  return out;
}

CanonicalConstraint strengthen_general(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, int Q,
                                       Trace* trace, long n0) {
  split_template(f_bar, "f");
  split_template(t_bar, "t");
  StrengthenContext ctx;
  ctx.cp = prr.cp;
  ctx.Q = Q;
  ctx.n0 = n0 > 0 ? n0 : choose_n0(prr, Q);
  ctx.trace = trace;
  std::vector<BranchTerms> per;
  for (std::size_t i = 0; i < prr.branches.size(); ++i) {
    const Branch& b = prr.branches[i];
    ctx.branch = static_cast<int>(i);
    BranchTerms bt;
    bt.prob = b.prob;
    if (b.dist.kind == Dist::Kind::Discrete)
      bt.terms = strengthen_branch_discrete(b, f_bar, t_bar, ctx);
    else if (b.r == 1)
      bt.terms = strengthen_branch_uniform(b, f_bar, t_bar, ctx);
    else
      bt.terms = strengthen_branch_dnc(b, f_bar, t_bar, ctx);
    per.push_back(std::move(bt));
  }
  return combine_branches(per, ctx.n0);
}

std::vector<PointConstraint> exact_prefix(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, long n0) {
  NTemplate f = split_template(f_bar, "f");
  NTemplate t = split_template(t_bar, "t");
  Poly ba = t.a * f.a;
  std::vector<PointConstraint> out;
  for (long n = prr.cp; n < n0; ++n) {
    double dn = static_cast<double>(n);
    double tv = npart(t.u, t.w, dn);
    if (!std::isfinite(tv))
      throw StrengtheningFailure(-1, -1, "t is undefined at n=" + std::to_string(n));
    double fn = f_scalar(f, dn, prr.cp);
    PointConstraint pc;
    pc.n = n;
    for (const Branch& b : prr.branches) {
      for (auto [v, pv] : support(b.dist, n)) {
        double sv = eval_expr(b.pre, dn, v);
        double fs = f_scalar(f, std::round(eval_expr(b.size1, dn, v)), prr.cp);
        if (b.size2) fs += f_scalar(f, std::round(eval_expr(*b.size2, dn, v)), prr.cp);
        Poly h = t.a.scaled(tv * sv) + ba.scaled(tv * (fs - fn));
        pc.terms.push_back(PointTerm{b.prob * pv, std::move(h)});
      }
    }
    out.push_back(std::move(pc));
  }
  return out;
}

CanonicalConstraint strengthen(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, int Q, Trace* trace,
                               long n0) {
  CanonicalConstraint c = strengthen_general(prr, f_bar, t_bar, Q, trace, n0);
  c.prefix = exact_prefix(prr, f_bar, t_bar, c.cp);
  return c;
}

double exact_lhs(const CanonicalPrr& prr, const Poly& f_bar, const Poly& t_bar, double alpha, long n) {
  NTemplate f = split_template(f_bar, "f");
  Env env;
  env.alpha = alpha;
  env.n = static_cast<double>(n);
  double tv = eval_numeric(t_bar, env);
  double fa = eval_numeric(f.a, env);
  double dn = static_cast<double>(n);
  double fn = fa * f_scalar(f, dn, prr.cp);
  double sum = 0;
  for (const Branch& b : prr.branches) {
    for (auto [v, pv] : support(b.dist, n)) {
      double fs = f_scalar(f, std::round(eval_expr(b.size1, dn, v)), prr.cp);
      if (b.size2) fs += f_scalar(f, std::round(eval_expr(*b.size2, dn, v)), prr.cp);
      sum += b.prob * pv * std::exp(tv * (eval_expr(b.pre, dn, v) + fa * fs - fn));
    }
  }
  return sum;
}

double CanonicalConstraint::eval(double alpha, long n) const {
  double sum = 0;
  if (n < cp) {
    for (const PointConstraint& pc : prefix) {
      if (pc.n != n) continue;
      Env env;
      env.alpha = alpha;
      for (const PointTerm& t : pc.terms) sum += t.gamma * std::exp(eval_numeric(t.h_alpha, env));
    }
    return sum;
  }
  Env env;
  env.alpha = alpha;
  env.n = static_cast<double>(n);
  for (const CanonicalTerm& t : terms)
    sum += t.gamma * std::exp(eval_numeric(t.f_alpha, env) + eval_numeric(t.g_n, env));
  return sum;
}

std::string CanonicalConstraint::to_json(int indent) const {
  nlohmann::json j;
  j["cp"] = cp;
  j["terms"] = nlohmann::json::array();
  for (const CanonicalTerm& t : terms)
    j["terms"].push_back({{"gamma", t.gamma}, {"f_alpha", t.f_alpha.str()}, {"g_n", t.g_n.str()}, {"origin", t.origin}});
  j["prefix"] = nlohmann::json::array();
  for (const PointConstraint& pc : prefix) {
    nlohmann::json jp;
    jp["n"] = pc.n;
    jp["terms"] = nlohmann::json::array();
    for (const PointTerm& t : pc.terms) jp["terms"].push_back({{"gamma", t.gamma}, {"h_alpha", t.h_alpha.str()}});
    j["prefix"].push_back(jp);
  }
  return j.dump(indent);
}

std::string trace_to_json(const Trace& trace, int indent) {
  nlohmann::json j = nlohmann::json::array();
  for (const TraceStep& s : trace)
    j.push_back({{"rule", s.rule}, {"scope", s.scope}, {"before", s.before}, {"after", s.after}});
  return j.dump(indent);
}

}  // namespace prrtail
