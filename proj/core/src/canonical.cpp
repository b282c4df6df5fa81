/* SPDX-License-Identifier: Apache-2.0 */
#include "prrtail/canonical.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace prrtail {

namespace {

constexpr double kDropProb = 1e-12;
constexpr double kSumTol = 1e-9;

void flatten(const Command& c, double prob, CanonicalPrr& out) {
  switch (c.kind) {
    case Command::Kind::Choice:
      for (const ChoiceArm& a : c.arms) flatten(a.cmd, prob * eval_expr(a.prob, 0), out);
      return;
    case Command::Kind::Sample:
    case Command::Kind::Direct: {
      if (prob < kDropProb) {
        out.warnings.push_back("dropped branch with probability " + format_coeff(prob));
        return;
      }
      Branch b;
      b.prob = prob;
      b.pre = c.body.pre;
      try {
        b.pre_poly = expr_to_poly(c.body.pre, Rounding::Upper);
      } catch (const SymPolyError&) {
        b.pre_poly.reset();
      }
      b.r = static_cast<int>(c.body.calls.size());
      if (c.kind == Command::Kind::Sample) {
        b.dist = c.dist;
        b.var = c.var;
        b.size1 = c.body.calls[0];
        if (b.r == 2) b.size2 = c.body.calls[1];
      } else {
        // pre(S); invoke p(e) is sampling v from discrete{1: e} and calling p(v).
        b.dist.kind = Dist::Kind::Discrete;
        b.dist.arms.push_back(DiscreteArm{Expr::num(1), c.body.calls[0]});
        b.size1 = Expr::var_v();
        if (b.r == 2) b.size2 = c.body.calls[1];
      }
      out.branches.push_back(std::move(b));
      return;
    }
  }
}

const char* dist_name(Dist::Kind k) {
  switch (k) {
    case Dist::Kind::Uniform: return "uniform";
    case Dist::Kind::MUniform: return "muniform";
    case Dist::Kind::Discrete: return "discrete";
    case Dist::Kind::PUniform: return "puniform";
  }
  return "?";
}

}  // namespace

std::vector<std::pair<double, double>> support(const Dist& d, long n) {
  std::vector<std::pair<double, double>> out;
  double dn = static_cast<double>(n);
  switch (d.kind) {
    case Dist::Kind::Uniform:
      for (long i = 0; i < n; ++i) out.emplace_back(i, 1.0 / dn);
      break;
    case Dist::Kind::MUniform:
      // max(i, n-1-i) for i uniform: each value above the middle twice.
      for (long v = n / 2; v < n; ++v) out.emplace_back(v, (2 * v == n - 1 ? 1.0 : 2.0) / dn);
      break;
    case Dist::Kind::Discrete:
      for (const DiscreteArm& a : d.arms) out.emplace_back(eval_expr(a.value, dn), eval_expr(a.prob, 0));
      break;
    case Dist::Kind::PUniform:
      for (const Piece& p : d.pieces) {
        long lo = std::lround(eval_expr(p.lo, dn)), hi = std::lround(eval_expr(p.hi, dn));
        double w = eval_expr(p.weight, 0);
        for (long i = lo; i <= hi; ++i) out.emplace_back(i, w / static_cast<double>(hi - lo + 1));
      }
      break;
  }
  return out;
}

CanonicalPrr to_canonical(const PrrAst& ast) {
  CanonicalPrr out;
  out.cp = ast.cp;
  flatten(ast.body, 1.0, out);
  double sum = 0;
  for (const Branch& b : out.branches) sum += b.prob;
  if (out.branches.empty() || std::abs(sum - 1.0) > kSumTol)
    throw std::invalid_argument("branch probabilities sum to " + format_coeff(sum));
  return out;
}

std::string canonical_to_json(const CanonicalPrr& prr, int indent) {
  nlohmann::json j;
  j["cp"] = prr.cp;
  j["branches"] = nlohmann::json::array();
  for (const Branch& b : prr.branches) {
    nlohmann::json jb;
    jb["prob"] = b.prob;
    jb["pre"] = print_expr(b.pre, b.var);
    if (b.pre_poly) jb["pre_poly"] = b.pre_poly->str();
    jb["dist"]["kind"] = dist_name(b.dist.kind);
    for (const DiscreteArm& a : b.dist.arms)
      jb["dist"]["arms"].push_back({{"prob", eval_expr(a.prob, 0)}, {"value", print_expr(a.value)}});
    for (const Piece& p : b.dist.pieces)
      jb["dist"]["pieces"].push_back(
          {{"lo", print_expr(p.lo)}, {"hi", print_expr(p.hi)}, {"weight", eval_expr(p.weight, 0)}});
    jb["r"] = b.r;
    jb["size1"] = print_expr(b.size1, b.var);
    if (b.size2) jb["size2"] = print_expr(*b.size2, b.var);
    j["branches"].push_back(jb);
  }
  if (!prr.warnings.empty()) j["warnings"] = prr.warnings;
  return j.dump(indent);
}

}  // namespace prrtail
