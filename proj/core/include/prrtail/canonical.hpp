/* SPDX-License-Identifier: Apache-2.0 */
// Flattening of an LRec program into probabilistic branches
//   p(n) = S(n) + p(size1(n)) [+ p(size2(n))]
// with the joint distribution of (S, size1, size2, r) given by the branch list.
#ifndef PRRTAIL_CANONICAL_HPP_
#define PRRTAIL_CANONICAL_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prrtail/lrec.hpp"
#include "prrtail/sympoly.hpp"

namespace prrtail {

struct Branch {
  double prob = 1.0;
  Expr pre;
  std::optional<Poly> pre_poly;  // upper bound of pre as a pseudo-polynomial
  Dist dist;
  int r = 1;
  Expr size1;
  std::optional<Expr> size2;
  std::string var = "v";
};

struct CanonicalPrr {
  int cp = 1;
  std::vector<Branch> branches;
  std::vector<std::string> warnings;
};

CanonicalPrr to_canonical(const PrrAst& ast);

// Support of the sampled variable at size n with its probabilities.
std::vector<std::pair<double, double>> support(const Dist& d, long n);
std::string canonical_to_json(const CanonicalPrr& prr, int indent = 2);

}  // namespace prrtail

#endif  // PRRTAIL_CANONICAL_HPP_
