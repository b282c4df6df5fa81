/* SPDX-License-Identifier: Apache-2.0 */
#ifndef PRRTAIL_TESTS_RANDOM_POLY_HPP_
#define PRRTAIL_TESTS_RANDOM_POLY_HPP_

#include <random>
#include <vector>

#include "prrtail/sympoly.hpp"

namespace prrtail::testing {

// Random pseudo-polynomial over the given symbols with |exponents| <= maxe.
inline Poly random_poly(std::mt19937_64& rng, std::vector<Sym> syms, int max_terms = 4,
                        int maxe = 2, double maxc = 5.0) {
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<int> ex(-maxe, maxe);
  std::uniform_real_distribution<double> co(-maxc, maxc);
  Poly p;
  int k = nterms(rng);
  for (int i = 0; i < k; ++i) {
    Exps e{};
    for (Sym s : syms) {
      e[2 * static_cast<int>(s)] = ex(rng);
      e[2 * static_cast<int>(s) + 1] = ex(rng);
    }
    p += Poly::monomial(co(rng), e);
  }
  return p;
}

// Same polynomial with absolute coefficients; bounds rounding error scale.
inline Poly abs_poly(const Poly& p) {
  Poly r;
  for (const Mono& m : p.terms()) r += Poly::monomial(std::abs(m.coeff), m.e);
  return r;
}

}  // namespace prrtail::testing

#endif  // PRRTAIL_TESTS_RANDOM_POLY_HPP_
