/* SPDX-License-Identifier: Apache-2.0 */
// Decides canonical constraints: for all sufficiently large alpha and all
// n >= c_p, sum_i gamma_i * exp(f_i(alpha) + g_i(n)) <= 1.
#ifndef PRRTAIL_DECIDER_HPP_
#define PRRTAIL_DECIDER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "prrtail/strengthener.hpp"

namespace prrtail {

inline constexpr double kDecideEps = 1e-9;
// Largest n-scan bound accepted; beyond it the constraint is rejected.
inline constexpr long kDecideScanCap = 1000000;

struct DecideReport {
  bool verdict = false;
  long T_n = 0;
  struct Limit {
    long n = 0;
    double R = 0;  // +inf when some exponent diverges
    bool boundary = false;
  };
  std::vector<Limit> per_n_limits;  // the first entries of the scan and every failure
  std::optional<std::pair<long, int>> failure_witness;  // (n, term index or -1)
  std::string reason;
  std::string to_json(int indent = 2) const;
};

// Terms only (n >= q.cp).
DecideReport decide_general(const CanonicalConstraint& q);
// Point constraints of the exact prefix only.
DecideReport decide_prefix(const CanonicalConstraint& q);
// Both; the general part is checked first.
DecideReport decide(const CanonicalConstraint& q);

}  // namespace prrtail

#endif  // PRRTAIL_DECIDER_HPP_
