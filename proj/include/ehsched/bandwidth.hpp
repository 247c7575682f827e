#pragma once

#include <span>
#include <vector>

#include "ehsched/common.hpp"

namespace ehsched {

// One iteration boundary of the fitting loop, kept so property tests can
// check the floor-dominance condition and the ratio monotonicity after
// every iteration, not just at exit.
struct FitIteration {
  std::vector<int> floored;  // sorted link ids in the floored set
  double ratio = 0.0;        // (1 - |floored|*eps) / sum of active pH
};

struct BandwidthFit {
  Vec a;
  bool degenerate = false;  // sum pH = 0: caller keeps a uniform slot
  int iterations = 0;
  std::vector<FitIteration> trace;
};

// Iterative bandwidth fitting for one slot. Active links receive shares
// proportional to pH scaled by the unfloored mass; any active link whose
// recomputed share falls to or below eps is floored, one-directionally,
// until no violations remain. Terminates in at most N iterations.
// Requires 0 <= eps and N*eps <= 1.
BandwidthFit fit_bandwidth_detailed(std::span<const double> pH, double eps);

// Shorthand returning only the shares (uniform when degenerate).
Vec fit_bandwidth(std::span<const double> pH, double eps);

// Optimality certificate for one slot: proportional shares on the active
// set and floor dominance on the floored set, both within tol.
bool verify_theorem4(std::span<const double> pH, double eps, std::span<const double> a,
                     double tol = 1e-9);

}  // namespace ehsched
