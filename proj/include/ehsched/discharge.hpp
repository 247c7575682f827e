#pragma once

#include "ehsched/model.hpp"

namespace ehsched {

// First-stage greedy discharge plan: per slot each transmitter consumes
// min{P_n, B^{k-1} + dE^k} and discharges only what would still overflow
// the battery. Returns D and the effective budgets E_tilde.
DischargePlan greedy_discharge(const Instance& inst);

// Minimum total discharge for transmitter n over all plans on a grid of the
// given resolution, where a plan is feasible iff the battery band holds
// under max-power consumption. Exhaustive with pruning; tiny horizons only.
double min_total_discharge(const Instance& inst, int n, double resolution);

// True iff sum_k D[n][k] matches the enumeration minimum for every
// transmitter. Exact at grid points, so intended for instances whose data
// are multiples of the resolution.
bool discharge_is_minimal(const Instance& inst, const DischargePlan& plan,
                          double resolution = 0.25, double tol = 1e-9);

}  // namespace ehsched
