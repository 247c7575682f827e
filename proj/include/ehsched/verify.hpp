#pragma once

#include <vector>

#include "ehsched/model.hpp"

namespace ehsched {

// Residuals of the optimality system, grouped by condition family. All duals
// are recovered from the primal allocation alone, so certification is
// independent of whichever solver produced it. Stationarity residuals are in
// energy units (filling-rule form) on the energy side and nats on the
// bandwidth side; complementarity residuals are multiplier * slack.
struct KktReport {
  double stationarity_energy = 0.0;
  double stationarity_bandwidth = 0.0;
  double comp_lambda = 0.0;  // cumulative-budget upper constraint
  double comp_mu = 0.0;      // battery no-overflow constraint
  double comp_alpha = 0.0;   // per-slot bandwidth simplex
  double comp_beta = 0.0;    // bandwidth floor
  double dual_feasibility = 0.0;
  double max_residual = 0.0;

  bool certified(double tol) const { return max_residual <= tol; }
};

// Certification tolerance scaled per the instance, in nats/energy units.
double default_kkt_tolerance(const Instance& inst, double base = 1e-4);

// Thrown instead of a report when the allocation is not even feasible.
class InfeasibleAllocation : public std::runtime_error {
 public:
  InfeasibleAllocation(std::string what, std::vector<Violation> v)
      : std::runtime_error(std::move(what)), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

// Evaluates the full optimality system of the eps-floored problem at the
// given allocation. Max residual below tolerance certifies global optimality
// by convexity. Weights and multi-receiver maps are honoured.
KktReport kkt_residual(const Instance& inst, const DischargePlan& plan, const Allocation& alloc,
                       double eps, double feas_tol = 1e-6);

struct GridOracleResult {
  double best_objective = 0.0;
  Allocation best;
  double lipschitz_gap = 0.0;  // bound on how far the true optimum can exceed best_objective
};

// Exhaustive search over energy on a cumulative grid of the given resolution
// and bandwidth on a per-slot simplex grid with floor eps. Enforces
// M <= 3 and K <= 3. Lower-bound certificate plus near-optimality witness.
GridOracleResult grid_oracle(const Instance& inst, double eps, double resolution);

struct ReferenceOptions {
  int max_iters = 200000;
  double grad_map_tol = 1e-6;
  double step0 = -1.0;                     // <= 0 picks a curvature-based default
  std::optional<Allocation> warm_start;
};

struct ReferenceResult {
  Allocation alloc;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Projected gradient ascent on the eps-restricted problem with diminishing
// steps: bandwidth projects onto the floored simplex per slot, energy onto
// the per-transmitter box-and-band polytope by cyclic projection. Slow but
// solver-independent; outputs are meant to be certified by kkt_residual.
ReferenceResult reference_solve(const Instance& inst, double eps,
                                const ReferenceOptions& opts = {});

}  // namespace ehsched
