#include "ehsched/discharge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ehsched {

DischargePlan greedy_discharge(const Instance& inst) {
  inst.validate();
  DischargePlan plan;
  plan.discharge = make_mat(inst.num_transmitters, inst.horizon);
  plan.effective_budget = make_mat(inst.num_transmitters, inst.horizon);

  for (int n = 0; n < inst.num_transmitters; ++n) {
    double battery = 0.0;
    double wasted = 0.0;
    for (int k = 0; k < inst.horizon; ++k) {
      const double avail = battery + inst.harvest_increment(n, k);
      const double consumed = std::min(inst.max_power[n], avail);
      const double d = std::max(avail - consumed - inst.battery_cap[n], 0.0);
      plan.discharge[n][k] = d;
      wasted += d;
      battery = avail - consumed - d;
      plan.effective_budget[n][k] = inst.cumulative_harvest[n][k] - wasted;
    }
  }
  return plan;
}

namespace {

// Depth-first search over per-slot discharge choices on the grid, carrying
// the battery level under max-power consumption and pruning branches that
// already waste at least the incumbent.
struct DischargeSearch {
  const Instance& inst;
  int n;
  double res;
  double best = std::numeric_limits<double>::infinity();

  void recurse(int k, double battery, double total) {
    if (total >= best - 1e-12) return;
    if (k == inst.horizon) {
      best = total;
      return;
    }
    const double avail = battery + inst.harvest_increment(n, k);
    const int steps = static_cast<int>(std::floor(avail / res + 1e-9));
    for (int i = 0; i <= steps; ++i) {
      const double d = i * res;
      const double after_discharge = avail - d;
      if (after_discharge < -1e-12) break;
      const double consumed = std::min(inst.max_power[n], after_discharge);
      const double next = after_discharge - consumed;
      if (next > inst.battery_cap[n] + 1e-9) continue;  // overflow even at max power
      recurse(k + 1, next, total + d);
    }
  }
};

}  // namespace

double min_total_discharge(const Instance& inst, int n, double resolution) {
  if (resolution <= 0.0) throw InvalidInput("resolution: must be positive");
  if (inst.horizon > 6) throw SizeError("min_total_discharge: horizon too large for enumeration");
  DischargeSearch search{inst, n, resolution};
  search.recurse(0, 0.0, 0.0);
  if (!std::isfinite(search.best))
    throw InfeasibleError("min_total_discharge: no feasible discharge plan on grid");
  return search.best;
}

bool discharge_is_minimal(const Instance& inst, const DischargePlan& plan, double resolution,
                          double tol) {
  for (int n = 0; n < inst.num_transmitters; ++n) {
    double total = 0.0;
    for (int k = 0; k < inst.horizon; ++k) total += plan.discharge[n][k];
    if (std::abs(total - min_total_discharge(inst, n, resolution)) > tol) return false;
  }
  return true;
}

}  // namespace ehsched
