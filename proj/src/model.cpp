#include "ehsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ehsched {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput(msg);
}

void check_matrix(const Mat& m, int rows, int cols, const char* name) {
  std::ostringstream os;
  if (static_cast<int>(m.size()) != rows) {
    os << name << ": expected " << rows << " rows, got " << m.size();
    throw InvalidInput(os.str());
  }
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != cols) {
      os << name << ": ragged or wrongly sized row (expected " << cols << " columns)";
      throw InvalidInput(os.str());
    }
  }
}

}  // namespace

void Instance::validate() const {
  require(horizon >= 1, "K: horizon must be >= 1");
  require(num_transmitters >= 1, "N: need at least one transmitter");
  require(num_receivers >= num_transmitters, "M: need N <= M");
  check_matrix(channel_gains, num_receivers, horizon, "H");
  check_matrix(cumulative_harvest, num_transmitters, horizon, "E_cumulative");
  require(static_cast<int>(max_power.size()) == num_transmitters, "P: wrong length");
  require(static_cast<int>(battery_cap.size()) == num_transmitters, "B_max: wrong length");
  require(static_cast<int>(weights.size()) == num_receivers, "W: wrong length");
  require(static_cast<int>(receiver_map.size()) == num_transmitters, "receiver_map: wrong length");

  std::vector<int> seen(num_receivers, 0);
  for (const auto& set : receiver_map) {
    for (int m : set) {
      require(m >= 0 && m < num_receivers, "receiver_map: receiver id out of range");
      require(seen[m] == 0, "receiver_map: sets must be disjoint");
      seen[m] = 1;
    }
  }
  require(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }),
          "receiver_map: union must cover all receivers");

  for (int m = 0; m < num_receivers; ++m) {
    require(weights[m] >= 0.0, "W: weights must be nonnegative");
    for (int k = 0; k < horizon; ++k)
      require(channel_gains[m][k] >= 0.0, "H: gains must be nonnegative");
  }
  for (int n = 0; n < num_transmitters; ++n) {
    require(max_power[n] >= 0.0, "P: caps must be nonnegative");
    require(battery_cap[n] >= 0.0, "B_max: capacities must be nonnegative");
    double prev = 0.0;
    for (int k = 0; k < horizon; ++k) {
      require(cumulative_harvest[n][k] >= prev - 1e-12,
              "E_cumulative: must be nonnegative and nondecreasing in k");
      prev = cumulative_harvest[n][k];
    }
  }
}

int Instance::owner_of(int m) const {
  for (int n = 0; n < num_transmitters; ++n)
    for (int r : receiver_map[n])
      if (r == m) return n;
  throw InvalidInput("receiver " + std::to_string(m + 1) + " has no owner");
}

bool Instance::point_to_point() const {
  if (num_receivers != num_transmitters) return false;
  for (int n = 0; n < num_transmitters; ++n)
    if (receiver_map[n].size() != 1 || receiver_map[n][0] != n) return false;
  return true;
}

bool Instance::unit_weights(double tol) const {
  return std::all_of(weights.begin(), weights.end(),
                     [tol](double w) { return std::abs(w - 1.0) <= tol; });
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << constraint;
  if (transmitter > 0) os << " n=" << transmitter;
  if (link > 0) os << " m=" << link;
  if (slot > 0) os << " k=" << slot;
  os << " by " << magnitude;
  return os.str();
}

double rate_term(double a, double p, double H) {
  if (a <= 0.0) return 0.0;  // 0*ln(1 + x/0) = 0, even with p > 0
  return a * std::log1p(p * H / a);
}

double objective(const Instance& inst, const Allocation& alloc) {
  check_matrix(alloc.energy, inst.num_receivers, inst.horizon, "p");
  check_matrix(alloc.bandwidth, inst.num_receivers, inst.horizon, "a");
  double total = 0.0;
  for (int m = 0; m < inst.num_receivers; ++m) {
    double link = 0.0;
    for (int k = 0; k < inst.horizon; ++k)
      link += rate_term(alloc.bandwidth[m][k], alloc.energy[m][k], inst.channel_gains[m][k]);
    total += inst.weights[m] * link;
  }
  return total;
}

double objective_upper_bound(const Instance& inst) {
  double total = 0.0;
  for (int m = 0; m < inst.num_receivers; ++m) {
    const double cap = inst.max_power[inst.owner_of(m)];
    for (int k = 0; k < inst.horizon; ++k)
      total += inst.weights[m] * std::log1p(cap * inst.channel_gains[m][k]);
  }
  return total;
}

std::vector<Violation> check_feasible(const Instance& inst, const DischargePlan& plan,
                                      const Allocation& alloc, double eps, double tol) {
  if (eps < 0.0) throw InvalidInput("eps: must be nonnegative");
  check_matrix(alloc.energy, inst.num_receivers, inst.horizon, "p");
  check_matrix(alloc.bandwidth, inst.num_receivers, inst.horizon, "a");
  check_matrix(plan.effective_budget, inst.num_transmitters, inst.horizon, "E_tilde");

  std::vector<Violation> out;
  const int K = inst.horizon;

  for (int m = 0; m < inst.num_receivers; ++m)
    for (int k = 0; k < K; ++k) {
      if (alloc.energy[m][k] < -tol)
        out.push_back({"energy-nonneg", 0, m + 1, k + 1, -alloc.energy[m][k]});
      if (alloc.bandwidth[m][k] < eps - tol)
        out.push_back({"bandwidth-floor", 0, m + 1, k + 1, eps - alloc.bandwidth[m][k]});
    }

  for (int k = 0; k < K; ++k) {
    double sum_a = 0.0;
    for (int m = 0; m < inst.num_receivers; ++m) sum_a += alloc.bandwidth[m][k];
    if (std::abs(sum_a - 1.0) > tol)
      out.push_back({"simplex", 0, 0, k + 1, std::abs(sum_a - 1.0)});
  }

  for (int n = 0; n < inst.num_transmitters; ++n) {
    double cum = 0.0;
    for (int k = 0; k < K; ++k) {
      double slot = 0.0;
      for (int m : inst.receiver_map[n]) slot += alloc.energy[m][k];
      if (slot > inst.max_power[n] + tol)
        out.push_back({"power-cap", n + 1, 0, k + 1, slot - inst.max_power[n]});
      cum += slot;
      const double upper = plan.effective_budget[n][k];
      const double lower = upper - inst.battery_cap[n];
      if (cum > upper + tol)
        out.push_back({"energy-causality", n + 1, 0, k + 1, cum - upper});
      if (cum < lower - tol)
        out.push_back({"battery-overflow", n + 1, 0, k + 1, lower - cum});
    }
  }
  return out;
}

BatteryTrajectory battery_trajectory(const Instance& inst, const DischargePlan& plan,
                                     const Allocation& alloc, int n, double tol) {
  BatteryTrajectory traj;
  traj.levels.resize(inst.horizon);
  double level = 0.0;  // battery is empty initially
  for (int k = 0; k < inst.horizon; ++k) {
    double consumed = 0.0;
    for (int m : inst.receiver_map[n]) consumed += alloc.energy[m][k];
    level += inst.harvest_increment(n, k) - consumed - plan.discharge[n][k];
    traj.levels[k] = level;
    if (!traj.first_exit && (level < -tol || level > inst.battery_cap[n] + tol))
      traj.first_exit = k + 1;
  }
  return traj;
}

}  // namespace ehsched
