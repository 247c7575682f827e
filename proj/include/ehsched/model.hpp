#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ehsched/common.hpp"

namespace ehsched {

// Static problem data for one scheduling period.
//
// Slots are 1..K externally; all vectors here are 0-based with slot k stored
// at index k-1 and E[n][0] = 0 implicit. Receivers in receiver_map are
// 0-based internally (1-based in the JSON form).
struct Instance {
  int num_transmitters = 0;  // N
  int num_receivers = 0;     // M
  int horizon = 0;           // K

  std::vector<std::vector<int>> receiver_map;  // M_n, partition of {0..M-1}
  Mat channel_gains;                           // H[m][k] = |h_mk|^2, M x K
  Mat cumulative_harvest;                      // E[n][k], N x K, nondecreasing in k
  Vec max_power;                               // P[n], per-slot cap on sum over M_n
  Vec battery_cap;                             // B_max[n]
  Vec weights;                                 // W[m]

  // Throws InvalidInput naming the offending field.
  void validate() const;

  // Transmitter owning receiver m.
  int owner_of(int m) const;

  // True iff M == N and M_n = {n} for every n (the fast-path configuration).
  bool point_to_point() const;
  bool unit_weights(double tol = 0.0) const;

  double harvest_increment(int n, int k) const {
    return cumulative_harvest[n][k] - (k > 0 ? cumulative_harvest[n][k - 1] : 0.0);
  }
};

// Decision variables: energy p[m][k] and bandwidth share a[m][k], both M x K.
struct Allocation {
  Mat energy;
  Mat bandwidth;
};

// First-stage output: discharge D[n][k] >= 0 and effective budget
// E_tilde[n][k] = E[n][k] - sum_{kappa<=k} D[n][kappa].
struct DischargePlan {
  Mat discharge;
  Mat effective_budget;
};

// One violated constraint, with enough context to locate and rank it.
// Indices are reported 1-based to match the external slot convention.
struct Violation {
  std::string constraint;  // e.g. "energy-causality", "simplex"
  int transmitter = 0;     // 0 when not transmitter-scoped
  int link = 0;            // 0 when not link-scoped
  int slot = 0;            // 0 when not slot-scoped
  double magnitude = 0.0;

  std::string describe() const;
};

struct BatteryTrajectory {
  Vec levels;                      // B_n^k for k = 1..K
  std::optional<int> first_exit;   // first slot (1-based) outside [0, B_max]
};

// Weighted sum-rate sum_m W_m sum_k a*ln(1 + p*H/a) in nats, with the
// convention 0*ln(1 + x/0) = 0. Throws InvalidInput on dimension mismatch.
double objective(const Instance& inst, const Allocation& alloc);

// Single-link rate term a*ln(1 + p*H/a), same zero-bandwidth convention.
double rate_term(double a, double p, double H);

// All constraints of the eps-floored second-stage problem, as data:
// cumulative energy band, per-slot power cap, bandwidth simplex with floor
// eps, and nonnegativity. Empty result means feasible within tol.
std::vector<Violation> check_feasible(const Instance& inst, const DischargePlan& plan,
                                      const Allocation& alloc, double eps,
                                      double tol = kFeasTol);

// Battery recursion for transmitter n with B_n^0 = 0.
BatteryTrajectory battery_trajectory(const Instance& inst, const DischargePlan& plan,
                                     const Allocation& alloc, int n, double tol = kFeasTol);

// sum_m W_m sum_k ln(1 + P_owner(m) * H[m][k]); every feasible allocation's
// objective sits below this.
double objective_upper_bound(const Instance& inst);

}  // namespace ehsched
