#include "ehsched/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ehsched/discharge.hpp"

namespace ehsched {

namespace {

constexpr double kBig = 1e30;
constexpr double kTransmitTol = 1e-9;  // p above this counts as transmitting

double median(Vec v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Energy the filling rule asks of receiver m at dual level q (per unit of
// its own weight and gain); unbounded when q is at the singular origin.
double desired_energy(double a, double H, double W, double q) {
  if (H <= 0.0 || a <= 0.0 || W <= 0.0) return 0.0;
  if (q <= 1e-300) return kBig;
  const double lift = W / q - 1.0 / H;
  if (lift <= 0.0) return 0.0;
  return std::min(a * lift, kBig);
}

}  // namespace

double default_kkt_tolerance(const Instance& inst, double base) {
  double max_gain = 0.0;
  for (const auto& row : inst.channel_gains)
    for (double h : row) max_gain = std::max(max_gain, h);
  return base * std::max(1.0, max_gain);
}

KktReport kkt_residual(const Instance& inst, const DischargePlan& plan, const Allocation& alloc,
                       double eps, double feas_tol) {
  auto violations = check_feasible(inst, plan, alloc, eps, feas_tol);
  if (!violations.empty()) {
    std::string what = "kkt_residual: allocation infeasible (" +
                       std::to_string(violations.size()) + " violations, first: " +
                       violations.front().describe() + ")";
    throw InfeasibleAllocation(std::move(what), std::move(violations));
  }

  KktReport rep;
  const int K = inst.horizon;

  // ---- energy side, one transmitter at a time ----
  for (int n = 0; n < inst.num_transmitters; ++n) {
    const auto& members = inst.receiver_map[n];
    const double P = inst.max_power[n];
    const double B_max = inst.battery_cap[n];

    Vec slot_sum(K, 0.0), battery(K, 0.0);
    std::vector<char> capped(K, 0);
    double cum = 0.0;
    for (int k = 0; k < K; ++k) {
      for (int m : members) slot_sum[k] += alloc.energy[m][k];
      cum += slot_sum[k];
      battery[k] = plan.effective_budget[n][k] - cum;
      capped[k] = slot_sum[k] >= P - 1e-9 * std::max(1.0, P) ? 1 : 0;
    }
    const double btol = feas_tol * std::max(1.0, B_max);

    // Segments split after every slot whose battery is pinned at a bound.
    std::vector<int> seg_end;  // exclusive end indices
    for (int k = 0; k + 1 < K; ++k)
      if (std::abs(battery[k]) <= btol || std::abs(battery[k] - B_max) <= btol)
        seg_end.push_back(k + 1);
    seg_end.push_back(K);

    // Sum of the rule's demand across the transmitter's receivers in slot k.
    auto slot_desired = [&](int k, double q) {
      double total = 0.0;
      for (int m : members)
        total += desired_energy(alloc.bandwidth[m][k], inst.channel_gains[m][k],
                                inst.weights[m], q);
      return total;
    };
    // Largest q at which the capped slot's demand still reaches P.
    auto cap_level = [&](int k) {
      double lo = 1e-12, hi = 0.0;
      for (int m : members) hi = std::max(hi, inst.weights[m] * inst.channel_gains[m][k]);
      if (hi <= lo || slot_desired(k, lo) < P) return 0.0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slot_desired(k, mid) >= P ? lo : hi) = mid;
      }
      return lo;
    };

    // Dual level per segment: median of the uncapped transmitting anchors
    // when present, else the right-neighbour value clamped into the bracket
    // the inactive slots admit.
    const int n_seg = static_cast<int>(seg_end.size());
    Vec seg_q(n_seg, 0.0);
    for (int s = n_seg - 1; s >= 0; --s) {
      const int lo_k = s == 0 ? 0 : seg_end[s - 1];
      const int hi_k = seg_end[s];
      Vec anchors;
      for (int k = lo_k; k < hi_k; ++k) {
        if (capped[k]) continue;
        for (int m : members) {
          const double p = alloc.energy[m][k];
          const double a = alloc.bandwidth[m][k];
          const double H = inst.channel_gains[m][k];
          if (p > kTransmitTol && H > 0.0 && a > 0.0)
            anchors.push_back(inst.weights[m] / (p / a + 1.0 / H));
        }
      }
      if (!anchors.empty()) {
        seg_q[s] = median(std::move(anchors));
        continue;
      }
      double floor_q = 0.0, ceil_q = std::numeric_limits<double>::infinity();
      for (int k = lo_k; k < hi_k; ++k) {
        if (capped[k]) {
          ceil_q = std::min(ceil_q, cap_level(k));
          continue;
        }
        for (int m : members)
          if (alloc.energy[m][k] <= kTransmitTol)
            floor_q = std::max(floor_q, inst.weights[m] * inst.channel_gains[m][k]);
      }
      const double target = s + 1 < n_seg ? seg_q[s + 1] : 0.0;
      seg_q[s] = std::max(std::min(target, ceil_q), floor_q);
    }

    Vec q(K, 0.0);
    for (int s = 0; s < n_seg; ++s)
      for (int k = (s == 0 ? 0 : seg_end[s - 1]); k < seg_end[s]; ++k) q[k] = seg_q[s];

    // Per-slot cap multiplier: shift the level until the rule's demand
    // matches the cap, then measure the per-receiver mismatch.
    for (int k = 0; k < K; ++k) {
      double theta = 0.0;
      if (capped[k]) {
        double lo = 0.0, hi = 1.0;
        for (int m : members)
          hi = std::max(hi, inst.weights[m] * inst.channel_gains[m][k] - q[k] + 1.0);
        if (slot_desired(k, q[k]) >= P) {
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (slot_desired(k, q[k] + mid) >= P ? lo : hi) = mid;
          }
          theta = lo;
        }
      }
      for (int m : members) {
        const double want = desired_energy(alloc.bandwidth[m][k], inst.channel_gains[m][k],
                                           inst.weights[m], q[k] + theta);
        const double p = alloc.energy[m][k];
        const double r = p > kTransmitTol ? std::abs(p - want) : want;
        rep.stationarity_energy = std::max(rep.stationarity_energy, r);
      }
      rep.dual_feasibility = std::max(rep.dual_feasibility, -q[k]);
    }

    // Multipliers of the cumulative band live in the level jumps; they must
    // sit on the matching battery pin.
    for (int k = 0; k + 1 < K; ++k) {
      const double drop = std::max(q[k] - q[k + 1], 0.0);
      const double rise = std::max(q[k + 1] - q[k], 0.0);
      rep.comp_lambda = std::max(rep.comp_lambda, drop * std::abs(battery[k]));
      rep.comp_mu = std::max(rep.comp_mu, rise * std::abs(B_max - battery[k]));
    }
    rep.comp_lambda = std::max(rep.comp_lambda, std::max(q[K - 1], 0.0) * std::abs(battery[K - 1]));
    rep.comp_mu =
        std::max(rep.comp_mu, std::max(-q[K - 1], 0.0) * std::abs(B_max - battery[K - 1]));
  }

  // ---- bandwidth side, one slot at a time ----
  const double atol = 1e-8;
  for (int k = 0; k < K; ++k) {
    Vec f(inst.num_receivers, 0.0);
    Vec active_f;
    double sum_a = 0.0;
    for (int m = 0; m < inst.num_receivers; ++m) {
      const double a = alloc.bandwidth[m][k];
      sum_a += a;
      if (a > 0.0) {
        const double r = alloc.energy[m][k] * inst.channel_gains[m][k] / a;
        f[m] = inst.weights[m] * (std::log1p(r) - r / (1.0 + r));
      }
      if (a > eps + atol) active_f.push_back(f[m]);
    }
    const double alpha =
        !active_f.empty() ? median(std::move(active_f)) : *std::max_element(f.begin(), f.end());
    for (int m = 0; m < inst.num_receivers; ++m) {
      const double a = alloc.bandwidth[m][k];
      if (a > eps + atol) {
        rep.stationarity_bandwidth = std::max(rep.stationarity_bandwidth, std::abs(f[m] - alpha));
      } else if (a > 0.0) {
        rep.stationarity_bandwidth = std::max(rep.stationarity_bandwidth, f[m] - alpha);
        rep.comp_beta = std::max(rep.comp_beta, std::max(alpha - f[m], 0.0) * std::abs(a - eps));
      }
    }
    rep.comp_alpha = std::max(rep.comp_alpha, std::abs(alpha) * std::abs(sum_a - 1.0));
  }

  rep.max_residual = std::max({rep.stationarity_energy, rep.stationarity_bandwidth,
                               rep.comp_lambda, rep.comp_mu, rep.comp_alpha, rep.comp_beta,
                               rep.dual_feasibility});
  return rep;
}

}  // namespace ehsched
