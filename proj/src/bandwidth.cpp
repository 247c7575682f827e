#include "ehsched/bandwidth.hpp"

#include <algorithm>
#include <cmath>

namespace ehsched {

BandwidthFit fit_bandwidth_detailed(std::span<const double> pH, double eps) {
  const int n = static_cast<int>(pH.size());
  if (n == 0) throw InvalidInput("fit_bandwidth: empty slot");
  if (eps < 0.0) throw InvalidInput("fit_bandwidth: eps must be nonnegative");
  if (n * eps > 1.0 + 1e-12) throw InvalidInput("fit_bandwidth: N*eps > 1, eps-simplex is empty");
  for (double v : pH)
    if (v < 0.0) throw InvalidInput("fit_bandwidth: pH must be nonnegative");

  BandwidthFit fit;
  fit.a.assign(n, 0.0);

  std::vector<char> floored(n, 0);
  int n_floored = 0;
  double active_mass = 0.0;
  for (int i = 0; i < n; ++i) {
    if (pH[i] > 0.0) {
      active_mass += pH[i];
    } else {
      floored[i] = 1;
      ++n_floored;
    }
  }
  if (active_mass == 0.0) {
    fit.degenerate = true;
    fit.a.assign(n, 1.0 / n);
    return fit;
  }

  while (true) {
    ++fit.iterations;
    const double free_mass = 1.0 - n_floored * eps;
    const double ratio = free_mass / active_mass;
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      if (floored[i]) {
        fit.a[i] = eps;
        continue;
      }
      fit.a[i] = ratio * pH[i];
      if (fit.a[i] <= eps) {  // ties at exactly eps are floored
        floored[i] = 1;
        ++n_floored;
        active_mass -= pH[i];
        moved = true;
      }
    }
    FitIteration snap;
    snap.ratio = ratio;
    for (int i = 0; i < n; ++i)
      if (floored[i]) snap.floored.push_back(i);
    fit.trace.push_back(std::move(snap));
    if (!moved) break;
    if (active_mass <= 0.0) {  // only possible when N*eps == 1
      std::fill(fit.a.begin(), fit.a.end(), eps);
      break;
    }
  }
  return fit;
}

Vec fit_bandwidth(std::span<const double> pH, double eps) {
  return fit_bandwidth_detailed(pH, eps).a;
}

bool verify_theorem4(std::span<const double> pH, double eps, std::span<const double> a,
                     double tol) {
  const int n = static_cast<int>(pH.size());
  if (static_cast<int>(a.size()) != n) return false;

  double sum_a = 0.0;
  double active_mass = 0.0;
  int n_floored = 0;
  for (int i = 0; i < n; ++i) {
    sum_a += a[i];
    if (a[i] < eps - tol) return false;
    if (a[i] > eps + tol) {
      active_mass += pH[i];
    } else {
      ++n_floored;
    }
  }
  if (std::abs(sum_a - 1.0) > std::max(tol, 1e-9)) return false;

  const double free_mass = 1.0 - n_floored * eps;
  for (int i = 0; i < n; ++i) {
    const double share = active_mass > 0.0 ? free_mass * pH[i] / active_mass : 0.0;
    if (a[i] > eps + tol) {
      if (std::abs(a[i] - share) > tol) return false;  // proportionality on the active set
    } else {
      if (share > eps + tol) return false;  // floor dominance
    }
  }
  return true;
}

}  // namespace ehsched
