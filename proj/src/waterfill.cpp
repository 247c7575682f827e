#include "ehsched/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ehsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fill_at(std::span<const double> a, std::span<const double> H, double P, double w) {
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (H[k] <= 0.0) continue;
    const double lift = w - 1.0 / H[k];
    if (lift > 0.0) total += std::min(P, a[k] * lift);
  }
  return total;
}

Vec energy_at(std::span<const double> a, std::span<const double> H, double P, double w) {
  Vec p(a.size(), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (H[k] <= 0.0) continue;
    const double lift = w - 1.0 / H[k];
    if (lift > 0.0) p[k] = std::min(P, a[k] * lift);
  }
  return p;
}

}  // namespace

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::BDP: return "BDP";
    case BoundaryKind::BFP: return "BFP";
    case BoundaryKind::End: return "END";
  }
  return "?";
}

SegmentFill segment_water_level(std::span<const double> a, std::span<const double> H, double P,
                                double S) {
  const std::size_t len = a.size();
  if (len == 0 || H.size() != len) throw InvalidInput("segment: empty or mismatched slices");
  if (P < 0.0) throw InvalidInput("segment: negative power cap");
  for (double ak : a)
    if (!(ak > 0.0)) throw InvalidInput("segment: bandwidth must be positive on every slot");

  int n_pos = 0;
  double min_inv_gain = kInf;
  double max_inv_gain = 0.0;
  double min_a = kInf;
  for (std::size_t k = 0; k < len; ++k) {
    min_a = std::min(min_a, a[k]);
    if (H[k] > 0.0) {
      ++n_pos;
      min_inv_gain = std::min(min_inv_gain, 1.0 / H[k]);
      max_inv_gain = std::max(max_inv_gain, 1.0 / H[k]);
    }
  }

  if (S < -1e-12 || S > static_cast<double>(len) * P + 1e-9)
    throw InfeasibleError("segment: target outside [0, len*P]");
  S = std::max(S, 0.0);

  SegmentFill out;
  if (S == 0.0) {
    out.water_level = n_pos > 0 ? min_inv_gain : 0.0;
    out.energy.assign(len, 0.0);
    return out;
  }
  const double reachable = static_cast<double>(n_pos) * P;  // inf-safe: 0*inf avoided below
  if (n_pos == 0) throw InfeasibleError("segment: positive target but all gains are zero");

  if (std::isfinite(P) && S >= reachable - 1e-12) {
    // Every positive-gain slot capped; report the smallest consistent level.
    double w = 0.0;
    out.energy.assign(len, 0.0);
    for (std::size_t k = 0; k < len; ++k)
      if (H[k] > 0.0) {
        out.energy[k] = P;
        w = std::max(w, 1.0 / H[k] + P / a[k]);
      }
    out.water_level = w;
    return out;
  }

  double lo = 0.0;
  double hi = max_inv_gain + S / min_a;
  if (std::isfinite(P)) hi += P * static_cast<double>(len);
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    (fill_at(a, H, P, mid) < S ? lo : hi) = mid;
  }
  double w = 0.5 * (lo + hi);

  // One exact solve on the linear piece the bisection landed on.
  double active_a = 0.0, active_ratio = 0.0, capped = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    if (H[k] <= 0.0) continue;
    const double lift = a[k] * (w - 1.0 / H[k]);
    if (lift >= P) {
      capped += P;
    } else if (lift > 0.0) {
      active_a += a[k];
      active_ratio += a[k] / H[k];
    }
  }
  if (active_a > 0.0) {
    const double exact = (S - capped + active_ratio) / active_a;
    if (std::abs(fill_at(a, H, P, exact) - S) <= std::abs(fill_at(a, H, P, w) - S)) w = exact;
  }

  out.water_level = w;
  out.energy = energy_at(a, H, P, w);
  return out;
}

namespace {

struct SegmentState {
  std::vector<Boundary> bounds;  // strictly increasing 1-based end slots, last at K
  Vec water;                     // per segment
  Mat energy;                    // per segment slice
};

// Target consumption of the segment ending at bounds[i], per the boundary
// energy identity: cumulative budget difference plus the declared battery
// levels at both edges, capped by total per-slot power.
double segment_target(const EpInput& in, const std::vector<Boundary>& bounds, std::size_t i) {
  const int hi = bounds[i].slot;
  const int lo = i == 0 ? 0 : bounds[i - 1].slot;
  const double e_hi = in.E_tilde[hi - 1];
  const double e_lo = lo == 0 ? 0.0 : in.E_tilde[lo - 1];
  const double b_left = (i > 0 && bounds[i - 1].kind == BoundaryKind::BFP) ? in.B_max : 0.0;
  const double b_right = bounds[i].kind == BoundaryKind::BFP ? in.B_max : 0.0;
  const double raw = e_hi - e_lo + b_left - b_right;
  return std::clamp(raw, 0.0, static_cast<double>(hi - lo) * in.P);
}

// Water-fill one segment; when the target exceeds what positive-gain slots
// can carry, the leftover is forced onto zero-gain slots in tie order (the
// choice cannot change the objective).
SegmentFill fill_segment(std::span<const double> a, std::span<const double> H, double P, double S,
                         TieBreak tie) {
  int n_pos = 0;
  for (double h : H)
    if (h > 0.0) ++n_pos;
  const double reachable = static_cast<double>(n_pos) * P;
  if (n_pos == static_cast<int>(a.size()) || S <= reachable + 1e-12)
    return segment_water_level(a, H, P, std::min(S, reachable));

  SegmentFill out;
  out.energy.assign(a.size(), 0.0);
  out.water_level = 0.0;
  double remaining = S - reachable;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (H[k] > 0.0) {
      out.energy[k] = P;
      out.water_level = std::max(out.water_level, 1.0 / H[k] + P / a[k]);
    }
  for (std::size_t step = 0; step < a.size() && remaining > 1e-12; ++step) {
    const std::size_t k = tie == TieBreak::EarliestSlot ? step : a.size() - 1 - step;
    if (H[k] > 0.0) continue;
    const double take = std::min(P, remaining);
    out.energy[k] = take;
    remaining -= take;
  }
  if (remaining > 1e-9) throw InfeasibleError("segment: forced consumption exceeds slot caps");
  return out;
}

void solve_all_segments(const EpInput& in, SegmentState& st, TieBreak tie) {
  st.water.assign(st.bounds.size(), 0.0);
  st.energy.assign(st.bounds.size(), Vec{});
  for (std::size_t i = 0; i < st.bounds.size(); ++i) {
    const int lo = i == 0 ? 0 : st.bounds[i - 1].slot;
    const int hi = st.bounds[i].slot;
    const double target = segment_target(in, st.bounds, i);
    std::span<const double> a(in.a.data() + lo, hi - lo);
    std::span<const double> H(in.H.data() + lo, hi - lo);
    SegmentFill fill = fill_segment(a, H, in.P, target, tie);
    st.water[i] = fill.water_level;
    st.energy[i] = std::move(fill.energy);
  }
}

Vec assemble_energy(const SegmentState& st, int K) {
  Vec p;
  p.reserve(K);
  for (const auto& seg : st.energy) p.insert(p.end(), seg.begin(), seg.end());
  return p;
}

Vec battery_levels(const EpInput& in, const Vec& p) {
  Vec B(p.size());
  double consumed = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    consumed += p[k];
    B[k] = in.E_tilde[k] - consumed;
  }
  return B;
}

void check_band_nonempty(const EpInput& in) {
  // Maximal nondecreasing consumption trajectory against the running-min of
  // the budget; the band is nonempty iff it clears every lower bound.
  const int K = static_cast<int>(in.E_tilde.size());
  Vec ceiling(K);
  double run = kInf;
  for (int k = K - 1; k >= 0; --k) {
    run = std::min(run, in.E_tilde[k]);
    ceiling[k] = run;
  }
  double c = 0.0;
  for (int k = 0; k < K; ++k) {
    c = std::min(ceiling[k], c + in.P);
    if (c < -1e-12 || c < in.E_tilde[k] - in.B_max - 1e-9) {
      std::ostringstream os;
      os << "EP infeasible: cumulative constraint at slot " << (k + 1)
         << " (budget " << in.E_tilde[k] << ", max reachable " << c << ")";
      throw InfeasibleError(os.str());
    }
  }
}

}  // namespace

EpResult solve_ep(const EpInput& in, TieBreak tie) {
  const int K = static_cast<int>(in.a.size());
  if (K == 0 || in.H.size() != in.a.size() || in.E_tilde.size() != in.a.size())
    throw InvalidInput("solve_ep: mismatched slice lengths");
  for (double ak : in.a)
    if (!(ak > 0.0)) throw InvalidInput("solve_ep: bandwidth must be positive on every slot");
  if (in.P < 0.0 || in.B_max < 0.0) throw InvalidInput("solve_ep: negative cap");
  check_band_nonempty(in);

  const double scale = std::max({1.0, in.B_max, in.E_tilde.back()});
  const double vtol = 1e-9 * scale;

  SegmentState st;
  st.bounds = {{K, BoundaryKind::End}};

  const int max_ops = 40 * K + 200;
  for (int op = 0;; ++op) {
    if (op > max_ops) throw InfeasibleError("solve_ep: boundary refinement did not settle");
    solve_all_segments(in, st, tie);
    const Vec p = assemble_energy(st, K);
    const Vec B = battery_levels(in, p);

    // Worst battery violation; positive magnitude = underflow, negative = overflow.
    int worst_slot = -1;
    double worst_mag = vtol;
    bool worst_under = false;
    for (int k = 0; k < K; ++k) {
      const double under = -B[k];
      const double over = B[k] - in.B_max;
      const double mag = std::max(under, over);
      const bool better = tie == TieBreak::EarliestSlot ? mag > worst_mag
                                                        : mag >= worst_mag && mag > vtol;
      if (better) {
        worst_mag = mag;
        worst_slot = k;
        worst_under = under > over;
      }
    }
    if (worst_slot >= 0) {
      const int slot = worst_slot + 1;  // 1-based boundary position
      const BoundaryKind kind = worst_under ? BoundaryKind::BDP : BoundaryKind::BFP;
      auto it = std::find_if(st.bounds.begin(), st.bounds.end(),
                             [slot](const Boundary& b) { return b.slot >= slot; });
      if (it->slot == slot) {
        if (it->kind == BoundaryKind::End)
          throw InfeasibleError("solve_ep: horizon-end battery violation after band check");
        it->kind = kind;  // target was power-clamped; re-pin to the violated side
      } else {
        st.bounds.insert(it, {slot, kind});
      }
      continue;
    }

    // Merge any boundary whose water-level jump is not justified by its
    // battery pin: increases need an empty battery, decreases a full one.
    const double wtol = 1e-9 * std::max(1.0, *std::max_element(st.water.begin(), st.water.end()));
    std::size_t merge_at = st.bounds.size();
    double merge_badness = 0.0;
    for (std::size_t i = 0; i + 1 < st.bounds.size(); ++i) {
      const double jump = st.water[i + 1] - st.water[i];
      const double b = B[st.bounds[i].slot - 1];
      bool bad = false;
      if (jump > wtol && std::abs(b) > vtol) bad = true;
      if (jump < -wtol && std::abs(b - in.B_max) > vtol) bad = true;
      if (bad && std::abs(jump) > merge_badness) {
        merge_badness = std::abs(jump);
        merge_at = i;
      }
    }
    if (merge_at < st.bounds.size()) {
      st.bounds.erase(st.bounds.begin() + merge_at);
      continue;
    }

    EpResult result;
    result.energy = p;
    result.profile.boundaries = st.bounds;
    result.profile.water_levels = st.water;
    return result;
  }
}

bool verify_theorem3(std::span<const double> p, const SegmentProfile& profile, const EpInput& in,
                     double tol) {
  const int K = static_cast<int>(in.a.size());
  if (static_cast<int>(p.size()) != K) return false;
  if (profile.boundaries.empty() ||
      profile.boundaries.size() != profile.water_levels.size() ||
      profile.boundaries.back().slot != K)
    return false;
  for (std::size_t i = 0; i + 1 < profile.boundaries.size(); ++i)
    if (profile.boundaries[i].slot >= profile.boundaries[i + 1].slot) return false;

  Vec B(K);
  double consumed = 0.0;
  for (int k = 0; k < K; ++k) {
    if (p[k] < -tol || p[k] > in.P + tol) return false;
    consumed += p[k];
    B[k] = in.E_tilde[k] - consumed;
    if (B[k] < -tol || B[k] > in.B_max + tol) return false;
  }

  // (i) filling rule per slot, (iii) boundary target per segment.
  for (std::size_t i = 0; i < profile.boundaries.size(); ++i) {
    const int lo = i == 0 ? 0 : profile.boundaries[i - 1].slot;
    const int hi = profile.boundaries[i].slot;
    const double w = profile.water_levels[i];
    double seg_sum = 0.0;
    for (int k = lo; k < hi; ++k) {
      seg_sum += p[k];
      if (in.H[k] <= 0.0) continue;  // zero-gain slots carry no rate and no rule
      const double expect = std::min(in.P, in.a[k] * std::max(w - 1.0 / in.H[k], 0.0));
      if (std::abs(p[k] - expect) > tol) return false;
    }
    if (std::abs(seg_sum - segment_target(in, profile.boundaries, i)) > tol) return false;
  }

  // (ii) level moves only against the matching battery pin.
  for (std::size_t i = 0; i + 1 < profile.boundaries.size(); ++i) {
    const double jump = profile.water_levels[i + 1] - profile.water_levels[i];
    const double b = B[profile.boundaries[i].slot - 1];
    if (jump > tol && std::abs(b) > tol) return false;
    if (jump < -tol && std::abs(b - in.B_max) > tol) return false;
  }
  return true;
}

}  // namespace ehsched
