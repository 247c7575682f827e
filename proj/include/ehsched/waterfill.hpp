#pragma once

#include <span>
#include <string>
#include <vector>

#include "ehsched/common.hpp"

namespace ehsched {

enum class BoundaryKind { BDP, BFP, End };

std::string to_string(BoundaryKind kind);

// Right edge of a segment. Slots are 1-based; a boundary at slot k means the
// segment ends with slot k (battery level evaluated at the end of slot k).
struct Boundary {
  int slot = 0;
  BoundaryKind kind = BoundaryKind::End;
};

// Piecewise-constant water-level description of one transmitter's optimal
// energy schedule: boundaries[i] closes segment i and water_levels[i] is that
// segment's level. Boundaries are strictly increasing and the last one sits
// at the horizon end.
struct SegmentProfile {
  std::vector<Boundary> boundaries;
  Vec water_levels;
};

struct SegmentFill {
  double water_level = 0.0;
  Vec energy;
};

// Water-fills one segment: finds w with sum_k min(P, a_k*[w - 1/H_k]^+) = S
// by monotone bisection. Requires a_k > 0, 0 <= S <= len*P, and at least one
// positive gain when S > 0. Fully capped targets report the smallest w
// consistent with every cap binding; S = 0 reports min_k 1/H_k.
SegmentFill segment_water_level(std::span<const double> a, std::span<const double> H, double P,
                                double S);

// Per-transmitter slice of the problem: bandwidth shares, gains, effective
// cumulative budget, per-slot cap and battery capacity.
struct EpInput {
  Vec a;
  Vec H;
  Vec E_tilde;
  double P = 0.0;
  double B_max = 0.0;
};

struct EpResult {
  Vec energy;
  SegmentProfile profile;
};

// Tie-break order used when several slots violate equally or several
// zero-rate slots can absorb forced consumption. The optimum is unique, so
// the choice must not change the result; tests exercise both.
enum class TieBreak { EarliestSlot, LatestSlot };

// Discounted dynamic water-filling for the single-transmitter energy
// subproblem. Requires a_k > 0 for all k and a nonempty cumulative band
// (both guaranteed after greedy discharge inside the outer loop). The
// boundary search refines segments at the most-violating battery slot and
// merges neighbours that break the water-level monotonicity rule.
EpResult solve_ep(const EpInput& in, TieBreak tie = TieBreak::EarliestSlot);

// Structural certificate: energy matches the filling rule against the
// profile's levels, every level increase sits on an empty battery and every
// decrease on a full one, and each segment consumes its boundary target.
bool verify_theorem3(std::span<const double> p, const SegmentProfile& profile, const EpInput& in,
                     double tol = 1e-6);

}  // namespace ehsched
