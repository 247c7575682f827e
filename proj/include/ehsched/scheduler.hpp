#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ehsched/discharge.hpp"
#include "ehsched/model.hpp"
#include "ehsched/waterfill.hpp"

namespace ehsched {

enum class Termination { Tolerance, MaxIterations };

struct SolveTrace {
  Vec values;        // V^(i), one per iteration
  Vec eps_schedule;  // eps used in iteration i
  Vec wall_time_s;   // per-iteration wall time
  Termination termination = Termination::Tolerance;
  int iterations = 0;         // outer iterations until the |dV| < delta exit
  int polish_iterations = 0;  // extra fixed-eps rounds after the exit test
  double final_eps = 0.0;

  // True iff the value sequence never drops by more than tol.
  bool monotone(double tol = 1e-9) const;
};

struct SolveOptions {
  double eps0 = -1.0;    // <= 0 picks the default 1/(2M)
  double delta = 1e-3;   // convergence threshold on |V(i) - V(i-1)|
  int max_iters = 100;
  // Extra alternating rounds at the final eps until the allocation stops
  // moving, so KKT certification sees a tight pairwise fixed point. The
  // converged point is unchanged; only its numerical sharpness improves.
  bool polish = true;
  double polish_tol = 1e-9;  // max |change| in p and a per polish round
  int polish_max_iters = 60;
  int threads = 1;
  std::optional<Allocation> init;  // warm start; V^(0) = objective(init)

  TieBreak tie = TieBreak::EarliestSlot;
};

struct SolveResult {
  Allocation alloc;
  DischargePlan plan;
  SolveTrace trace;
  std::vector<SegmentProfile> profiles;  // one per transmitter, final iteration
};

// Alternating energy/bandwidth maximization with the shrinking bandwidth
// floor eps0/i. Supports the point-to-point unit-weight configuration; other
// shapes raise UnsupportedConfiguration and belong to solve_general_stub.
SolveResult solve(const Instance& inst, const SolveOptions& opts = {});

struct GeneralSolveOptions {
  double eps = 1e-3;
  int size_limit = 64;  // max K*M accepted
};

struct GeneralSolveResult {
  Allocation alloc;
  DischargePlan plan;
  std::string quality;  // always "reference-quality, small instances only"
};

// Routes weighted / multi-receiver instances to the reference solver.
GeneralSolveResult solve_general_stub(const Instance& inst, const GeneralSolveOptions& opts = {});

}  // namespace ehsched
