#include "ehsched/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ehsched/bandwidth.hpp"
#include "ehsched/parallel.hpp"
#include "ehsched/verify.hpp"

namespace ehsched {

bool SolveTrace::monotone(double tol) const {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1] - tol) return false;
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// One bandwidth pass: refit every slot at the given floor; slots with no
// transmitting link keep the uniform split.
void update_bandwidth(const Instance& inst, const Mat& p, double eps, int threads, Mat& a) {
  const int N = inst.num_transmitters;
  parallel_for(inst.horizon, threads, [&](int k) {
    Vec pH(N);
    double total = 0.0;
    for (int n = 0; n < N; ++n) {
      pH[n] = p[n][k] * inst.channel_gains[n][k];
      total += pH[n];
    }
    if (total <= 0.0) {
      for (int n = 0; n < N; ++n) a[n][k] = 1.0 / N;
      return;
    }
    const Vec shares = fit_bandwidth(pH, eps);
    for (int n = 0; n < N; ++n) a[n][k] = shares[n];
  });
}

// One energy pass: re-solve every transmitter's water-filling subproblem.
void update_energy(const Instance& inst, const DischargePlan& plan, const Mat& a, int threads,
                   TieBreak tie, Mat& p, std::vector<SegmentProfile>& profiles) {
  parallel_for(inst.num_transmitters, threads, [&](int n) {
    EpInput in{a[n], inst.channel_gains[n], plan.effective_budget[n], inst.max_power[n],
               inst.battery_cap[n]};
    EpResult r = solve_ep(in, tie);
    p[n] = std::move(r.energy);
    profiles[n] = std::move(r.profile);
  });
}

double max_abs_diff(const Mat& x, const Mat& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x[i].size(); ++j)
      d = std::max(d, std::abs(x[i][j] - y[i][j]));
  return d;
}

}  // namespace

SolveResult solve(const Instance& inst, const SolveOptions& opts) {
  inst.validate();
  if (!inst.point_to_point() || !inst.unit_weights())
    throw UnsupportedConfiguration(
        "solve: fast path needs point-to-point links with unit weights; "
        "use solve_general_stub for the general case");
  if (opts.delta <= 0.0 || opts.max_iters < 1) throw InvalidInput("solve: bad delta/max_iters");

  const int N = inst.num_transmitters;
  const int K = inst.horizon;
  const double eps0 = opts.eps0 > 0.0 ? opts.eps0 : 1.0 / (2.0 * inst.num_receivers);
  if (N * eps0 > 1.0) throw InvalidInput("solve: eps0 too large for the simplex");

  SolveResult out;
  out.plan = greedy_discharge(inst);
  out.profiles.resize(N);

  Mat a = make_mat(N, K, 1.0 / N);
  Mat p = make_mat(N, K);
  double v_prev = 0.0;
  if (opts.init) {
    a = opts.init->bandwidth;
    p = opts.init->energy;
    v_prev = objective(inst, {p, a});
  } else {
    update_energy(inst, out.plan, a, opts.threads, opts.tie, p, out.profiles);
  }

  SolveTrace& trace = out.trace;
  double eps = eps0;
  for (int i = 1; i <= opts.max_iters; ++i) {
    const auto tick = Clock::now();
    eps = eps0 / i;
    update_bandwidth(inst, p, eps, opts.threads, a);
    update_energy(inst, out.plan, a, opts.threads, opts.tie, p, out.profiles);
    const double v = objective(inst, {p, a});

    trace.values.push_back(v);
    trace.eps_schedule.push_back(eps);
    trace.wall_time_s.push_back(seconds_since(tick));
    trace.iterations = i;
    if (std::abs(v - v_prev) < opts.delta) {
      trace.termination = Termination::Tolerance;
      break;
    }
    v_prev = v;
    if (i == opts.max_iters) trace.termination = Termination::MaxIterations;
  }
  trace.final_eps = eps;

  if (opts.polish) {
    Mat a_prev = a, p_prev = p;
    for (int j = 0; j < opts.polish_max_iters; ++j) {
      update_bandwidth(inst, p, eps, opts.threads, a);
      update_energy(inst, out.plan, a, opts.threads, opts.tie, p, out.profiles);
      ++trace.polish_iterations;
      const double moved = std::max(max_abs_diff(a, a_prev), max_abs_diff(p, p_prev));
      if (moved < opts.polish_tol) break;
      a_prev = a;
      p_prev = p;
    }
  }

  out.alloc = Allocation{std::move(p), std::move(a)};
  return out;
}

GeneralSolveResult solve_general_stub(const Instance& inst, const GeneralSolveOptions& opts) {
  inst.validate();
  if (inst.horizon * inst.num_receivers > opts.size_limit)
    throw SizeError("solve_general_stub: K*M exceeds the reference-solver limit");
  ReferenceResult ref = reference_solve(inst, opts.eps);
  GeneralSolveResult out;
  out.alloc = std::move(ref.alloc);
  out.plan = greedy_discharge(inst);
  out.quality = "reference-quality, small instances only";
  return out;
}

}  // namespace ehsched
