#pragma once

#include <string>

#include "cfpc/barrier.hpp"
#include "cfpc/metrics.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// One bisection probe: rate target and the SCO feasibility verdict.
struct SinrProbe {
  double delta_bps = 0.0;
  bool feasible = false;
};

// Outcome of a model-based solve (either direction).
struct AllocationResult {
  Direction direction = Direction::Downlink;
  PowerAllocationDL dl;
  PowerAllocationUL ul;
  bool feasible = false;
  double min_rate_bps = 0.0;
  std::vector<RVec> iterate_trace; // amplitude vectors, one per outer SCO iterate
  std::vector<SinrProbe> probes;   // bisection history
  int sco_iterations = 0;
  int newton_iterations = 0;
  double wall_time_s = 0.0;
};

// Normalized DL solve data shared by the feasibility and LSE paths: link
// gains divided by the noise std so the SINR constraints are O(1), quadratic
// forms per (receiver, transmitter) pair, per-AP budgets, and IPD caps.
struct DlProblem {
  int K = 0, N = 0, n = 0;
  std::vector<std::vector<CVec>> w;        // K x K x N, gains / sigma
  std::vector<std::vector<Mat>> quad;      // K x K blocks Re(w w^H), N x N
  RVec ipd_rhs;                            // per-UE cap in normalized units; +inf => off
  struct Budget {
    int ap = 0;
    double power = 0.0;
    std::vector<int> idx; // flat amplitude indices drawing on this AP
  };
  std::vector<Budget> budgets;
  double prelog_bw = 0.0; // prelog * bandwidth, rate = prelog_bw*log2(1+sinr)

  double gain_num(const RVec& d, int k) const; // |own composite|^2, normalized
  double gain_den(const RVec& d, int k) const; // interference + 1, normalized
};

DlProblem build_dl_problem(const EffectiveGains& gains, const SystemConfig& cfg);

// gamma_t = 2^{delta/(prelog*B)} - 1.
double sinr_target_from_rate(double delta_bps, double prelog, double bandwidth_hz);

// Affine under-estimator of the own-signal quadratic at d0:
// gtilde(d) = value + grad'(d - d0), grad = 2 Re{c c^H} d0.
struct AffineBound {
  RVec grad;
  double value = 0.0; // g(d0)
};
AffineBound taylor_lower_bound(const Mat& own_quad, const RVec& d0_block);

// Slack step of the feasibility SCO: minimize the common constraint slack at
// a fixed SINR target, linearizing the own-signal term at d_prev.
struct FeasibilityStep {
  bool feasible = false;
  RVec d;
  double slack = 0.0;
  int newton_iters = 0;
};
FeasibilityStep dl_feasibility_step(double gamma_t, const RVec& d_prev, const DlProblem& prob,
                                    const SolverConfig& scfg);
FeasibilityStep dl_feasibility_step(double gamma_t, const RVec& d_prev,
                                    const EffectiveGains& gains, const SystemConfig& cfg,
                                    const SolverConfig& scfg);

// Smoothed-minimum surrogate value at d with tangent d_prev (and gradient on
// request).
double lse_objective(const RVec& d, const RVec& d_prev, const DlProblem& prob, double upsilon,
                     RVec* grad = nullptr);
double lse_objective(const RVec& d, const RVec& d_prev, const EffectiveGains& gains,
                     const SystemConfig& cfg, double upsilon, RVec* grad = nullptr);

// FPC(kappa = 0.5) amplitudes scaled down until every IPD cap holds: the
// standard strictly feasible starting point.
PowerAllocationDL initial_dl_allocation(const EffectiveGains& gains, const SystemConfig& cfg,
                                        const PowerAllocationDL& fpc);

// Max-min DL power control: bisection over the rate target with an inner
// feasibility SCO, warm-started across probes.
AllocationResult dl_maximin_bisection(const EffectiveGains& gains, const SystemConfig& cfg,
                                      const SolverConfig& scfg, const PowerAllocationDL& init);

// Smoothed max-min DL power control: one SCO chain maximizing the LSE
// surrogate; the iterate trace is kept for unfolding datasets.
AllocationResult dl_lse_sco(const EffectiveGains& gains, const SystemConfig& cfg,
                            const SolverConfig& scfg, const PowerAllocationDL& init);

// UL feasibility of a common SINR target via the capped standard-interference
// fixed point.
struct UlFeasibility {
  bool feasible = false;
  PowerAllocationUL q;
  int iterations = 0;
};
UlFeasibility ul_target_feasible(double gamma_t, const EffectiveGains& gains, const RVec& caps);

// Max-min UL power control: bisection over the rate target.
AllocationResult ul_maximin_bisection(const EffectiveGains& gains, const SystemConfig& cfg,
                                      const SolverConfig& scfg);

// Compact JSON record (iterations, probes, timing) for one solve.
std::string diagnostics_json(const AllocationResult& result, const std::string& policy);

} // namespace cfpc
