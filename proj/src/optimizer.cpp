#include "cfpc/optimizer.hpp"


#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace cfpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double block_quadform(const Mat& q, const RVec& d, int offset, int N) {
  double acc = 0.0;
  for (int a = 0; a < N; ++a) {
    double row = 0.0;
    for (int b = 0; b < N; ++b) row += q.at(a, b) * d[static_cast<size_t>(offset) + b];
    acc += d[static_cast<size_t>(offset) + a] * row;
  }
  return acc;
}

void require_finite_dl(const EffectiveGains& gains) {
  for (const auto& row : gains.dl_eval)
    for (const auto& vec : row)
      for (cdouble v : vec)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw std::domain_error("power control: non-finite DL link gain");
  if (!(gains.sigma2 > 0.0) || !std::isfinite(gains.sigma2))
    throw std::domain_error("power control: noise power must be positive and finite");
}

void require_finite_ul(const EffectiveGains& gains) {
  for (const auto& row : gains.ul)
    for (cdouble v : row)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::domain_error("power control: non-finite UL link gain");
  for (double v : gains.ul_noise)
    if (!std::isfinite(v)) throw std::domain_error("power control: non-finite UL noise power");
}

// Budgets and (finite) exposure caps; the target-independent constraint set.
std::vector<QuadConstraint> static_constraints(const DlProblem& prob) {
  std::vector<QuadConstraint> cons;
  for (const auto& b : prob.budgets) {
    QuadConstraint c;
    c.kind = ConstraintKind::ApBudget;
    c.quad = Mat(prob.n);
    for (int i : b.idx) c.quad.at(i, i) = 1.0 / b.power;
    c.constant = -1.0;
    cons.push_back(std::move(c));
  }
  for (int k = 0; k < prob.K; ++k) {
    if (!std::isfinite(prob.ipd_rhs[k])) continue;
    QuadConstraint c;
    c.kind = ConstraintKind::IpdLimit;
    c.quad = Mat(prob.n);
    const double inv = 1.0 / prob.ipd_rhs[k];
    for (int j = 0; j < prob.K; ++j)
      for (int a = 0; a < prob.N; ++a)
        for (int b = 0; b < prob.N; ++b)
          c.quad.at(j * prob.N + a, j * prob.N + b) = prob.quad[k][j].at(a, b) * inv;
    c.constant = -1.0;
    cons.push_back(std::move(c));
  }
  return cons;
}

// gamma_t * (interference + 1) - gtilde <= 0, scaled by 1/(1 + gamma_t).
QuadConstraint sinr_constraint(const DlProblem& prob, int k, double gamma_t,
                               const AffineBound& bound, const RVec& d0) {
  QuadConstraint c;
  c.kind = ConstraintKind::SinrTarget;
  c.quad = Mat(prob.n);
  const double scale = 1.0 / (1.0 + gamma_t);
  const double qs = gamma_t * scale;
  for (int j = 0; j < prob.K; ++j) {
    if (j == k) continue;
    for (int a = 0; a < prob.N; ++a)
      for (int b = 0; b < prob.N; ++b)
        c.quad.at(j * prob.N + a, j * prob.N + b) = prob.quad[k][j].at(a, b) * qs;
  }
  c.lin.assign(prob.n, 0.0);
  double grad_dot_d0 = 0.0;
  for (int i = 0; i < prob.N; ++i) {
    c.lin[static_cast<size_t>(k) * prob.N + i] = -bound.grad[i] * scale;
    grad_dot_d0 += bound.grad[i] * d0[static_cast<size_t>(k) * prob.N + i];
  }
  c.constant = (gamma_t - bound.value + grad_dot_d0) * scale;
  return c;
}

// Worst residual of the target-independent constraints (negative inside).
double worst_static_residual(const DlProblem& prob, const RVec& d) {
  double worst = -kInf;
  for (const auto& b : prob.budgets) {
    double acc = 0.0;
    for (int i : b.idx) acc += d[i] * d[i];
    worst = std::max(worst, acc / b.power - 1.0);
  }
  for (int k = 0; k < prob.K; ++k) {
    if (!std::isfinite(prob.ipd_rhs[k])) continue;
    double acc = 0.0;
    for (int j = 0; j < prob.K; ++j)
      acc += block_quadform(prob.quad[k][j], d, j * prob.N, prob.N);
    worst = std::max(worst, acc / prob.ipd_rhs[k] - 1.0);
  }
  return worst == -kInf ? -1.0 : worst;
}

RVec positive_clamp(RVec d) {
  double mx = 0.0;
  for (double v : d) mx = std::max(mx, v);
  const double floor = (mx > 0.0 ? mx : 1.0) * 1e-12;
  for (auto& v : d) v = std::max(v, floor);
  return d;
}

LseSurrogate build_surrogate(const DlProblem& prob, const RVec& d0, double upsilon) {
  LseSurrogate lse;
  lse.upsilon = upsilon;
  lse.terms.resize(prob.K);
  for (int k = 0; k < prob.K; ++k) {
    RVec blk(d0.begin() + static_cast<size_t>(k) * prob.N,
             d0.begin() + static_cast<size_t>(k + 1) * prob.N);
    const AffineBound bound = taylor_lower_bound(prob.quad[k][k], blk);
    auto& term = lse.terms[k];
    term.num_grad.assign(prob.n, 0.0);
    for (int i = 0; i < prob.N; ++i)
      term.num_grad[static_cast<size_t>(k) * prob.N + i] = bound.grad[i];
    term.num_const = bound.value - rdot(bound.grad, blk);
    term.den_const = 1.0;
    if (prob.K > 1) {
      term.den_quad = Mat(prob.n);
      for (int j = 0; j < prob.K; ++j) {
        if (j == k) continue;
        for (int a = 0; a < prob.N; ++a)
          for (int b = 0; b < prob.N; ++b)
            term.den_quad.at(j * prob.N + a, j * prob.N + b) = prob.quad[k][j].at(a, b);
      }
    }
  }
  return lse;
}

double relative_change(const RVec& next, const RVec& prev) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < next.size(); ++i) {
    const double diff = next[i] - prev[i];
    num += diff * diff;
    den += next[i] * next[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace

double DlProblem::gain_num(const RVec& d, int k) const {
  cdouble s = 0.0;
  for (int i = 0; i < N; ++i) s += d[static_cast<size_t>(k) * N + i] * w[k][k][i];
  return std::norm(s);
}

double DlProblem::gain_den(const RVec& d, int k) const {
  double acc = 1.0;
  for (int j = 0; j < K; ++j) {
    if (j == k) continue;
    cdouble s = 0.0;
    for (int i = 0; i < N; ++i) s += d[static_cast<size_t>(j) * N + i] * w[k][j][i];
    acc += std::norm(s);
  }
  return acc;
}

DlProblem build_dl_problem(const EffectiveGains& gains, const SystemConfig& cfg) {
  require_finite_dl(gains);
  DlProblem prob;
  prob.K = gains.K;
  prob.N = gains.N;
  prob.n = gains.K * gains.N;
  const double inv_sigma = 1.0 / std::sqrt(gains.sigma2);

  prob.w.assign(prob.K, std::vector<CVec>(prob.K));
  prob.quad.assign(prob.K, std::vector<Mat>(prob.K));
  for (int k = 0; k < prob.K; ++k)
    for (int j = 0; j < prob.K; ++j) {
      CVec wv(prob.N);
      for (int i = 0; i < prob.N; ++i) wv[i] = gains.dl_eval[k][j][i] * inv_sigma;
      Mat m(prob.N);
      for (int a = 0; a < prob.N; ++a)
        for (int b = 0; b < prob.N; ++b)
          m.at(a, b) = (wv[a] * std::conj(wv[b])).real();
      prob.w[k][j] = std::move(wv);
      prob.quad[k][j] = std::move(m);
    }

  prob.ipd_rhs.assign(prob.K, kInf);
  if (std::isfinite(cfg.ipd_limit_w_m2)) {
    const double rhs = cfg.ipd_limit_w_m2 / (gains.ipd_factor * gains.sigma2);
    for (auto& v : prob.ipd_rhs) v = rhs;
  }

  for (int m = 0; m < gains.M; ++m) {
    DlProblem::Budget b;
    b.ap = m;
    b.power = cfg.ap_power_w;
    for (int k = 0; k < prob.K; ++k)
      for (int i = 0; i < prob.N; ++i)
        if (gains.cluster[k][i] == m) b.idx.push_back(k * prob.N + i);
    if (!b.idx.empty()) prob.budgets.push_back(std::move(b));
  }

  prob.prelog_bw = cfg.prelog(Direction::Downlink) * cfg.bandwidth_hz;
  return prob;
}

double sinr_target_from_rate(double delta_bps, double prelog, double bandwidth_hz) {
  const double pb = prelog * bandwidth_hz;
  if (!(pb > 0.0)) throw std::invalid_argument("sinr_target_from_rate: prelog*bandwidth must be positive");
  if (delta_bps <= 0.0) return 0.0;
  return std::exp2(delta_bps / pb) - 1.0;
}

AffineBound taylor_lower_bound(const Mat& own_quad, const RVec& d0_block) {
  AffineBound b;
  const RVec qd = own_quad.mul(d0_block);
  b.value = rdot(d0_block, qd);
  b.grad = qd;
  for (auto& v : b.grad) v *= 2.0;
  return b;
}

FeasibilityStep dl_feasibility_step(double gamma_t, const RVec& d_prev, const DlProblem& prob,
                                    const SolverConfig& scfg) {
  if (static_cast<int>(d_prev.size()) != prob.n)
    throw std::invalid_argument("dl_feasibility_step: amplitude dimension mismatch");
  ConvexSubproblem sub;
  sub.dim = prob.n;
  sub.objective = ConvexSubproblem::Objective::FeasibilitySlack;
  sub.constraints = static_constraints(prob);
  for (int k = 0; k < prob.K; ++k) {
    RVec blk(d_prev.begin() + static_cast<size_t>(k) * prob.N,
             d_prev.begin() + static_cast<size_t>(k + 1) * prob.N);
    const AffineBound bound = taylor_lower_bound(prob.quad[k][k], blk);
    sub.constraints.push_back(sinr_constraint(prob, k, gamma_t, bound, d_prev));
  }
  const BarrierResult res = barrier_solve(sub, positive_clamp(d_prev), scfg);
  FeasibilityStep step;
  step.feasible = res.slack <= 0.0;
  step.d = res.d;
  step.slack = res.slack;
  step.newton_iters = res.newton_iters;
  return step;
}

FeasibilityStep dl_feasibility_step(double gamma_t, const RVec& d_prev,
                                    const EffectiveGains& gains, const SystemConfig& cfg,
                                    const SolverConfig& scfg) {
  return dl_feasibility_step(gamma_t, d_prev, build_dl_problem(gains, cfg), scfg);
}

double lse_objective(const RVec& d, const RVec& d_prev, const DlProblem& prob, double upsilon,
                     RVec* grad) {
  return build_surrogate(prob, d_prev, upsilon).eval(d, grad, nullptr);
}

double lse_objective(const RVec& d, const RVec& d_prev, const EffectiveGains& gains,
                     const SystemConfig& cfg, double upsilon, RVec* grad) {
  return lse_objective(d, d_prev, build_dl_problem(gains, cfg), upsilon, grad);
}

PowerAllocationDL initial_dl_allocation(const EffectiveGains& gains, const SystemConfig& cfg,
                                        const PowerAllocationDL& fpc) {
  const DlProblem prob = build_dl_problem(gains, cfg);
  const RVec d = fpc.flat_amplitudes(gains.cluster);
  double scale2 = 1.0;
  for (int k = 0; k < prob.K; ++k) {
    if (!std::isfinite(prob.ipd_rhs[k])) continue;
    double acc = 0.0;
    for (int j = 0; j < prob.K; ++j)
      acc += block_quadform(prob.quad[k][j], d, j * prob.N, prob.N);
    if (acc > 0.0) scale2 = std::min(scale2, prob.ipd_rhs[k] * (1.0 - 1e-6) / acc);
  }
  PowerAllocationDL out = fpc;
  if (scale2 < 1.0)
    for (auto& v : out.p) v *= scale2;
  return out;
}

namespace {

// One bisection probe: SCO on the slack problem at a fixed target. Stops as
// soon as a certificate (slack <= 0) appears, on iterate convergence, or at
// the iteration cap. Solver failures count as an infeasible verdict.
struct ProbeOutcome {
  bool feasible = false;
  RVec d;
};

ProbeOutcome run_probe(double gamma_t, const RVec& d_warm, const DlProblem& prob,
                       const SolverConfig& scfg, int& sco_iters, int& newton_iters) {
  ProbeOutcome out;
  out.d = d_warm;
  RVec d_run = d_warm;
  for (int it = 0; it < scfg.max_sco_iters; ++it) {
    FeasibilityStep step;
    try {
      step = dl_feasibility_step(gamma_t, d_run, prob, scfg);
    } catch (const SolverFailure&) {
      return out; // no certificate; report infeasible at this target
    }
    ++sco_iters;
    newton_iters += step.newton_iters;
    const double rel = relative_change(step.d, d_run);
    d_run = step.d;
    if (step.feasible) {
      out.feasible = true;
      out.d = d_run;
      return out;
    }
    if (rel <= scfg.eps_sco) break;
  }
  return out;
}

} // namespace

AllocationResult dl_maximin_bisection(const EffectiveGains& gains, const SystemConfig& cfg,
                                      const SolverConfig& scfg, const PowerAllocationDL& init) {
  const auto t_start = std::chrono::steady_clock::now();
  scfg.validate();
  const DlProblem prob = build_dl_problem(gains, cfg);

  AllocationResult result;
  result.direction = Direction::Downlink;

  RVec d_best = init.flat_amplitudes(gains.cluster);

  // Rate ceiling: full deployment power through the strongest own-signal
  // vector, by Cauchy-Schwarz an upper bound on any achievable SINR.
  double total_power = 0.0;
  for (const auto& b : prob.budgets) total_power += b.power;
  double sinr_cap = 0.0;
  for (int k = 0; k < prob.K; ++k) {
    double w2 = 0.0;
    for (cdouble v : prob.w[k][k]) w2 += std::norm(v);
    sinr_cap = std::max(sinr_cap, total_power * w2);
  }
  const double delta_max = prob.prelog_bw * std::log2(1.0 + sinr_cap);
  const double eps1 = scfg.eps1_rel * delta_max;

  double lo = 0.0, hi = delta_max;
  RVec d_warm = d_best;
  while (hi - lo > eps1 && static_cast<int>(result.probes.size()) < scfg.max_bisect_iters) {
    const double delta = 0.5 * (lo + hi);
    const double gamma_t =
        sinr_target_from_rate(delta, cfg.prelog(Direction::Downlink), cfg.bandwidth_hz);
    const ProbeOutcome probe =
        run_probe(gamma_t, d_warm, prob, scfg, result.sco_iterations, result.newton_iterations);
    result.probes.push_back({delta, probe.feasible});
    if (probe.feasible) {
      lo = delta;
      d_warm = probe.d;
      d_best = probe.d;
      result.iterate_trace.push_back(d_best);
    } else {
      hi = delta;
    }
  }

  result.dl = PowerAllocationDL::from_flat(d_best, gains.cluster, gains.K, gains.M);
  result.feasible = worst_static_residual(prob, d_best) <= 1e-6;
  const RVec sinr = dl_sinr(result.dl, gains);
  result.min_rate_bps = min_rate(rates(sinr, cfg, Direction::Downlink));
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

AllocationResult dl_lse_sco(const EffectiveGains& gains, const SystemConfig& cfg,
                            const SolverConfig& scfg, const PowerAllocationDL& init) {
  const auto t_start = std::chrono::steady_clock::now();
  scfg.validate();
  const DlProblem prob = build_dl_problem(gains, cfg);

  AllocationResult result;
  result.direction = Direction::Downlink;

  // Pull the start strictly inside the budget and exposure set.
  RVec d_prev = init.flat_amplitudes(gains.cluster);
  const double worst = worst_static_residual(prob, d_prev);
  if (worst > -1e-6) {
    const double ratio = worst + 1.0; // largest constraint quadratic form
    if (ratio > 0.0) {
      const double s = std::sqrt((1.0 - 1e-6) / ratio);
      for (auto& v : d_prev) v *= std::min(1.0, s);
    }
  }
  d_prev = positive_clamp(d_prev);

  double best = lse_objective(d_prev, d_prev, prob, scfg.upsilon);
  result.iterate_trace.push_back(d_prev);

  for (int it = 0; it < scfg.max_sco_iters; ++it) {
    ConvexSubproblem sub;
    sub.dim = prob.n;
    sub.objective = ConvexSubproblem::Objective::LseSurrogate;
    sub.constraints = static_constraints(prob);
    sub.lse = build_surrogate(prob, d_prev, scfg.upsilon);

    BarrierResult res;
    try {
      res = barrier_solve(sub, d_prev, scfg);
    } catch (const SolverFailure&) {
      break;
    }
    ++result.sco_iterations;
    result.newton_iterations += res.newton_iters;

    const double val = lse_objective(res.d, res.d, prob, scfg.upsilon);
    if (!(val >= best - 1e-12 * std::abs(best))) break; // no ascent from this tangent

    const double rel = relative_change(res.d, d_prev);
    d_prev = res.d;
    best = val;
    result.iterate_trace.push_back(d_prev);
    if (rel <= scfg.eps_lse) break;
  }

  result.dl = PowerAllocationDL::from_flat(d_prev, gains.cluster, gains.K, gains.M);
  result.feasible = worst_static_residual(prob, d_prev) <= 1e-6;
  const RVec sinr = dl_sinr(result.dl, gains);
  result.min_rate_bps = min_rate(rates(sinr, cfg, Direction::Downlink));
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

UlFeasibility ul_target_feasible(double gamma_t, const EffectiveGains& gains, const RVec& caps) {
  require_finite_ul(gains);
  const int K = gains.K;
  if (static_cast<int>(caps.size()) != K)
    throw std::invalid_argument("ul_target_feasible: caps size mismatch");

  RVec g(K), nu = gains.ul_noise;
  std::vector<RVec> cross(K, RVec(K, 0.0));
  for (int k = 0; k < K; ++k) {
    g[k] = std::norm(gains.ul[k][k]);
    for (int j = 0; j < K; ++j)
      if (j != k) cross[k][j] = std::norm(gains.ul[k][j]);
  }

  double cap_sup = 0.0;
  for (double c : caps) cap_sup = std::max(cap_sup, c);
  const double tol = 1e-10 * cap_sup;

  UlFeasibility fb;
  RVec q(K, 0.0), qn(K, 0.0);
  const int max_iters = 20000;
  for (int it = 0; it < max_iters; ++it) {
    ++fb.iterations;
    double delta = 0.0;
    for (int k = 0; k < K; ++k) {
      double interf = nu[k];
      for (int j = 0; j < K; ++j)
        if (j != k) interf += q[j] * cross[k][j];
      double need = 0.0;
      if (gamma_t > 0.0) need = g[k] > 0.0 ? gamma_t * interf / g[k] : kInf;
      qn[k] = std::min(caps[k], need);
      delta = std::max(delta, std::abs(qn[k] - q[k]));
    }
    q = qn;
    if (delta <= tol) break;
  }

  fb.feasible = true;
  for (int k = 0; k < K; ++k) {
    double interf = nu[k];
    for (int j = 0; j < K; ++j)
      if (j != k) interf += q[j] * cross[k][j];
    double need = 0.0;
    if (gamma_t > 0.0) need = g[k] > 0.0 ? gamma_t * interf / g[k] : kInf;
    if (need > caps[k] * (1.0 + 1e-9)) fb.feasible = false;
  }
  fb.q.q = q;
  return fb;
}

AllocationResult ul_maximin_bisection(const EffectiveGains& gains, const SystemConfig& cfg,
                                      const SolverConfig& scfg) {
  const auto t_start = std::chrono::steady_clock::now();
  scfg.validate();
  require_finite_ul(gains);
  const int K = gains.K;
  const RVec caps(K, cfg.ue_cap_w());

  AllocationResult result;
  result.direction = Direction::Uplink;
  result.ul.q.assign(K, 0.0);

  double sinr_cap = 0.0;
  bool reachable = true;
  for (int k = 0; k < K; ++k) {
    const double g = std::norm(gains.ul[k][k]);
    if (!(g > 0.0)) reachable = false;
    if (gains.ul_noise[k] > 0.0) sinr_cap = std::max(sinr_cap, caps[k] * g / gains.ul_noise[k]);
  }
  const double prelog = cfg.prelog(Direction::Uplink);
  const double delta_max = reachable ? prelog * cfg.bandwidth_hz * std::log2(1.0 + sinr_cap) : 0.0;
  const double eps1 = scfg.eps1_rel * delta_max;

  double lo = 0.0, hi = delta_max;
  while (hi - lo > eps1 && static_cast<int>(result.probes.size()) < scfg.max_bisect_iters) {
    const double delta = 0.5 * (lo + hi);
    const double gamma_t = sinr_target_from_rate(delta, prelog, cfg.bandwidth_hz);
    const UlFeasibility fb = ul_target_feasible(gamma_t, gains, caps);
    result.sco_iterations += fb.iterations;
    result.probes.push_back({delta, fb.feasible});
    if (fb.feasible) {
      lo = delta;
      result.ul = fb.q;
      result.iterate_trace.push_back(fb.q.q);
    } else {
      hi = delta;
    }
  }

  result.feasible = ul_compliance(result.ul, cfg).worst() <= 1e-6;
  const RVec sinr = ul_sinr(result.ul, gains);
  result.min_rate_bps = min_rate(rates(sinr, cfg, Direction::Uplink));
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

std::string diagnostics_json(const AllocationResult& result, const std::string& policy) {
  nlohmann::json j;
  j["policy"] = policy;
  j["direction"] = result.direction == Direction::Downlink ? "dl" : "ul";
  j["feasible"] = result.feasible;
  j["min_rate_bps"] = result.min_rate_bps;
  j["sco_iterations"] = result.sco_iterations;
  j["newton_iterations"] = result.newton_iterations;
  j["wall_time_s"] = result.wall_time_s;
  j["trace_len"] = result.iterate_trace.size();
  auto probes = nlohmann::json::array();
  for (const auto& p : result.probes) probes.push_back({{"delta_bps", p.delta_bps}, {"feasible", p.feasible}});
  j["probes"] = std::move(probes);
  return j.dump();
}

} // namespace cfpc
