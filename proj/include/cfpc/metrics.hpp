#pragma once

#include "cfpc/beamforming.hpp"
#include "cfpc/csi.hpp"
#include "cfpc/scenario.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// DL transmit powers, K x M with nonzero entries only on associated links.
struct PowerAllocationDL {
  int K = 0, M = 0;
  RVec p; // row-major K x M [W]

  double& at(int k, int m) { return p[static_cast<size_t>(k) * M + m]; }
  const double& at(int k, int m) const { return p[static_cast<size_t>(k) * M + m]; }

  static PowerAllocationDL zeros(int K, int M) {
    PowerAllocationDL a;
    a.K = K;
    a.M = M;
    a.p.assign(static_cast<size_t>(K) * M, 0.0);
    return a;
  }

  // Amplitude vector over associated links, UE-major (k*N+i for the i-th
  // serving AP of UE k in ascending AP order).
  RVec flat_amplitudes(const std::vector<std::vector<int>>& cluster) const;
  static PowerAllocationDL from_flat(const RVec& d, const std::vector<std::vector<int>>& cluster,
                                     int K, int M);
};

// UL transmit powers, one per UE.
struct PowerAllocationUL {
  RVec q; // [W]
};

// Per-link effective scalars: everything SINR/IPD evaluation needs once the
// beamformers are fixed. dl[k][j][i] is the receive gain at UE k from the
// i-th serving AP of UE j. `dl_eval` follows the configured evaluation mode
// (estimated or true channels); `dl_phys` always uses the true channels and
// backs the exposure metric.
struct EffectiveGains {
  int K = 0, N = 0, M = 0;
  EvalMode mode = EvalMode::Estimated;
  std::vector<std::vector<int>> cluster;     // K x N serving APs
  std::vector<std::vector<CVec>> dl_eval;    // K x K x N
  std::vector<std::vector<CVec>> dl_phys;    // K x K x N
  std::vector<std::vector<cdouble>> ul;      // K x K composite combiner gains
  RVec ul_noise;                             // K filtered-noise powers nu_k
  double sigma2 = 0.0;
  double ipd_factor = 0.0;                   // 4*pi / lambda^2

  int dim() const { return K * N; }

  // Received amplitude at UE k of the signal intended for UE j.
  cdouble dl_composite(const RVec& d, int k, int j, bool physical = false) const {
    const CVec& w = physical ? dl_phys[k][j] : dl_eval[k][j];
    cdouble s = 0.0;
    for (int i = 0; i < N; ++i) s += d[static_cast<size_t>(j) * N + i] * w[i];
    return s;
  }
};

// Assemble effective gains from one realization. `est` may be null when
// mode == TrueChannel; IPD gains always come from the true channels.
EffectiveGains build_gains(const Deployment& dep, const ChannelRealization& ch,
                           const ChannelEstimateSet* est, const BeamformerSet& beams,
                           const SystemConfig& cfg, EvalMode mode);

struct RateReport {
  RVec sinr;       // linear
  RVec rate_bps;
  double min_rate_bps = 0.0;
};

struct ExposureReport {
  RVec ipd_w_m2;                 // K (DL)
  std::vector<RVec> sar_w_kg;    // K x n_body (UL)
};

RVec dl_sinr(const PowerAllocationDL& alloc, const EffectiveGains& gains);
RVec ul_sinr(const PowerAllocationUL& alloc, const EffectiveGains& gains);
RVec ipd(const PowerAllocationDL& alloc, const EffectiveGains& gains);
std::vector<RVec> sar(const PowerAllocationUL& alloc, const SystemConfig& cfg);
RVec rates(const RVec& sinr, const SystemConfig& cfg, Direction dir);
double min_rate(const RVec& rate_bps);

RateReport rate_report(const RVec& sinr, const SystemConfig& cfg, Direction dir);

// Worst relative constraint residuals (0 when satisfied). The per-AP budget
// assumes unit-norm precoders, which the beamforming module guarantees.
struct ComplianceReport {
  double ap_budget = 0.0;
  double ipd = 0.0;
  double sar = 0.0;
  double ue_cap = 0.0;
  double worst() const { return std::max(std::max(ap_budget, ipd), std::max(sar, ue_cap)); }
};

ComplianceReport dl_compliance(const PowerAllocationDL& alloc, const EffectiveGains& gains,
                               const SystemConfig& cfg);
ComplianceReport ul_compliance(const PowerAllocationUL& alloc, const SystemConfig& cfg);

} // namespace cfpc
