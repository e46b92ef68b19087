#include "cfpc/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "cfpc/linalg.hpp"

namespace cfpc {

RVec PowerAllocationDL::flat_amplitudes(const std::vector<std::vector<int>>& cluster) const {
  const int N = cluster.empty() ? 0 : static_cast<int>(cluster[0].size());
  RVec d(static_cast<size_t>(K) * N, 0.0);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < N; ++i) d[static_cast<size_t>(k) * N + i] = std::sqrt(at(k, cluster[k][i]));
  return d;
}

PowerAllocationDL PowerAllocationDL::from_flat(const RVec& d,
                                               const std::vector<std::vector<int>>& cluster,
                                               int K, int M) {
  PowerAllocationDL a = zeros(K, M);
  const int N = cluster.empty() ? 0 : static_cast<int>(cluster[0].size());
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < N; ++i) {
      const double v = d[static_cast<size_t>(k) * N + i];
      a.at(k, cluster[k][i]) = v * v;
    }
  return a;
}

EffectiveGains build_gains(const Deployment& dep, const ChannelRealization& ch,
                           const ChannelEstimateSet* est, const BeamformerSet& beams,
                           const SystemConfig& cfg, EvalMode mode) {
  if (mode == EvalMode::Estimated && est == nullptr)
    throw std::invalid_argument("build_gains: estimated mode requires channel estimates");

  const int K = cfg.num_ues, N = cfg.cluster_size;
  EffectiveGains g;
  g.K = K;
  g.N = N;
  g.M = cfg.num_aps;
  g.mode = mode;
  g.cluster = dep.cluster;
  g.sigma2 = cfg.sigma2();
  const double lambda = cfg.wavelength_m();
  g.ipd_factor = 4.0 * M_PI / (lambda * lambda);

  g.dl_eval.assign(K, std::vector<CVec>(K, CVec(N, cdouble(0.0))));
  g.dl_phys.assign(K, std::vector<CVec>(K, CVec(N, cdouble(0.0))));
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      for (int i = 0; i < N; ++i) {
        const int m = dep.cluster[j][i];
        const CVec& b = beams.b[j][m];
        const CVec& h_true = ch.h[k][m];
        g.dl_phys[k][j][i] = cdot(h_true, b);
        const CVec& h_eval = (mode == EvalMode::Estimated) ? est->hhat[k][m] : h_true;
        g.dl_eval[k][j][i] = cdot(h_eval, b);
      }
    }
  }

  g.ul.assign(K, std::vector<cdouble>(K, cdouble(0.0)));
  g.ul_noise.assign(K, 0.0);
  const double eta2 = cfg.eta2();
  for (int k = 0; k < K; ++k) {
    for (int m : dep.cluster[k]) {
      const CVec& f = beams.f[k][m];
      g.ul_noise[k] += eta2 * cnorm2(f);
      for (int j = 0; j < K; ++j) {
        const CVec& h_eval = (mode == EvalMode::Estimated) ? est->hhat[j][m] : ch.h[j][m];
        g.ul[k][j] += cdot(f, h_eval);
      }
    }
  }
  return g;
}

RVec dl_sinr(const PowerAllocationDL& alloc, const EffectiveGains& gains) {
  const RVec d = alloc.flat_amplitudes(gains.cluster);
  RVec out(gains.K, 0.0);
  for (int k = 0; k < gains.K; ++k) {
    const double num = std::norm(gains.dl_composite(d, k, k));
    double den = gains.sigma2;
    for (int j = 0; j < gains.K; ++j) {
      if (j == k) continue;
      den += std::norm(gains.dl_composite(d, k, j));
    }
    out[k] = num / den;
  }
  return out;
}

RVec ul_sinr(const PowerAllocationUL& alloc, const EffectiveGains& gains) {
  RVec out(gains.K, 0.0);
  for (int k = 0; k < gains.K; ++k) {
    const double num = alloc.q[k] * std::norm(gains.ul[k][k]);
    double den = gains.ul_noise[k];
    for (int j = 0; j < gains.K; ++j) {
      if (j == k) continue;
      den += alloc.q[j] * std::norm(gains.ul[k][j]);
    }
    out[k] = num / den;
  }
  return out;
}

RVec ipd(const PowerAllocationDL& alloc, const EffectiveGains& gains) {
  const RVec d = alloc.flat_amplitudes(gains.cluster);
  RVec out(gains.K, 0.0);
  for (int k = 0; k < gains.K; ++k) {
    double s = 0.0;
    for (int j = 0; j < gains.K; ++j) s += std::norm(gains.dl_composite(d, k, j, true));
    out[k] = gains.ipd_factor * s;
  }
  return out;
}

std::vector<RVec> sar(const PowerAllocationUL& alloc, const SystemConfig& cfg) {
  std::vector<RVec> out(alloc.q.size(), RVec(cfg.sar.size(), 0.0));
  for (size_t k = 0; k < alloc.q.size(); ++k)
    for (size_t n = 0; n < cfg.sar.size(); ++n) out[k][n] = cfg.sar[n].coeff_per_kg * alloc.q[k];
  return out;
}

RVec rates(const RVec& sinr, const SystemConfig& cfg, Direction dir) {
  const double scale = cfg.prelog(dir) * cfg.bandwidth_hz;
  RVec out(sinr.size(), 0.0);
  for (size_t k = 0; k < sinr.size(); ++k) out[k] = scale * std::log2(1.0 + sinr[k]);
  return out;
}

double min_rate(const RVec& rate_bps) {
  double m = rate_bps.empty() ? 0.0 : rate_bps[0];
  for (double r : rate_bps) m = std::min(m, r);
  return m;
}

RateReport rate_report(const RVec& sinr, const SystemConfig& cfg, Direction dir) {
  RateReport rep;
  rep.sinr = sinr;
  rep.rate_bps = rates(sinr, cfg, dir);
  rep.min_rate_bps = min_rate(rep.rate_bps);
  return rep;
}

ComplianceReport dl_compliance(const PowerAllocationDL& alloc, const EffectiveGains& gains,
                               const SystemConfig& cfg) {
  ComplianceReport rep;
  for (int m = 0; m < alloc.M; ++m) {
    double sum = 0.0;
    for (int k = 0; k < alloc.K; ++k) sum += alloc.at(k, m);
    rep.ap_budget = std::max(rep.ap_budget, (sum - cfg.ap_power_w) / cfg.ap_power_w);
  }
  if (std::isfinite(cfg.ipd_limit_w_m2)) {
    const RVec xi = ipd(alloc, gains);
    for (double v : xi)
      rep.ipd = std::max(rep.ipd, (v - cfg.ipd_limit_w_m2) / cfg.ipd_limit_w_m2);
  }
  rep.ap_budget = std::max(rep.ap_budget, 0.0);
  rep.ipd = std::max(rep.ipd, 0.0);
  return rep;
}

ComplianceReport ul_compliance(const PowerAllocationUL& alloc, const SystemConfig& cfg) {
  ComplianceReport rep;
  const auto eps = sar(alloc, cfg);
  for (size_t k = 0; k < alloc.q.size(); ++k) {
    rep.ue_cap = std::max(rep.ue_cap, (alloc.q[k] - cfg.ue_power_w) / cfg.ue_power_w);
    for (size_t n = 0; n < cfg.sar.size(); ++n) {
      if (!std::isfinite(cfg.sar[n].limit_w_per_kg)) continue;
      rep.sar = std::max(rep.sar, (eps[k][n] - cfg.sar[n].limit_w_per_kg) / cfg.sar[n].limit_w_per_kg);
    }
  }
  rep.ue_cap = std::max(rep.ue_cap, 0.0);
  rep.sar = std::max(rep.sar, 0.0);
  return rep;
}

} // namespace cfpc
