#include "cfpc/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfpc {

PowerAllocationDL fpc_dl(const LargeScaleState& ls, const Deployment& dep,
                         const SystemConfig& cfg, double kappa) {
  const int K = cfg.num_ues, M = cfg.num_aps;
  PowerAllocationDL alloc = PowerAllocationDL::zeros(K, M);
  for (int m = 0; m < M; ++m) {
    double denom = 0.0;
    for (int k = 0; k < K; ++k)
      if (dep.assoc[k][m]) denom += std::pow(ls.alpha[k][m], kappa);
    if (denom == 0.0) continue; // AP serves nobody
    for (int k = 0; k < K; ++k)
      if (dep.assoc[k][m])
        alloc.at(k, m) = cfg.ap_power_w * std::pow(ls.alpha[k][m], kappa) / denom;
  }
  return alloc;
}

PowerAllocationUL fpc_ul(const LargeScaleState& ls, const Deployment& dep,
                         const SystemConfig& cfg, double kappa) {
  const int K = cfg.num_ues, M = cfg.num_aps;
  RVec weight(K, 0.0);
  double peak = 0.0;
  for (int k = 0; k < K; ++k) {
    double agg = 0.0;
    for (int m = 0; m < M; ++m)
      if (dep.assoc[k][m]) agg += ls.alpha[k][m];
    weight[k] = std::pow(agg, kappa);
    peak = std::max(peak, weight[k]);
  }
  PowerAllocationUL alloc;
  alloc.q.assign(K, 0.0);
  for (int k = 0; k < K; ++k) alloc.q[k] = cfg.ue_power_w * weight[k] / peak;
  return emf_scale_ul(std::move(alloc), cfg);
}

PowerAllocationUL emf_scale_ul(PowerAllocationUL q, const SystemConfig& cfg) {
  double cap = std::numeric_limits<double>::infinity();
  for (const auto& s : cfg.sar) cap = std::min(cap, s.limit_w_per_kg / s.coeff_per_kg);
  for (auto& v : q.q) v = std::min(v, cap);
  return q;
}

} // namespace cfpc
