#include "cfpc/beamforming.hpp"

#include <cmath>

#include "cfpc/linalg.hpp"

namespace cfpc {

namespace {

CVec unit_matched_precoder(const CVec& hhat) {
  const double norm = std::sqrt(cnorm2(hhat));
  if (!(norm > 0.0))
    throw std::invalid_argument("conjugate precoder: channel estimate has zero norm");
  CVec b(hhat.size());
  for (size_t l = 0; l < hhat.size(); ++l) b[l] = hhat[l] / norm;
  return b;
}

} // namespace

BeamformerSet conjugate_beamformers(const ChannelEstimateSet& est, const Deployment& dep,
                                    const SystemConfig& cfg) {
  const int K = cfg.num_ues, M = cfg.num_aps;
  BeamformerSet set;
  set.kind = BeamformerKind::ConjugateBeamforming;
  set.b.assign(K, std::vector<CVec>(M));
  set.f.assign(K, std::vector<CVec>(M));
  for (int k = 0; k < K; ++k) {
    for (int m : dep.cluster[k]) {
      set.b[k][m] = unit_matched_precoder(est.hhat[k][m]);
      set.f[k][m] = est.hhat[k][m];
    }
  }
  return set;
}

BeamformerSet rzf_combiners(const ChannelEstimateSet& est, const Deployment& dep,
                            const SystemConfig& cfg) {
  const int K = cfg.num_ues, M = cfg.num_aps, L = cfg.antennas_per_ap;
  BeamformerSet set;
  set.kind = BeamformerKind::RegularizedZeroForcing;
  set.b.assign(K, std::vector<CVec>(M));
  set.f.assign(K, std::vector<CVec>(M));

  // One regularized Gram factorization per AP, shared by its served UEs.
  for (int m = 0; m < M; ++m) {
    bool serves = false;
    for (int k = 0; k < K && !serves; ++k) serves = dep.assoc[k][m] != 0;
    if (!serves) continue;

    // The regularizer is the AP-side (pilot-phase) noise variance.
    CMat gram = CMat::identity(L, cfg.eta2());
    for (int j = 0; j < K; ++j) gram.add_outer(est.hhat[j][m], cfg.pilot_power(j));
    if (!cholesky(gram)) throw std::runtime_error("rzf_combiners: Gram matrix not PD");

    for (int k = 0; k < K; ++k) {
      if (!dep.assoc[k][m]) continue;
      CVec f = cholesky_solve(gram, est.hhat[k][m]);
      const double mu = cfg.pilot_power(k);
      for (auto& v : f) v *= mu;
      set.f[k][m] = std::move(f);
      set.b[k][m] = unit_matched_precoder(est.hhat[k][m]);
    }
  }
  return set;
}

} // namespace cfpc
