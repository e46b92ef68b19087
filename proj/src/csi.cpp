#include "cfpc/csi.hpp"

#include <cmath>

namespace cfpc {

PilotBook assign_pilots(const SystemConfig& cfg) {
  const int tau = cfg.tau_p();
  PilotBook book;
  book.tau_p = tau;
  book.seq.resize(tau);
  const double scale = 1.0 / std::sqrt(double(tau));
  for (int i = 0; i < tau; ++i) {
    CVec t(tau);
    for (int s = 0; s < tau; ++s) t[s] = std::polar(scale, -2.0 * M_PI * i * s / tau);
    book.seq[i] = std::move(t);
  }
  book.assignment.resize(cfg.num_ues);
  for (int k = 0; k < cfg.num_ues; ++k) book.assignment[k] = k % tau;
  return book;
}

CMat spatial_covariance(double alpha, double beta, double theta, int num_antennas) {
  const double scale = alpha / (1.0 + beta);
  CMat c = CMat::identity(num_antennas, scale);
  c.add_outer(steering_vector(theta, num_antennas), scale * beta);
  return c;
}

ChannelEstimateSet estimate_channels(const ChannelRealization& ch, const LargeScaleState& ls,
                                     const PilotBook& pilots, const SystemConfig& cfg, Rng& rng) {
  const int K = cfg.num_ues, M = cfg.num_aps, L = cfg.antennas_per_ap;
  const int tau = pilots.tau_p;
  const double eta2 = cfg.eta2();

  // Pilot cross-correlations |t_j^H t_k|^2 (0 or 1 for the DFT book, but
  // computed from the sequences so any book plugs in).
  std::vector<std::vector<double>> xcorr(K, std::vector<double>(K, 0.0));
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k)
      xcorr[j][k] = std::norm(cdot(pilots.seq[pilots.assignment[j]],
                                   pilots.seq[pilots.assignment[k]]));

  // Despread observations: one per (pilot, AP) pair, shared by every UE on
  // that pilot. Noise is independent of the payload-phase noise.
  std::vector<std::vector<CVec>> obs(tau, std::vector<CVec>(M));
  for (int m = 0; m < M; ++m) {
    for (int p = 0; p < tau; ++p) {
      CVec u(L, cdouble(0.0));
      for (int j = 0; j < K; ++j) {
        if (pilots.assignment[j] != p) continue;
        const double amp = std::sqrt(tau * cfg.pilot_power(j));
        for (int l = 0; l < L; ++l) u[l] += amp * ch.h[j][m][l];
      }
      const double noise_amp = std::sqrt(eta2);
      for (int l = 0; l < L; ++l) u[l] += noise_amp * rng.cnormal();
      obs[p][m] = std::move(u);
    }
  }

  ChannelEstimateSet est;
  est.hhat.assign(K, std::vector<CVec>(M));
  est.mse.assign(K, std::vector<double>(M, 0.0));

  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const CMat c_k = spatial_covariance(ls.alpha[k][m], ls.beta[k][m], ls.theta[k][m], L);

      // D = sum_j tau mu_j |t_j^H t_k|^2 C_j + eta^2 I over the same AP.
      CMat d = CMat::identity(L, eta2);
      for (int j = 0; j < K; ++j) {
        const double w = tau * cfg.pilot_power(j) * xcorr[j][k];
        if (w == 0.0) continue;
        const CMat c_j = spatial_covariance(ls.alpha[j][m], ls.beta[j][m], ls.theta[j][m], L);
        for (size_t i = 0; i < d.a.size(); ++i) d.a[i] += w * c_j.a[i];
      }

      CMat d_chol = d;
      if (!cholesky(d_chol)) throw std::runtime_error("estimate_channels: despread covariance not PD");

      const double amp = std::sqrt(tau * cfg.pilot_power(k));
      const CVec x = cholesky_solve(d_chol, obs[pilots.assignment[k]][m]);
      CVec hhat = c_k.mul(x);
      for (auto& v : hhat) v *= amp;
      est.hhat[k][m] = std::move(hhat);

      // Error covariance C - tau mu C D^-1 C; only the trace is kept.
      double err = 0.0;
      for (int i = 0; i < L; ++i) err += c_k.at(i, i).real();
      for (int col = 0; col < L; ++col) {
        CVec c_col(L);
        for (int i = 0; i < L; ++i) c_col[i] = c_k.at(i, col);
        const CVec y = cholesky_solve(d_chol, c_col);
        err -= (amp * amp) * cdot(c_col, y).real();
      }
      est.mse[k][m] = err;
    }
  }
  return est;
}

} // namespace cfpc
