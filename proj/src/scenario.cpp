#include "cfpc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfpc {

double wrap_delta(double from, double to, double side) {
  double d = to - from;
  d -= side * std::round(d / side);
  return d;
}

double path_loss_db(double dist_m, double fc_ghz) {
  return 36.7 * std::log10(dist_m) + 22.7 + 26.0 * std::log10(fc_ghz);
}

double prob_los(double dist_m) {
  const double decay = std::exp(-dist_m / 36.0);
  return std::min(18.0 / dist_m, 1.0) * (1.0 - decay) + decay;
}

CVec steering_vector(double theta, int num_antennas) {
  CVec v(num_antennas);
  const double s = std::sin(theta);
  for (int l = 0; l < num_antennas; ++l) v[l] = std::polar(1.0, M_PI * l * s);
  return v;
}

namespace {

// 3-D link distance and the angle the UE subtends at the AP array, both with
// wrap-around in the horizontal plane.
struct LinkGeometry {
  double dist;
  double theta;
};

LinkGeometry link_geometry(const std::array<double, 3>& ap, double orient,
                           const std::array<double, 3>& ue, double side) {
  const double dx = wrap_delta(ap[0], ue[0], side);
  const double dy = wrap_delta(ap[1], ue[1], side);
  const double dz = ue[2] - ap[2];
  const double d2 = std::hypot(dx, dy);
  double theta = std::atan2(dy, dx) - orient;
  theta = std::remainder(theta, 2.0 * M_PI);
  return {std::sqrt(d2 * d2 + dz * dz), theta};
}

} // namespace

std::pair<Deployment, LargeScaleState> generate_deployment(const SystemConfig& cfg, uint64_t seed) {
  cfg.validate();
  const int K = cfg.num_ues, M = cfg.num_aps;
  const double side = cfg.area_side_m;
  Rng rng(seed);

  Deployment dep;
  dep.ap_pos.resize(M);
  dep.ap_orient.resize(M);
  dep.ue_pos.resize(K);
  for (int m = 0; m < M; ++m) {
    dep.ap_pos[m] = {rng.uniform(0.0, side), rng.uniform(0.0, side), cfg.ap_height_m};
    dep.ap_orient[m] = rng.uniform(0.0, 2.0 * M_PI);
  }

  // UEs are redrawn until they clear the minimum 2-D distance to every AP.
  for (int k = 0; k < K; ++k) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 100000)
        throw std::runtime_error("generate_deployment: min UE-AP distance cannot be satisfied");
      const double x = rng.uniform(0.0, side);
      const double y = rng.uniform(0.0, side);
      bool ok = true;
      for (int m = 0; m < M && ok; ++m) {
        const double dx = wrap_delta(dep.ap_pos[m][0], x, side);
        const double dy = wrap_delta(dep.ap_pos[m][1], y, side);
        ok = std::hypot(dx, dy) >= cfg.min_ue_ap_dist_m;
      }
      if (ok) {
        dep.ue_pos[k] = {x, y, cfg.ue_height_m};
        break;
      }
    }
  }

  LargeScaleState ls;
  auto grid = [&](std::vector<std::vector<double>>& v) {
    v.assign(K, std::vector<double>(M, 0.0));
  };
  grid(ls.alpha);
  grid(ls.beta);
  grid(ls.theta);
  grid(ls.psi);
  grid(ls.dist);

  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const LinkGeometry geo =
          link_geometry(dep.ap_pos[m], dep.ap_orient[m], dep.ue_pos[k], side);
      ls.dist[k][m] = geo.dist;
      ls.theta[k][m] = geo.theta;
      const double pl_db = path_loss_db(geo.dist, cfg.carrier_freq_ghz);
      const double shadow_db = cfg.shadowing_std_db * rng.normal();
      ls.alpha[k][m] = db_to_lin(-pl_db + shadow_db);
      const double p = std::min(prob_los(geo.dist), cfg.plos_cap);
      ls.beta[k][m] = p / (1.0 - p);
      ls.psi[k][m] = rng.uniform(0.0, 2.0 * M_PI);
    }
  }

  // User-centric association: each UE picks its cluster_size strongest APs,
  // ties broken toward the lower AP index.
  dep.assoc.assign(K, std::vector<int>(M, 0));
  dep.cluster.assign(K, std::vector<int>());
  for (int k = 0; k < K; ++k) {
    std::vector<int> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ls.alpha[k][a] > ls.alpha[k][b]; });
    order.resize(cfg.cluster_size);
    std::sort(order.begin(), order.end());
    dep.cluster[k] = order;
    for (int m : order) dep.assoc[k][m] = 1;
  }

  return {std::move(dep), std::move(ls)};
}

void redraw_phases(LargeScaleState& ls, Rng& rng) {
  for (auto& row : ls.psi)
    for (auto& psi : row) psi = rng.uniform(0.0, 2.0 * M_PI);
}

ChannelRealization draw_channels(const Deployment& dep, const LargeScaleState& ls,
                                 const SystemConfig& cfg, Rng& rng) {
  const int K = cfg.num_ues, M = cfg.num_aps, L = cfg.antennas_per_ap;
  (void)dep;
  ChannelRealization ch;
  ch.h.assign(K, std::vector<CVec>(M));
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const double beta = ls.beta[k][m];
      const double scale = std::sqrt(ls.alpha[k][m] / (1.0 + beta));
      const cdouble los_coeff = std::polar(std::sqrt(beta), ls.psi[k][m]);
      const CVec v = steering_vector(ls.theta[k][m], L);
      CVec h(L);
      for (int l = 0; l < L; ++l) h[l] = scale * (los_coeff * v[l] + rng.cnormal());
      ch.h[k][m] = std::move(h);
    }
  }
  return ch;
}

ChannelRealization draw_channels(const Deployment& dep, const LargeScaleState& ls,
                                 const SystemConfig& cfg, uint64_t seed) {
  Rng rng(seed);
  return draw_channels(dep, ls, cfg, rng);
}

} // namespace cfpc
