#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cfpc/csi.hpp"
#include "cfpc/linalg.hpp"
#include "cfpc/scenario.hpp"

using namespace cfpc;

namespace {

SystemConfig paper_system() { return SystemConfig{}; } // K=8, M=16, L=4, N=5

// Trace of a complex matrix (real part).
double trace_re(const CMat& m) {
  double t = 0.0;
  for (int i = 0; i < m.n; ++i) t += m.at(i, i).real();
  return t;
}

} // namespace

TEST_CASE("pilot book: scaled DFT rows, unit norm, orthogonal, round-robin") {
  const SystemConfig sys = paper_system();
  const PilotBook book = assign_pilots(sys);
  REQUIRE(book.tau_p == 4); // K/2 by default
  REQUIRE(static_cast<int>(book.seq.size()) == 4);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(static_cast<int>(book.seq[i].size()) == 4);
    for (int j = 0; j < 4; ++j) {
      const double corr = std::abs(cdot(book.seq[i], book.seq[j]));
      if (i == j)
        CHECK(corr == doctest::Approx(1.0).epsilon(1e-12));
      else
        CHECK(corr < 1e-12);
    }
  }
  for (int k = 0; k < sys.num_ues; ++k) CHECK(book.assignment[k] == k % 4);
}

TEST_CASE("pilot book with as many sequences as UEs is orthogonal per UE") {
  SystemConfig sys = paper_system();
  sys.pilot_len = sys.num_ues;
  const PilotBook book = assign_pilots(sys);
  for (int k = 0; k < sys.num_ues; ++k) CHECK(book.assignment[k] == k);
}

TEST_CASE("spatial covariance: trace, Rayleigh limit, positive semidefinite") {
  const CMat c = spatial_covariance(0.37, 2.5, 0.8, 4);
  CHECK(trace_re(c) == doctest::Approx(0.37 * 4).epsilon(1e-12));

  const CMat c0 = spatial_covariance(0.5, 0.0, 1.1, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(c0.at(i, j).real() == doctest::Approx(0.5).epsilon(1e-12));
      else
        CHECK(std::abs(c0.at(i, j)) < 1e-15);
    }

  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    CVec v(4);
    for (auto& x : v) x = rng.cnormal();
    const CVec cv = c.mul(v);
    CHECK(cdot(v, cv).real() >= -1e-12);
  }
}

TEST_CASE("vanishing pilot noise with orthogonal pilots recovers the channel") {
  SystemConfig sys;
  sys.num_ues = 2;
  sys.num_aps = 2;
  sys.antennas_per_ap = 2;
  sys.cluster_size = 1;
  sys.pilot_len = 2;            // orthogonal pilots, no contamination
  sys.pilot_noise_var_w = 1e-30;

  auto [dep, ls] = generate_deployment(sys, 3);
  const ChannelRealization ch = draw_channels(dep, ls, sys, 17);
  const PilotBook book = assign_pilots(sys);
  Rng est_rng(29);
  const ChannelEstimateSet est = estimate_channels(ch, ls, book, sys, est_rng);

  for (int k = 0; k < sys.num_ues; ++k)
    for (int m = 0; m < sys.num_aps; ++m) {
      double err = 0.0;
      for (int l = 0; l < sys.antennas_per_ap; ++l)
        err += std::norm(est.hhat[k][m][l] - ch.h[k][m][l]);
      CHECK(std::sqrt(err / cnorm2(ch.h[k][m])) < 1e-5);
      // analytic error collapses with the noise
      CHECK(est.mse[k][m] < 1e-6 * ls.alpha[k][m]);
    }
}

TEST_CASE("empirical estimation error matches the analytic value under contamination") {
  SystemConfig sys;
  sys.num_ues = 2;
  sys.num_aps = 1;
  sys.antennas_per_ap = 2;
  sys.cluster_size = 1;
  sys.pilot_len = 1; // both UEs share the single pilot

  auto [dep, ls] = generate_deployment(sys, 12);
  const PilotBook book = assign_pilots(sys);

  Rng ch_rng(100);
  Rng est_rng(200);
  const int draws = 10000;
  double emp0 = 0.0, emp1 = 0.0, ana0 = 0.0, ana1 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const ChannelRealization ch = draw_channels(dep, ls, sys, ch_rng);
    const ChannelEstimateSet est = estimate_channels(ch, ls, book, sys, est_rng);
    double e0 = 0.0, e1 = 0.0;
    for (int l = 0; l < sys.antennas_per_ap; ++l) {
      e0 += std::norm(est.hhat[0][0][l] - ch.h[0][0][l]);
      e1 += std::norm(est.hhat[1][0][l] - ch.h[1][0][l]);
    }
    emp0 += e0;
    emp1 += e1;
    ana0 = est.mse[0][0];
    ana1 = est.mse[1][0];
  }
  emp0 /= draws;
  emp1 /= draws;
  CHECK(emp0 == doctest::Approx(ana0).epsilon(0.03));
  CHECK(emp1 == doctest::Approx(ana1).epsilon(0.03));
  // error never exceeds the prior trace
  CHECK(ana0 <= ls.alpha[0][0] * sys.antennas_per_ap * (1 + 1e-12));
  CHECK(ana0 >= 0.0);
}

TEST_CASE("shared pilot with proportional covariances yields parallel estimates") {
  SystemConfig sys;
  sys.num_ues = 2;
  sys.num_aps = 1;
  sys.antennas_per_ap = 2;
  sys.cluster_size = 1;
  sys.pilot_len = 1;

  auto [dep, ls] = generate_deployment(sys, 6);
  // same angle and Ricean factor, gains off by a factor: C_1 proportional to C_0
  ls.theta[1][0] = ls.theta[0][0];
  ls.beta[1][0] = ls.beta[0][0];
  ls.alpha[1][0] = 3.0 * ls.alpha[0][0];

  const ChannelRealization ch = draw_channels(dep, ls, sys, 31);
  const PilotBook book = assign_pilots(sys);
  Rng est_rng(37);
  const ChannelEstimateSet est = estimate_channels(ch, ls, book, sys, est_rng);

  const CVec& a = est.hhat[0][0];
  const CVec& b = est.hhat[1][0];
  const double cosang = std::abs(cdot(a, b)) / std::sqrt(cnorm2(a) * cnorm2(b));
  CHECK(cosang == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scaling pilot power and pilot noise together leaves estimates unchanged") {
  SystemConfig sys;
  sys.num_ues = 4;
  sys.num_aps = 2;
  sys.antennas_per_ap = 2;
  sys.cluster_size = 1;

  auto [dep, ls] = generate_deployment(sys, 9);
  const ChannelRealization ch = draw_channels(dep, ls, sys, 41);
  const PilotBook book = assign_pilots(sys);

  Rng rng_a(55);
  const ChannelEstimateSet est_a = estimate_channels(ch, ls, book, sys, rng_a);

  SystemConfig scaled = sys;
  const double c = 7.3;
  scaled.pilot_power_w.assign(sys.num_ues, dbm_to_w(20.0) * c);
  scaled.pilot_noise_var_w = sys.eta2() * c;
  Rng rng_b(55);
  const ChannelEstimateSet est_b = estimate_channels(ch, ls, book, scaled, rng_b);

  for (int k = 0; k < sys.num_ues; ++k)
    for (int m = 0; m < sys.num_aps; ++m)
      for (int l = 0; l < sys.antennas_per_ap; ++l)
        CHECK(std::abs(est_a.hhat[k][m][l] - est_b.hhat[k][m][l]) <=
              1e-12 * std::abs(est_a.hhat[k][m][l]) + 1e-30);
}

TEST_CASE("estimation is deterministic in the noise stream") {
  SystemConfig sys;
  sys.num_ues = 2;
  sys.num_aps = 2;
  sys.antennas_per_ap = 2;
  sys.cluster_size = 1;
  auto [dep, ls] = generate_deployment(sys, 14);
  const ChannelRealization ch = draw_channels(dep, ls, sys, 15);
  const PilotBook book = assign_pilots(sys);
  Rng rng_a(16), rng_b(16);
  const ChannelEstimateSet a = estimate_channels(ch, ls, book, sys, rng_a);
  const ChannelEstimateSet b = estimate_channels(ch, ls, book, sys, rng_b);
  CHECK(a.hhat == b.hhat);
  CHECK(a.mse == b.mse);
}
