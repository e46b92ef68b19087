#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cfpc/linalg.hpp"
#include "cfpc/scenario.hpp"

using namespace cfpc;

namespace {

SystemConfig small_system() {
  SystemConfig sys;
  sys.num_ues = 4;
  sys.num_aps = 8;
  sys.antennas_per_ap = 2;
  sys.cluster_size = 3;
  return sys;
}

} // namespace

TEST_CASE("wrap_delta picks the short way around the torus") {
  CHECK(wrap_delta(1.0, 9.0, 10.0) == doctest::Approx(-2.0));
  CHECK(wrap_delta(9.0, 1.0, 10.0) == doctest::Approx(2.0));
  CHECK(wrap_delta(2.0, 5.0, 10.0) == doctest::Approx(3.0));

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0.0, 10.0);
    const double b = rng.uniform(0.0, 10.0);
    const double d = wrap_delta(a, b, 10.0);
    CHECK(std::abs(d) <= 5.0 + 1e-12);
    CHECK(wrap_delta(b, a, 10.0) == doctest::Approx(-d));
  }
}

TEST_CASE("path loss at 100 m and 3.5 GHz") {
  CHECK(path_loss_db(100.0, 3.5) == doctest::Approx(110.24576915310718).epsilon(1e-12));
  // monotone in distance
  CHECK(path_loss_db(200.0, 3.5) > path_loss_db(100.0, 3.5));
}

TEST_CASE("LoS probability curve") {
  CHECK(prob_los(36.0) == doctest::Approx(0.6839397205857212).epsilon(1e-12));
  // the raw formula saturates at 1 below the 18 m breakpoint; the configured
  // cap is applied when the Ricean factor is derived
  CHECK(prob_los(10.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(prob_los(50000.0) < 1e-3);
  CHECK(prob_los(50.0) > prob_los(80.0));
}

TEST_CASE("steering vector entries and norm") {
  const CVec broadside = steering_vector(0.0, 4);
  for (const auto& x : broadside) {
    CHECK(x.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(x.imag()) < 1e-15);
  }

  const CVec endfire = steering_vector(M_PI / 2.0, 2);
  CHECK(endfire[0].real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(endfire[1].real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(endfire[1].imag()) < 1e-12);

  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const CVec v = steering_vector(rng.uniform(-M_PI, M_PI), 4);
    CHECK(cnorm2(v) == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("deployment geometry, large-scale state, and association") {
  const SystemConfig sys = small_system();
  auto [dep, ls] = generate_deployment(sys, 42);

  REQUIRE(static_cast<int>(dep.ap_pos.size()) == sys.num_aps);
  REQUIRE(static_cast<int>(dep.ue_pos.size()) == sys.num_ues);
  for (const auto& p : dep.ap_pos) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < sys.area_side_m);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < sys.area_side_m);
    CHECK(p[2] == sys.ap_height_m);
  }
  for (const auto& p : dep.ue_pos) CHECK(p[2] == sys.ue_height_m);

  for (int k = 0; k < sys.num_ues; ++k) {
    for (int m = 0; m < sys.num_aps; ++m) {
      // minimum horizontal separation holds with wrap-around
      const double dx = wrap_delta(dep.ap_pos[m][0], dep.ue_pos[k][0], sys.area_side_m);
      const double dy = wrap_delta(dep.ap_pos[m][1], dep.ue_pos[k][1], sys.area_side_m);
      CHECK(std::hypot(dx, dy) >= sys.min_ue_ap_dist_m);
      // stored distance is the 3-D wrap-around distance
      const double dz = sys.ue_height_m - sys.ap_height_m;
      CHECK(ls.dist[k][m] ==
            doctest::Approx(std::sqrt(dx * dx + dy * dy + dz * dz)).epsilon(1e-12));
      // Ricean factor comes from the capped LoS probability at that distance
      const double p = std::min(prob_los(ls.dist[k][m]), sys.plos_cap);
      CHECK(ls.beta[k][m] == doctest::Approx(p / (1.0 - p)).epsilon(1e-12));
      CHECK(ls.beta[k][m] <= sys.plos_cap / (1.0 - sys.plos_cap) + 1e-9);
      CHECK(ls.alpha[k][m] > 0.0);
    }
  }

  for (int k = 0; k < sys.num_ues; ++k) {
    int assoc_count = 0;
    for (int m = 0; m < sys.num_aps; ++m) assoc_count += dep.assoc[k][m];
    CHECK(assoc_count == sys.cluster_size);
    REQUIRE(static_cast<int>(dep.cluster[k].size()) == sys.cluster_size);
    // serving APs listed in ascending index order
    for (size_t i = 1; i < dep.cluster[k].size(); ++i)
      CHECK(dep.cluster[k][i - 1] < dep.cluster[k][i]);
    // every chosen AP is at least as strong as every AP left out
    double weakest_in = std::numeric_limits<double>::infinity();
    for (int m : dep.cluster[k]) weakest_in = std::min(weakest_in, ls.alpha[k][m]);
    for (int m = 0; m < sys.num_aps; ++m)
      if (!dep.assoc[k][m]) CHECK(ls.alpha[k][m] <= weakest_in);
  }
}

TEST_CASE("deployment is deterministic in the seed") {
  const SystemConfig sys = small_system();
  auto [dep_a, ls_a] = generate_deployment(sys, 42);
  auto [dep_b, ls_b] = generate_deployment(sys, 42);
  CHECK(dep_a.ue_pos == dep_b.ue_pos);
  CHECK(dep_a.ap_pos == dep_b.ap_pos);
  CHECK(dep_a.cluster == dep_b.cluster);
  CHECK(ls_a.alpha == ls_b.alpha);
  CHECK(ls_a.psi == ls_b.psi);

  auto [dep_c, ls_c] = generate_deployment(sys, 43);
  CHECK(dep_c.ue_pos != dep_a.ue_pos);
}

TEST_CASE("redraw_phases touches only the LoS phases") {
  const SystemConfig sys = small_system();
  auto [dep, ls] = generate_deployment(sys, 5);
  const LargeScaleState before = ls;
  Rng rng(77);
  redraw_phases(ls, rng);
  CHECK(ls.alpha == before.alpha);
  CHECK(ls.beta == before.beta);
  CHECK(ls.theta == before.theta);
  CHECK(ls.dist == before.dist);
  CHECK(ls.psi != before.psi);
  for (const auto& row : ls.psi)
    for (double psi : row) {
      CHECK(psi >= 0.0);
      CHECK(psi < 2.0 * M_PI);
    }
}

TEST_CASE("channel second moment matches the large-scale gain") {
  SystemConfig sys;
  sys.num_ues = 1;
  sys.pilot_len = 1;
  sys.num_aps = 1;
  sys.antennas_per_ap = 4;
  sys.cluster_size = 1;
  auto [dep, ls] = generate_deployment(sys, 5);
  const double alpha = ls.alpha[0][0];

  Rng rng(99);
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const ChannelRealization ch = draw_channels(dep, ls, sys, rng);
    acc += cnorm2(ch.h[0][0]);
  }
  const double ratio = acc / draws / (alpha * sys.antennas_per_ap);
  CHECK(ratio > 0.97);
  CHECK(ratio < 1.03);
}

TEST_CASE("zero Ricean factor leaves a zero-mean channel with per-antenna variance alpha") {
  SystemConfig sys;
  sys.num_ues = 1;
  sys.pilot_len = 1;
  sys.num_aps = 1;
  sys.antennas_per_ap = 2;
  sys.cluster_size = 1;
  auto [dep, ls] = generate_deployment(sys, 11);
  ls.beta[0][0] = 0.0;
  const double alpha = ls.alpha[0][0];

  Rng rng(123);
  cdouble mean0 = 0.0;
  double pow0 = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const ChannelRealization ch = draw_channels(dep, ls, sys, rng);
    mean0 += ch.h[0][0][0];
    pow0 += std::norm(ch.h[0][0][0]);
  }
  mean0 /= static_cast<double>(draws);
  pow0 /= static_cast<double>(draws);
  // mean within 4 standard errors of zero, second moment within 5%
  const double se = std::sqrt(alpha / draws);
  CHECK(std::abs(mean0) < 4.0 * se);
  CHECK(pow0 == doctest::Approx(alpha).epsilon(0.05));
}

TEST_CASE("strong Ricean factor concentrates the channel on the LoS ray") {
  SystemConfig sys;
  sys.num_ues = 1;
  sys.pilot_len = 1;
  sys.num_aps = 1;
  sys.antennas_per_ap = 4;
  sys.cluster_size = 1;
  auto [dep, ls] = generate_deployment(sys, 21);
  ls.beta[0][0] = 1e6;
  const double alpha = ls.alpha[0][0];
  const int L = sys.antennas_per_ap;

  const ChannelRealization ch = draw_channels(dep, ls, sys, 9001);
  const CVec v = steering_vector(ls.theta[0][0], L);
  const cdouble ray = std::polar(1.0, ls.psi[0][0]);
  for (int l = 0; l < L; ++l) {
    const cdouble expected = std::sqrt(alpha) * ray * v[l];
    CHECK(std::abs(ch.h[0][0][l] - expected) < 1e-2 * std::sqrt(alpha));
  }
}

TEST_CASE("seeded channel draw overload matches a fresh generator") {
  const SystemConfig sys = small_system();
  auto [dep, ls] = generate_deployment(sys, 8);
  Rng rng(314);
  const ChannelRealization a = draw_channels(dep, ls, sys, rng);
  const ChannelRealization b = draw_channels(dep, ls, sys, 314);
  CHECK(a.h == b.h);
}
