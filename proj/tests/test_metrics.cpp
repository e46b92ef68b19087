#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cfpc/beamforming.hpp"
#include "cfpc/metrics.hpp"
#include "cfpc/scenario.hpp"

using namespace cfpc;

namespace {

// Two UEs, one shared single-antenna AP, every composite gain equal to one.
EffectiveGains unit_gains_two_ues() {
  EffectiveGains g;
  g.K = 2;
  g.N = 1;
  g.M = 1;
  g.mode = EvalMode::TrueChannel;
  g.cluster = {{0}, {0}};
  g.dl_eval.assign(2, std::vector<CVec>(2, CVec{cdouble(1.0, 0.0)}));
  g.dl_phys = g.dl_eval;
  g.ul.assign(2, std::vector<cdouble>(2, cdouble(1.0, 0.0)));
  g.ul_noise = {1.0, 1.0};
  g.sigma2 = 1.0;
  g.ipd_factor = 1.0;
  return g;
}

struct RandomScenario {
  SystemConfig sys;
  Deployment dep;
  EffectiveGains gains;
};

RandomScenario small_scenario(uint64_t seed) {
  RandomScenario s;
  s.sys.num_ues = 4;
  s.sys.num_aps = 8;
  s.sys.antennas_per_ap = 2;
  s.sys.cluster_size = 3;
  auto [dep, ls] = generate_deployment(s.sys, seed);
  const ChannelRealization ch = draw_channels(dep, ls, s.sys, seed + 1);
  const BeamformerSet beams = [&] {
    Rng est_rng(seed + 2);
    const ChannelEstimateSet est =
        estimate_channels(ch, ls, assign_pilots(s.sys), s.sys, est_rng);
    return conjugate_beamformers(est, dep, s.sys);
  }();
  s.gains = build_gains(dep, ch, nullptr, beams, s.sys, EvalMode::TrueChannel);
  s.dep = dep;
  return s;
}

} // namespace

TEST_CASE("downlink SINR of a symmetric two-UE system") {
  const EffectiveGains g = unit_gains_two_ues();
  PowerAllocationDL alloc = PowerAllocationDL::zeros(2, 1);
  alloc.at(0, 0) = 1.0;
  alloc.at(1, 0) = 1.0;
  const RVec s = dl_sinr(alloc, g);
  REQUIRE(s.size() == 2);
  // signal 1, interference 1, noise 1
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-15));

  // silent network: zero SINR
  const RVec z = dl_sinr(PowerAllocationDL::zeros(2, 1), g);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);

  // only UE 0 active: no interference at UE 0, pure interference at UE 1
  PowerAllocationDL solo = PowerAllocationDL::zeros(2, 1);
  solo.at(0, 0) = 4.0;
  const RVec s1 = dl_sinr(solo, g);
  CHECK(s1[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(s1[1] == 0.0);
}

TEST_CASE("uplink SINR from hand-set combiner gains") {
  // f = h = [1, i]: composite gain f^H h = 2, filtered noise 0.5 * ||f||^2 = 1
  EffectiveGains g;
  g.K = 1;
  g.N = 1;
  g.M = 1;
  g.cluster = {{0}};
  g.ul = {{cdouble(2.0, 0.0)}};
  g.ul_noise = {1.0};
  g.sigma2 = 0.5;
  PowerAllocationUL q;
  q.q = {0.2};
  const RVec s = ul_sinr(q, g);
  CHECK(s[0] == doctest::Approx(0.8).epsilon(1e-15));

  // two-UE cross interference
  const EffectiveGains g2 = unit_gains_two_ues();
  PowerAllocationUL q2;
  q2.q = {0.3, 0.1};
  const RVec s2 = ul_sinr(q2, g2);
  CHECK(s2[0] == doctest::Approx(0.3 / (0.1 + 1.0)).epsilon(1e-15));
  CHECK(s2[1] == doctest::Approx(0.1 / (0.3 + 1.0)).epsilon(1e-15));
}

TEST_CASE("incident power density scales squared receive amplitude by 4*pi/lambda^2") {
  EffectiveGains g = unit_gains_two_ues();
  g.ipd_factor = 7.5;
  PowerAllocationDL alloc = PowerAllocationDL::zeros(2, 1);
  alloc.at(0, 0) = 1.0;
  alloc.at(1, 0) = 1.0;
  // both signals arrive with amplitude 1 at each UE
  const RVec x = ipd(alloc, g);
  CHECK(x[0] == doctest::Approx(7.5 * 2.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(7.5 * 2.0).epsilon(1e-15));
}

TEST_CASE("exposure factor and decomposition on a drawn scenario") {
  const RandomScenario s = small_scenario(101);
  // 4*pi / lambda^2 at 3.5 GHz
  CHECK(s.gains.ipd_factor == doctest::Approx(1712.7916886360163).epsilon(1e-9));

  Rng rng(7);
  PowerAllocationDL alloc = PowerAllocationDL::zeros(s.gains.K, s.gains.M);
  for (int k = 0; k < s.gains.K; ++k)
    for (int m : s.gains.cluster[k]) alloc.at(k, m) = 0.05 * rng.uniform();
  const RVec x = ipd(alloc, s.gains);
  const RVec d = alloc.flat_amplitudes(s.gains.cluster);
  for (int k = 0; k < s.gains.K; ++k) {
    double total = 0.0;
    for (int j = 0; j < s.gains.K; ++j)
      total += std::norm(s.gains.dl_composite(d, k, j, /*physical=*/true));
    CHECK(x[k] == doctest::Approx(s.gains.ipd_factor * total).epsilon(1e-12));
  }
}

TEST_CASE("absorption metric is linear in transmit power per constraint") {
  SystemConfig sys;
  PowerAllocationUL q;
  q.q = {0.01, 0.02};
  const std::vector<RVec> e = sar(q, sys);
  REQUIRE(e.size() == 2);
  REQUIRE(e[0].size() == 1); // one body-part constraint by default
  CHECK(e[0][0] == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(e[1][0] == doctest::Approx(0.16).epsilon(1e-15));

  sys.sar = {SarConstraint{8.0, 0.08}, SarConstraint{2.0, 0.5}};
  const std::vector<RVec> e2 = sar(q, sys);
  REQUIRE(e2[0].size() == 2);
  CHECK(e2[0][0] == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(e2[0][1] == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(e2[1][1] == doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("rate map uses the duplexing prelog and the configured bandwidth") {
  SystemConfig sys; // K = 8 -> tau_p = 4, tau_d = tau_u = 98, prelog 0.49
  REQUIRE(sys.prelog(Direction::Downlink) == doctest::Approx(0.49).epsilon(1e-15));
  REQUIRE(sys.prelog(Direction::Uplink) == doctest::Approx(0.49).epsilon(1e-15));
  const RVec r = rates({1.0, 3.0, 0.0}, sys, Direction::Downlink);
  CHECK(r[0] == doctest::Approx(9.8e6).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(19.6e6).epsilon(1e-12));
  CHECK(r[2] == 0.0);
  CHECK(min_rate(r) == 0.0);
  CHECK(min_rate({5.0, 2.0, 3.0}) == 2.0);

  const RateReport rep = rate_report({1.0, 3.0}, sys, Direction::Uplink);
  CHECK(rep.sinr[1] == 3.0);
  CHECK(rep.rate_bps[0] == doctest::Approx(9.8e6).epsilon(1e-12));
  CHECK(rep.min_rate_bps == doctest::Approx(9.8e6).epsilon(1e-12));
}

TEST_CASE("amplitude flattening round-trips against the power grid") {
  const RandomScenario s = small_scenario(55);
  Rng rng(56);
  PowerAllocationDL alloc = PowerAllocationDL::zeros(s.gains.K, s.gains.M);
  for (int k = 0; k < s.gains.K; ++k)
    for (int m : s.gains.cluster[k]) alloc.at(k, m) = rng.uniform();
  const RVec d = alloc.flat_amplitudes(s.gains.cluster);
  REQUIRE(static_cast<int>(d.size()) == s.gains.dim());
  // entries are sqrt(power) in UE-major serving-AP order
  for (int k = 0; k < s.gains.K; ++k)
    for (int i = 0; i < s.gains.N; ++i)
      CHECK(d[k * s.gains.N + i] ==
            doctest::Approx(std::sqrt(alloc.at(k, s.gains.cluster[k][i]))).epsilon(1e-15));
  const PowerAllocationDL back =
      PowerAllocationDL::from_flat(d, s.gains.cluster, s.gains.K, s.gains.M);
  REQUIRE(back.p.size() == alloc.p.size());
  for (size_t i = 0; i < back.p.size(); ++i)
    CHECK(back.p[i] == doctest::Approx(alloc.p[i]).epsilon(1e-12));
}

TEST_CASE("downlink compliance reports the worst relative violation") {
  EffectiveGains g = unit_gains_two_ues();
  g.ipd_factor = 1.0;
  SystemConfig sys;
  sys.ap_power_w = 0.2;
  sys.ipd_limit_w_m2 = 10.0;

  PowerAllocationDL ok = PowerAllocationDL::zeros(2, 1);
  ok.at(0, 0) = 0.05;
  ok.at(1, 0) = 0.05;
  CHECK(dl_compliance(ok, g, sys).worst() == 0.0);

  PowerAllocationDL hot = PowerAllocationDL::zeros(2, 1);
  hot.at(0, 0) = 0.3;
  hot.at(1, 0) = 0.1; // AP radiates 0.4 against a 0.2 budget
  const ComplianceReport rep = dl_compliance(hot, g, sys);
  CHECK(rep.ap_budget == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.ipd == 0.0);
  CHECK(rep.worst() == doctest::Approx(1.0).epsilon(1e-12));

  sys.ipd_limit_w_m2 = 0.1; // exposure at each UE is ~ (sqrt(.3)+sqrt(.1))^2-ish
  CHECK(dl_compliance(hot, g, sys).ipd > 0.0);
}

TEST_CASE("uplink compliance covers absorption and the transmit cap") {
  SystemConfig sys; // cap min(0.1, 0.08/8) = 0.01 W
  PowerAllocationUL q;
  q.q = {0.02}; // twice the absorption-limited cap
  const ComplianceReport rep = ul_compliance(q, sys);
  CHECK(rep.sar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.ue_cap == 0.0); // still below the 0.1 W transmit cap
  q.q = {0.2};
  const ComplianceReport rep2 = ul_compliance(q, sys);
  CHECK(rep2.ue_cap == doctest::Approx(1.0).epsilon(1e-12));
  q.q = {0.009};
  CHECK(ul_compliance(q, sys).worst() == 0.0);
}
