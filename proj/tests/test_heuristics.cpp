#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cfpc/heuristics.hpp"
#include "cfpc/scenario.hpp"

using namespace cfpc;

namespace {

// Hand deployment: two UEs, both served only by AP 0, gains alpha = (1, 4).
struct HandPair {
  SystemConfig sys;
  Deployment dep;
  LargeScaleState ls;
};

HandPair shared_ap_pair() {
  HandPair h;
  h.sys.num_ues = 2;
  h.sys.num_aps = 1;
  h.sys.antennas_per_ap = 1;
  h.sys.cluster_size = 1;
  h.sys.pilot_len = 1;
  h.dep.assoc = {{1}, {1}};
  h.dep.cluster = {{0}, {0}};
  h.ls.alpha = {{1.0}, {4.0}};
  return h;
}

struct RandomScenario {
  SystemConfig sys;
  Deployment dep;
  LargeScaleState ls;
};

RandomScenario drawn(uint64_t seed) {
  RandomScenario s;
  s.sys.num_ues = 4;
  s.sys.num_aps = 8;
  s.sys.antennas_per_ap = 2;
  s.sys.cluster_size = 3;
  auto [dep, ls] = generate_deployment(s.sys, seed);
  s.dep = dep;
  s.ls = ls;
  return s;
}

} // namespace

TEST_CASE("fractional DL control splits each AP budget by gain to the half power") {
  HandPair h = shared_ap_pair();
  h.sys.ap_power_w = 0.6;
  const PowerAllocationDL p = fpc_dl(h.ls, h.dep, h.sys, 0.5);
  // weights sqrt(alpha) = (1, 2): shares 1/3 and 2/3 of 0.6 W
  CHECK(p.at(0, 0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p.at(1, 0) == doctest::Approx(0.4).epsilon(1e-12));

  // kappa = 0: uniform split regardless of gains
  const PowerAllocationDL u = fpc_dl(h.ls, h.dep, h.sys, 0.0);
  CHECK(u.at(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(u.at(1, 0) == doctest::Approx(0.3).epsilon(1e-12));

  // negative exponent favors the weaker UE
  const PowerAllocationDL o = fpc_dl(h.ls, h.dep, h.sys, -0.5);
  CHECK(o.at(0, 0) > o.at(1, 0));
  CHECK(o.at(0, 0) + o.at(1, 0) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("fractional DL control exhausts every serving AP and only serving links") {
  const RandomScenario s = drawn(71);
  for (double kappa : {0.0, 0.5, -0.5}) {
    const PowerAllocationDL p = fpc_dl(s.ls, s.dep, s.sys, kappa);
    for (int m = 0; m < s.sys.num_aps; ++m) {
      double spent = 0.0;
      bool serves = false;
      for (int k = 0; k < s.sys.num_ues; ++k) {
        if (!s.dep.assoc[k][m]) {
          CHECK(p.at(k, m) == 0.0);
        } else {
          serves = true;
          CHECK(p.at(k, m) > 0.0);
        }
        spent += p.at(k, m);
      }
      if (serves) CHECK(spent == doctest::Approx(s.sys.ap_power_w).epsilon(1e-12));
    }
  }
}

TEST_CASE("fractional DL shares depend on gains only through their ratios") {
  RandomScenario s = drawn(72);
  const PowerAllocationDL base = fpc_dl(s.ls, s.dep, s.sys, 0.5);
  for (auto& row : s.ls.alpha)
    for (double& a : row) a *= 37.0;
  const PowerAllocationDL scaled = fpc_dl(s.ls, s.dep, s.sys, 0.5);
  for (size_t i = 0; i < base.p.size(); ++i)
    CHECK(scaled.p[i] == doctest::Approx(base.p[i]).epsilon(1e-12));
}

TEST_CASE("fractional UL control: exponent zero sends the capped maximum") {
  HandPair h = shared_ap_pair();
  const PowerAllocationUL q = fpc_ul(h.ls, h.dep, h.sys, 0.0);
  // default absorption cap: 0.08 / 8 = 0.01 W, below the 0.1 W transmit cap
  CHECK(q.q[0] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(q.q[1] == doctest::Approx(0.01).epsilon(1e-12));

  h.sys.sar = {SarConstraint{8.0, 1e9}}; // absorption cap far above Q
  const PowerAllocationUL qf = fpc_ul(h.ls, h.dep, h.sys, 0.0);
  CHECK(qf.q[0] == doctest::Approx(h.sys.ue_power_w).epsilon(1e-12));
  CHECK(qf.q[1] == doctest::Approx(h.sys.ue_power_w).epsilon(1e-12));
}

TEST_CASE("fractional UL control inverts the aggregate serving gain") {
  HandPair h = shared_ap_pair();
  h.sys.sar = {SarConstraint{8.0, 1e9}}; // keep the fractional shape visible
  // aggregates (1, 4), exponent -1/2: relative powers (1, 1/2), peak at Q
  const PowerAllocationUL q = fpc_ul(h.ls, h.dep, h.sys, -0.5);
  CHECK(q.q[0] == doctest::Approx(h.sys.ue_power_w).epsilon(1e-12));
  CHECK(q.q[1] == doctest::Approx(h.sys.ue_power_w / 2.0).epsilon(1e-12));

  // aggregate uses serving links only: padding alpha on non-serving links is inert
  RandomScenario s = drawn(73);
  s.sys.sar = {SarConstraint{8.0, 1e9}};
  const PowerAllocationUL base = fpc_ul(s.ls, s.dep, s.sys, -0.5);
  for (int k = 0; k < s.sys.num_ues; ++k)
    for (int m = 0; m < s.sys.num_aps; ++m)
      if (!s.dep.assoc[k][m]) s.ls.alpha[k][m] *= 1e6;
  const PowerAllocationUL padded = fpc_ul(s.ls, s.dep, s.sys, -0.5);
  for (int k = 0; k < s.sys.num_ues; ++k)
    CHECK(padded.q[k] == doctest::Approx(base.q[k]).epsilon(1e-12));
}

TEST_CASE("absorption clamp caps per UE, is idempotent, and honors the tightest limit") {
  SystemConfig sys;
  sys.num_ues = 3;
  PowerAllocationUL q;
  q.q = {0.5, 0.002, 0.01};
  const PowerAllocationUL c = emf_scale_ul(q, sys);
  CHECK(c.q[0] == doctest::Approx(0.01).epsilon(1e-12)); // capped
  CHECK(c.q[1] == doctest::Approx(0.002).epsilon(1e-12)); // untouched
  CHECK(c.q[2] == doctest::Approx(0.01).epsilon(1e-12)); // exactly at the cap
  const PowerAllocationUL cc = emf_scale_ul(c, sys);
  for (int k = 0; k < 3; ++k) CHECK(cc.q[k] == c.q[k]);

  // two body-part constraints: 0.08/8 = 0.01 and 0.01/2 = 0.005 -> 0.005 wins
  sys.sar = {SarConstraint{8.0, 0.08}, SarConstraint{2.0, 0.01}};
  const PowerAllocationUL t = emf_scale_ul(q, sys);
  CHECK(t.q[0] == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(t.q[1] == doctest::Approx(0.002).epsilon(1e-12));
}
