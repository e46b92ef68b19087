#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "cfpc/barrier.hpp"
#include "cfpc/linalg.hpp"

using namespace cfpc;

namespace {

Mat diag2(double a, double b) {
  Mat m(2);
  m.at(0, 0) = a;
  m.at(1, 1) = b;
  return m;
}

// maximize the smoothed minimum of c'd subject to ||d||^2 <= budget
ConvexSubproblem ball_problem(const RVec& c, double budget) {
  ConvexSubproblem prob;
  prob.dim = static_cast<int>(c.size());
  prob.objective = ConvexSubproblem::Objective::LseSurrogate;
  QuadConstraint ball;
  ball.kind = ConstraintKind::ApBudget;
  ball.quad = Mat(prob.dim);
  for (int i = 0; i < prob.dim; ++i) ball.quad.at(i, i) = 1.0;
  ball.constant = -budget;
  prob.constraints.push_back(ball);
  LseSurrogate::Term t;
  t.num_grad = c;
  t.den_const = 1.0;
  prob.lse.terms.push_back(t);
  prob.lse.upsilon = 1.0;
  return prob;
}

} // namespace

TEST_CASE("smoothed minimum of constant ratios") {
  LseSurrogate lse;
  lse.upsilon = 1.0;
  for (double c : {1.0, 2.0, 3.0}) {
    LseSurrogate::Term t;
    t.num_grad = RVec(2, 0.0);
    t.num_const = c;
    t.den_const = 1.0;
    lse.terms.push_back(t);
  }
  const RVec d = {0.4, 1.3};
  // -ln(e^-1 + e^-2 + e^-3)
  CHECK(lse.value(d) == doctest::Approx(0.5923940355556196).epsilon(1e-12));
  // the smoothing never sits more than ln(n)/upsilon below the true minimum
  CHECK(1.0 - lse.value(d) <= std::log(3.0) + 1e-12);
  CHECK(lse.value(d) <= 1.0);

  RVec grad;
  Mat hess;
  lse.eval(d, &grad, &hess);
  for (double g : grad) CHECK(std::abs(g) < 1e-12);

  // sharpness narrows the gap
  lse.upsilon = 10.0;
  CHECK(1.0 - lse.value(d) <= std::log(3.0) / 10.0 + 1e-12);
}

TEST_CASE("surrogate gradient and Hessian agree with finite differences") {
  LseSurrogate lse;
  lse.upsilon = 2.0;
  {
    LseSurrogate::Term t;
    t.num_grad = {1.0, 2.0};
    t.num_const = 0.5;
    t.den_quad = diag2(2.0, 1.0);
    t.den_quad.at(0, 1) = t.den_quad.at(1, 0) = 0.3;
    t.den_const = 0.7;
    lse.terms.push_back(t);
  }
  {
    LseSurrogate::Term t;
    t.num_grad = {0.4, 0.1};
    t.num_const = 1.0;
    t.den_const = 1.2;
    lse.terms.push_back(t);
  }
  const RVec d = {0.3, 0.8};
  RVec grad;
  Mat hess;
  const double v = lse.eval(d, &grad, &hess);
  CHECK(v == doctest::Approx(lse.value(d)).epsilon(1e-15));

  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    RVec dp = d, dm = d;
    dp[i] += h;
    dm[i] -= h;
    const double fd = (lse.value(dp) - lse.value(dm)) / (2.0 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
    // Hessian column against a central difference of the analytic gradient
    RVec gp, gm;
    lse.eval(dp, &gp, nullptr);
    lse.eval(dm, &gm, nullptr);
    for (int j = 0; j < 2; ++j)
      CHECK(hess.at(j, i) == doctest::Approx((gp[j] - gm[j]) / (2.0 * h)).epsilon(1e-5));
  }
}

TEST_CASE("feasibility mode drives the slack to the analytic minimum") {
  // phi(d) = d^2 - 1 over d >= 0: the least achievable slack is -1 at d = 0
  ConvexSubproblem prob;
  prob.dim = 1;
  prob.objective = ConvexSubproblem::Objective::FeasibilitySlack;
  QuadConstraint c;
  c.quad = Mat(1);
  c.quad.at(0, 0) = 1.0;
  c.constant = -1.0;
  prob.constraints.push_back(c);

  SolverConfig cfg;
  const BarrierResult res = barrier_solve(prob, {1.0}, cfg);
  CHECK(res.slack == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(res.d.size() == 1);
  CHECK(res.d[0] < 1e-2);
  CHECK(res.newton_iters > 0);
}

TEST_CASE("feasibility mode reports an unremovable violation as positive slack") {
  // phi(d) = ||d||^2 + 5 cannot be satisfied by any d
  ConvexSubproblem prob;
  prob.dim = 2;
  prob.objective = ConvexSubproblem::Objective::FeasibilitySlack;
  QuadConstraint c;
  c.quad = Mat(2);
  c.quad.at(0, 0) = c.quad.at(1, 1) = 1.0;
  c.constant = 5.0;
  prob.constraints.push_back(c);

  const BarrierResult res = barrier_solve(prob, {1.0, 1.0}, SolverConfig{});
  CHECK(res.slack == doctest::Approx(5.0).epsilon(1e-3));
  CHECK(res.slack > 0.0);
}

TEST_CASE("surrogate mode solves a budget-constrained linear objective") {
  const RVec c = {1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0}; // unit norm
  const double budget = 2.0;
  const ConvexSubproblem prob = ball_problem(c, budget);
  const BarrierResult res = barrier_solve(prob, {0.01, 0.01, 0.01}, SolverConfig{});

  // optimum: d = sqrt(budget) * c, objective sqrt(budget) * ||c||
  CHECK(rnorm2(res.d) == doctest::Approx(budget).epsilon(1e-4));
  const double cosang = rdot(res.d, c) / std::sqrt(rnorm2(res.d) * rnorm2(c));
  CHECK(cosang == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.objective == doctest::Approx(std::sqrt(budget)).epsilon(1e-4));
}

TEST_CASE("bad starts are rejected up front") {
  const ConvexSubproblem prob = ball_problem({1.0, 1.0}, 1.0);
  // violates the ball constraint
  CHECK_THROWS_AS(barrier_solve(prob, {2.0, 2.0}, SolverConfig{}), std::invalid_argument);
  // not strictly positive
  CHECK_THROWS_AS(barrier_solve(prob, {0.0, 0.5}, SolverConfig{}), std::invalid_argument);
  // wrong dimension
  CHECK_THROWS_AS(barrier_solve(prob, {0.1}, SolverConfig{}), std::invalid_argument);
}

TEST_CASE("an exhausted Newton budget raises a failure carrying the last iterate") {
  const ConvexSubproblem prob = ball_problem({1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0}, 2.0);
  SolverConfig cfg;
  cfg.max_newton_iters = 1; // far too few to center from a distant start
  CHECK_THROWS_AS(barrier_solve(prob, {1e-3, 1e-3, 1e-3}, cfg), SolverFailure);
  try {
    barrier_solve(prob, {1e-3, 1e-3, 1e-3}, cfg);
  } catch (const SolverFailure& f) {
    CHECK(f.last_iterate.size() == 3);
    for (double v : f.last_iterate) CHECK(v > 0.0);
  }
}

TEST_CASE("solver configuration validation") {
  SolverConfig ok;
  CHECK_NOTHROW(ok.validate());
  SolverConfig bad = ok;
  bad.barrier_mult = 1.0; // must strictly exceed 1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.eps1_rel = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.max_sco_iters = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
