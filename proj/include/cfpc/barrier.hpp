#pragma once

#include <stdexcept>
#include <string>

#include "cfpc/linalg.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// Iteration and tolerance knobs for the model-based solvers. Tolerances are
// relative where noted; eps1_rel scales the bisection window by the computed
// rate ceiling.
struct SolverConfig {
  double eps1_rel = 1e-3;   // bisection window / delta_max
  double eps_sco = 1e-4;    // relative iterate change, feasibility SCO
  double eps_lse = 1e-4;    // relative iterate change, LSE SCO
  double upsilon = 1.0;     // LSE sharpness
  int max_sco_iters = 30;
  int max_bisect_iters = 40;
  int max_newton_iters = 50; // per centering stage
  double barrier_t0 = 1.0;
  double barrier_mult = 20.0;
  double barrier_gap = 1e-7; // duality-gap bound m/t at exit

  void validate() const {
    if (eps1_rel <= 0 || eps_sco <= 0 || eps_lse <= 0 || upsilon <= 0 || barrier_t0 <= 0 ||
        barrier_mult <= 1 || barrier_gap <= 0 || max_sco_iters < 1 || max_bisect_iters < 1 ||
        max_newton_iters < 1)
      throw std::invalid_argument("SolverConfig: tolerances and iteration caps must be positive");
  }
};

enum class ConstraintKind { ApBudget, IpdLimit, SinrTarget, Generic };

// One scalar constraint phi(d) = d'Q d + lin'd + constant <= 0 with Q
// positive semidefinite (possibly absent). Values are pre-scaled by the
// caller so residuals of different physical units are comparable.
struct QuadConstraint {
  ConstraintKind kind = ConstraintKind::Generic;
  Mat quad;      // empty (n == 0) means no quadratic part
  RVec lin;      // empty means no linear part
  double constant = 0.0;

  double value(const RVec& d) const {
    double v = constant;
    if (!lin.empty()) v += rdot(lin, d);
    if (quad.n > 0) {
      const RVec qd = quad.mul(d);
      v += rdot(d, qd);
    }
    return v;
  }

  // grad = 2 Q d + lin
  RVec gradient(const RVec& d) const {
    RVec g(d.size(), 0.0);
    if (quad.n > 0) {
      g = quad.mul(d);
      for (auto& v : g) v *= 2.0;
    }
    if (!lin.empty())
      for (size_t i = 0; i < g.size(); ++i) g[i] += lin[i];
    return g;
  }
};

// Smoothed minimum of linearized SINR ratios: the maximization objective of
// the unfoldable subproblem. Each term is an affine numerator over a
// positive quadratic denominator.
struct LseSurrogate {
  struct Term {
    RVec num_grad;         // gradient of the affine numerator
    double num_const = 0.0;
    Mat den_quad;          // PSD; empty means constant denominator
    double den_const = 0.0;
  };
  std::vector<Term> terms;
  double upsilon = 1.0;

  double value(const RVec& d) const { return eval(d, nullptr, nullptr); }

  // Returns the value; fills gradient and Hessian when non-null. The
  // log-sum-exp is evaluated in max-shifted form so large ratios never
  // overflow.
  double eval(const RVec& d, RVec* grad, Mat* hess) const;
};

// One convex program over the amplitude vector d (dimension dim):
// either "minimize the common slack s over the listed constraints" or
// "maximize the LSE surrogate subject to the listed constraints".
// Nonnegativity of d is enforced as a hard barrier in both forms.
struct ConvexSubproblem {
  enum class Objective { FeasibilitySlack, LseSurrogate };
  int dim = 0;
  Objective objective = Objective::FeasibilitySlack;
  std::vector<QuadConstraint> constraints;
  LseSurrogate lse; // used only by the LseSurrogate objective
};

struct BarrierResult {
  RVec d;
  double objective = 0.0; // slack value or surrogate value
  double slack = 0.0;     // feasibility mode only
  int newton_iters = 0;
};

// Raised when a Newton centering stage fails to converge within the
// configured budget; carries the best iterate reached.
struct SolverFailure : std::runtime_error {
  RVec last_iterate;
  SolverFailure(const std::string& msg, RVec iterate)
      : std::runtime_error(msg), last_iterate(std::move(iterate)) {}
};

// Log-barrier interior-point solve with damped Newton steps and
// backtracking line search. `start` must be strictly positive; for the LSE
// objective it must also strictly satisfy every listed constraint.
BarrierResult barrier_solve(const ConvexSubproblem& prob, const RVec& start,
                            const SolverConfig& cfg);

} // namespace cfpc
