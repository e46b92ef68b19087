#include "cfpc/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfpc {

double LseSurrogate::eval(const RVec& d, RVec* grad, Mat* hess) const {
  const int n = static_cast<int>(d.size());
  const size_t K = terms.size();

  // Per-term ratio h_k = num/den with its gradient.
  RVec h(K, 0.0);
  std::vector<RVec> dh;
  if (grad || hess) dh.assign(K, RVec(n, 0.0));

  for (size_t k = 0; k < K; ++k) {
    const Term& t = terms[k];
    double u = t.num_const;
    if (!t.num_grad.empty()) u += rdot(t.num_grad, d);
    double v = t.den_const;
    RVec dv(n, 0.0);
    if (t.den_quad.n > 0) {
      const RVec qd = t.den_quad.mul(d);
      v += rdot(d, qd);
      for (int i = 0; i < n; ++i) dv[i] = 2.0 * qd[i];
    }
    h[k] = u / v;
    if (grad || hess) {
      RVec& g = dh[k];
      for (int i = 0; i < n; ++i) {
        const double du_i = t.num_grad.empty() ? 0.0 : t.num_grad[i];
        g[i] = du_i / v - (u / (v * v)) * dv[i];
      }
    }
  }

  // Max-shifted log-sum-exp of exp(-upsilon h_k).
  double peak = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < K; ++k) peak = std::max(peak, -upsilon * h[k]);
  double sum = 0.0;
  RVec w(K, 0.0);
  for (size_t k = 0; k < K; ++k) {
    w[k] = std::exp(-upsilon * h[k] - peak);
    sum += w[k];
  }
  const double value = -(std::log(sum) + peak) / upsilon;
  if (!grad && !hess) return value;
  for (auto& x : w) x /= sum;

  RVec mean_grad(n, 0.0);
  for (size_t k = 0; k < K; ++k)
    for (int i = 0; i < n; ++i) mean_grad[i] += w[k] * dh[k][i];
  if (grad) *grad = mean_grad;

  if (hess) {
    *hess = Mat(n);
    for (size_t k = 0; k < K; ++k) {
      const Term& t = terms[k];
      const double wk = w[k];
      if (wk == 0.0) continue;

      // w_k * Hess(h_k): ratio of affine over positive quadratic.
      double u = t.num_const;
      if (!t.num_grad.empty()) u += rdot(t.num_grad, d);
      double v = t.den_const;
      RVec dv(n, 0.0);
      if (t.den_quad.n > 0) {
        const RVec qd = t.den_quad.mul(d);
        v += rdot(d, qd);
        for (int i = 0; i < n; ++i) dv[i] = 2.0 * qd[i];
      }
      const double inv_v2 = 1.0 / (v * v);
      for (int i = 0; i < n; ++i) {
        const double du_i = t.num_grad.empty() ? 0.0 : t.num_grad[i];
        for (int j = 0; j < n; ++j) {
          const double du_j = t.num_grad.empty() ? 0.0 : t.num_grad[j];
          double hij = -(du_i * dv[j] + dv[i] * du_j) * inv_v2 +
                       2.0 * u * inv_v2 / v * dv[i] * dv[j];
          if (t.den_quad.n > 0) hij -= 2.0 * u * inv_v2 * t.den_quad.at(i, j);
          hess->at(i, j) += wk * hij;
        }
      }
      // Softmax curvature: -upsilon * (E[gg'] - E[g]E[g]').
      hess->add_outer(dh[k], -upsilon * wk);
    }
    hess->add_outer(mean_grad, upsilon);
  }
  return value;
}

namespace {

// Internal barrier state: objective weight t, problem, and a flag for the
// extra slack coordinate. x = (d) for LSE problems, x = (d, s) otherwise.
struct BarrierEval {
  const ConvexSubproblem& prob;
  double t;

  bool slack_mode() const {
    return prob.objective == ConvexSubproblem::Objective::FeasibilitySlack;
  }

  // Barrier function value, +inf outside the domain.
  double value(const RVec& x) const {
    const int n = prob.dim;
    const RVec d(x.begin(), x.begin() + n);
    double f = 0.0;
    if (slack_mode()) {
      const double s = x[n];
      f = t * s;
      for (const auto& c : prob.constraints) {
        const double r = s - c.value(d);
        if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
        f -= std::log(r);
      }
    } else {
      f = -t * prob.lse.value(d);
      for (const auto& c : prob.constraints) {
        const double r = -c.value(d);
        if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
        f -= std::log(r);
      }
    }
    for (int l = 0; l < n; ++l) {
      if (!(x[l] > 0.0)) return std::numeric_limits<double>::infinity();
      f -= std::log(x[l]);
    }
    return f;
  }

  // Gradient and Hessian of the barrier function at an interior point.
  void derivatives(const RVec& x, RVec& g, Mat& h) const {
    const int n = prob.dim;
    const int dim = static_cast<int>(x.size());
    g.assign(dim, 0.0);
    h = Mat(dim);
    const RVec d(x.begin(), x.begin() + n);

    if (slack_mode()) {
      const double s = x[n];
      g[n] = t;
      for (const auto& c : prob.constraints) {
        const double r = s - c.value(d);
        const RVec u = c.gradient(d);
        const double inv_r = 1.0 / r;
        const double inv_r2 = inv_r * inv_r;
        for (int i = 0; i < n; ++i) g[i] += u[i] * inv_r;
        g[n] -= inv_r;
        for (int i = 0; i < n; ++i) {
          const double ui = u[i];
          for (int j = 0; j < n; ++j) h.at(i, j) += ui * u[j] * inv_r2;
          h.at(i, n) -= ui * inv_r2;
          h.at(n, i) -= ui * inv_r2;
        }
        h.at(n, n) += inv_r2;
        if (c.quad.n > 0)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) h.at(i, j) += 2.0 * c.quad.at(i, j) * inv_r;
      }
    } else {
      RVec lse_grad;
      Mat lse_hess;
      prob.lse.eval(d, &lse_grad, &lse_hess);
      for (int i = 0; i < n; ++i) g[i] -= t * lse_grad[i];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h.at(i, j) -= t * lse_hess.at(i, j);
      for (const auto& c : prob.constraints) {
        const double r = -c.value(d);
        const RVec u = c.gradient(d);
        const double inv_r = 1.0 / r;
        const double inv_r2 = inv_r * inv_r;
        for (int i = 0; i < n; ++i) g[i] += u[i] * inv_r;
        for (int i = 0; i < n; ++i) {
          const double ui = u[i];
          for (int j = 0; j < n; ++j) h.at(i, j) += ui * u[j] * inv_r2;
        }
        if (c.quad.n > 0)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) h.at(i, j) += 2.0 * c.quad.at(i, j) * inv_r;
      }
    }

    for (int l = 0; l < n; ++l) {
      g[l] -= 1.0 / x[l];
      h.at(l, l) += 1.0 / (x[l] * x[l]);
    }
  }
};

} // namespace

BarrierResult barrier_solve(const ConvexSubproblem& prob, const RVec& start,
                            const SolverConfig& cfg) {
  cfg.validate();
  const int n = prob.dim;
  if (static_cast<int>(start.size()) != n)
    throw std::invalid_argument("barrier_solve: start dimension mismatch");
  for (double v : start)
    if (!(v > 0.0)) throw std::invalid_argument("barrier_solve: start must be strictly positive");

  const bool slack_mode = prob.objective == ConvexSubproblem::Objective::FeasibilitySlack;
  RVec x = start;
  if (slack_mode) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : prob.constraints) worst = std::max(worst, c.value(start));
    if (prob.constraints.empty()) worst = 0.0;
    x.push_back(worst + 1.0);
  } else {
    for (const auto& c : prob.constraints)
      if (!(c.value(start) < 0.0))
        throw std::invalid_argument("barrier_solve: start violates a hard constraint");
  }

  const size_t m = prob.constraints.size() + static_cast<size_t>(n);
  int total_newton = 0;

  for (double t = cfg.barrier_t0;; t *= cfg.barrier_mult) {
    BarrierEval eval{prob, t};
    double fx = eval.value(x);
    RVec g;
    Mat h;
    int iter = 0;
    for (;; ++iter) {
      if (iter >= cfg.max_newton_iters)
        throw SolverFailure("barrier_solve: Newton stage did not converge",
                            RVec(x.begin(), x.begin() + n));
      eval.derivatives(x, g, h);
      RVec neg_g = g;
      for (auto& v : neg_g) v = -v;
      RVec step;
      try {
        step = solve_ridged(h, neg_g);
      } catch (const std::runtime_error&) {
        // Degenerate Newton system (overflowing barrier curvature); report it
        // as a solver failure carrying the current iterate.
        throw SolverFailure("barrier_solve: Newton system could not be solved",
                            RVec(x.begin(), x.begin() + n));
      }
      const double decrement2 = -rdot(g, step);
      ++total_newton;
      // The decrement halves predict the attainable decrease; once it falls
      // below the objective's floating-point resolution the stage is centered.
      if (decrement2 / 2.0 <= 1e-10 * std::max(1.0, std::abs(fx))) break;

      double alpha = 1.0;
      bool moved = false;
      bool progressed = false;
      RVec cand(x.size());
      while (alpha >= 1e-14) {
        for (size_t i = 0; i < x.size(); ++i) cand[i] = x[i] + alpha * step[i];
        const double fc = eval.value(cand);
        if (fc <= fx - 0.01 * alpha * decrement2) {
          moved = true;
          progressed = fc < fx;
          x = cand;
          fx = fc;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved || !progressed) break; // no measurable descent left at this scale
    }
    if (double(m) / t <= cfg.barrier_gap) break;
  }

  BarrierResult res;
  res.d.assign(x.begin(), x.begin() + n);
  res.newton_iters = total_newton;
  if (slack_mode) {
    res.slack = x[n];
    res.objective = x[n];
  } else {
    res.slack = std::numeric_limits<double>::quiet_NaN();
    res.objective = prob.lse.value(res.d);
  }
  return res;
}

} // namespace cfpc
