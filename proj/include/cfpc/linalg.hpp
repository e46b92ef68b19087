#pragma once

#include <cmath>
#include <stdexcept>

#include "cfpc/types.hpp"

namespace cfpc {

inline cdouble cdot(const CVec& a, const CVec& b) {
  cdouble s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double cnorm2(const CVec& a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return s;
}

inline double rdot(const RVec& a, const RVec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double rnorm2(const RVec& a) { return rdot(a, a); }

// Dense square complex matrix, row-major. Used for the small per-AP systems
// (L x L), so no attempt at blocking or pivoting beyond Cholesky.
struct CMat {
  int n = 0;
  CVec a;

  CMat() = default;
  explicit CMat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, cdouble(0.0)) {}

  cdouble& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const cdouble& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static CMat identity(int dim, double scale = 1.0) {
    CMat m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = scale;
    return m;
  }

  // A += w * v v^H
  void add_outer(const CVec& v, cdouble w) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] += w * v[i] * std::conj(v[j]);
  }

  CVec mul(const CVec& x) const {
    CVec y(n, cdouble(0.0));
    for (int i = 0; i < n; ++i) {
      cdouble s = 0.0;
      for (int j = 0; j < n; ++j) s += at(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
};

// In-place lower Cholesky of a Hermitian positive definite matrix.
// Returns false if a non-positive pivot shows up.
inline bool cholesky(CMat& m) {
  const int n = m.n;
  for (int j = 0; j < n; ++j) {
    double diag = m.at(j, j).real();
    for (int k = 0; k < j; ++k) diag -= std::norm(m.at(j, k));
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    m.at(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      cdouble s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= m.at(i, k) * std::conj(m.at(j, k));
      m.at(i, j) = s / ljj;
    }
  }
  return true;
}

// Solve A x = b given the Cholesky factor produced by cholesky().
inline CVec cholesky_solve(const CMat& l, CVec b) {
  const int n = l.n;
  for (int i = 0; i < n; ++i) {
    cdouble s = b[i];
    for (int k = 0; k < i; ++k) s -= l.at(i, k) * b[k];
    b[i] = s / l.at(i, i).real();
  }
  for (int i = n - 1; i >= 0; --i) {
    cdouble s = b[i];
    for (int k = i + 1; k < n; ++k) s -= std::conj(l.at(k, i)) * b[k];
    b[i] = s / l.at(i, i).real();
  }
  return b;
}

// Factor-and-solve convenience for Hermitian positive definite systems.
inline CVec herm_solve(CMat m, const CVec& b) {
  if (!cholesky(m)) throw std::runtime_error("herm_solve: matrix is not positive definite");
  return cholesky_solve(m, b);
}

// Dense square real matrix, row-major; symmetric by construction where used.
struct Mat {
  int n = 0;
  RVec a;

  Mat() = default;
  explicit Mat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const double& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  void add_outer(const RVec& v, double w) {
    for (int i = 0; i < n; ++i) {
      const double wi = w * v[i];
      double* row = a.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) row[j] += wi * v[j];
    }
  }

  RVec mul(const RVec& x) const {
    RVec y(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double* row = a.data() + static_cast<size_t>(i) * n;
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    return y;
  }
};

inline bool cholesky(Mat& m) {
  const int n = m.n;
  for (int j = 0; j < n; ++j) {
    double diag = m.at(j, j);
    for (int k = 0; k < j; ++k) diag -= m.at(j, k) * m.at(j, k);
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    m.at(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= m.at(i, k) * m.at(j, k);
      m.at(i, j) = s / ljj;
    }
  }
  return true;
}

inline RVec cholesky_solve(const Mat& l, RVec b) {
  const int n = l.n;
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l.at(i, k) * b[k];
    b[i] = s / l.at(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= l.at(k, i) * b[k];
    b[i] = s / l.at(i, i);
  }
  return b;
}

// Solve H x = g for symmetric H, adding a growing ridge to the diagonal if
// the factorization fails (H is expected near-PSD; the ridge keeps descent
// directions usable when curvature is locally indefinite).
inline RVec solve_ridged(Mat h, const RVec& g) {
  double trace = 0.0;
  for (int i = 0; i < h.n; ++i) trace += h.at(i, i);
  double ridge = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Mat f = h;
    if (ridge > 0.0)
      for (int i = 0; i < f.n; ++i) f.at(i, i) += ridge;
    if (cholesky(f)) return cholesky_solve(f, g);
    ridge = (ridge == 0.0) ? std::max(1e-12 * trace / h.n, 1e-300) : ridge * 10.0;
  }
  throw std::runtime_error("solve_ridged: matrix could not be regularized");
}

} // namespace cfpc
