#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace nashpde {

struct KrylovOptions {
  double rtol = 1e-10;
  long max_iterations = 100;
  int restart = 50;  // GMRES only
};

template <typename Vec>
struct KrylovResult {
  Vec x;
  long iterations = 0;
  bool converged = false;
  /// Relative residual |b - A x| / |b| (absolute when b = 0), recomputed from x.
  double residual = 0.0;
  /// Last residual the iteration itself tracked (recursive for CG, least-squares for GMRES).
  double internal_residual = 0.0;
  std::vector<double> history;
};

/// Conjugate gradients for an operator that is self-adjoint and positive definite
/// in `inner`. Vec needs copy, operator-, operator*(double, Vec) and axpy().
/// On apparent convergence the residual is recomputed from scratch, and the
/// iteration restarts from it if the recursive value has drifted.
template <typename Vec, typename ApplyOp, typename Inner>
KrylovResult<Vec> conjugate_gradient(const ApplyOp& apply, const Vec& b, Vec x, const Inner& inner,
                                     const KrylovOptions& options) {
  KrylovResult<Vec> out;
  const double b_norm = std::sqrt(inner(b, b));
  const double scale = b_norm > 0.0 ? b_norm : 1.0;
  const double target = options.rtol * scale;

  Vec r = b - apply(x);
  double rr = inner(r, r);
  out.history.push_back(std::sqrt(rr) / scale);
  if (std::sqrt(rr) <= target) {
    out.x = std::move(x);
    out.converged = true;
    out.residual = out.internal_residual = std::sqrt(rr) / scale;
    return out;
  }

  Vec p = r;
  while (out.iterations < options.max_iterations) {
    const Vec q = apply(p);
    const double curvature = inner(p, q);
    ++out.iterations;
    if (!(curvature > 0.0)) break;  // not positive definite along p
    const double step = rr / curvature;
    x.axpy(step, p);
    r.axpy(-step, q);
    const double rr_next = inner(r, r);
    out.history.push_back(std::sqrt(rr_next) / scale);
    out.internal_residual = std::sqrt(rr_next) / scale;

    if (std::sqrt(rr_next) <= target) {
      r = b - apply(x);
      rr = inner(r, r);
      if (std::sqrt(rr) <= target) {
        out.converged = true;
        break;
      }
      p = r;
      continue;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }

  out.residual = std::sqrt(inner(r, r)) / scale;
  if (!out.converged) {
    const Vec r_true = b - apply(x);
    out.residual = std::sqrt(inner(r_true, r_true)) / scale;
  }
  out.x = std::move(x);
  return out;
}

/// Restarted GMRES with modified Gram-Schmidt (two passes) in the `inner` geometry.
template <typename Vec, typename ApplyOp, typename Inner>
KrylovResult<Vec> gmres(const ApplyOp& apply, const Vec& b, Vec x, const Inner& inner,
                        const KrylovOptions& options) {
  KrylovResult<Vec> out;
  const double b_norm = std::sqrt(inner(b, b));
  const double scale = b_norm > 0.0 ? b_norm : 1.0;
  const double target = options.rtol * scale;
  const int m = options.restart > 0 ? options.restart : 50;

  Vec r = b - apply(x);
  double beta = std::sqrt(inner(r, r));
  out.history.push_back(beta / scale);
  out.internal_residual = beta / scale;

  while (beta > target && out.iterations < options.max_iterations) {
    std::vector<Vec> basis;
    basis.reserve(static_cast<std::size_t>(m) + 1);
    basis.push_back((1.0 / beta) * r);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    g(0) = beta;

    int k = 0;
    while (k < m && out.iterations < options.max_iterations) {
      Vec w = apply(basis[static_cast<std::size_t>(k)]);
      ++out.iterations;
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const double hij = inner(w, basis[static_cast<std::size_t>(i)]);
          hess(i, k) += hij;
          w.axpy(-hij, basis[static_cast<std::size_t>(i)]);
        }
      }
      const double h_next = std::sqrt(inner(w, w));
      hess(k + 1, k) = h_next;

      for (int i = 0; i < k; ++i) {
        const double a = hess(i, k);
        const double c = hess(i + 1, k);
        hess(i, k) = cs(i) * a + sn(i) * c;
        hess(i + 1, k) = -sn(i) * a + cs(i) * c;
      }
      const double denom = std::hypot(hess(k, k), hess(k + 1, k));
      cs(k) = denom > 0.0 ? hess(k, k) / denom : 1.0;
      sn(k) = denom > 0.0 ? hess(k + 1, k) / denom : 0.0;
      hess(k, k) = denom;
      hess(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);

      const double estimate = std::abs(g(k + 1));
      out.history.push_back(estimate / scale);
      out.internal_residual = estimate / scale;
      ++k;
      if (estimate <= target || h_next == 0.0) break;
      basis.push_back((1.0 / h_next) * w);
    }

    // The Givens-reduced leading block is upper triangular.
    const Eigen::VectorXd y =
        hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int i = 0; i < k; ++i) x.axpy(y(i), basis[static_cast<std::size_t>(i)]);

    r = b - apply(x);
    beta = std::sqrt(inner(r, r));
    if (!std::isfinite(beta)) break;
  }

  out.converged = beta <= target;
  out.residual = beta / scale;
  out.x = std::move(x);
  return out;
}

}  // namespace nashpde
