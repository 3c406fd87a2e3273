#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace nashpde {

/// Thomas-algorithm factorization of a tridiagonal matrix. `sub(0)` and
/// `super(n-1)` are ignored. No pivoting, so the matrix should be diagonally dominant.
template <typename Scalar>
class TridiagonalLU {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TridiagonalLU() = default;

  TridiagonalLU(const Vec& sub, const Vec& diag, const Vec& super)
      : sub_(sub), upper_(diag.size()), inv_pivot_(diag.size()) {
    const Eigen::Index n = diag.size();
    if (n == 0 || sub.size() != n || super.size() != n) {
      throw std::invalid_argument("TridiagonalLU: band lengths must match and be nonzero");
    }
    Scalar pivot = diag(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i > 0) pivot = diag(i) - sub(i) * upper_(i - 1);
      if (pivot == Scalar(0)) throw std::runtime_error("TridiagonalLU: zero pivot");
      inv_pivot_(i) = Scalar(1) / pivot;
      upper_(i) = (i + 1 < n) ? super(i) * inv_pivot_(i) : Scalar(0);
    }
  }

  Eigen::Index size() const { return inv_pivot_.size(); }

  template <typename Derived>
  Vec solve(const Eigen::MatrixBase<Derived>& rhs) const {
    const Eigen::Index n = size();
    if (rhs.size() != n) throw std::invalid_argument("TridiagonalLU: rhs length mismatch");
    Vec x(n);
    x(0) = rhs(0) * inv_pivot_(0);
    for (Eigen::Index i = 1; i < n; ++i) x(i) = (rhs(i) - sub_(i) * x(i - 1)) * inv_pivot_(i);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= upper_(i) * x(i + 1);
    return x;
  }

 private:
  Vec sub_;
  Vec upper_;
  Vec inv_pivot_;
};

}  // namespace nashpde
