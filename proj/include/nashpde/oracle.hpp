#pragma once

#include "nashpde/game.hpp"

#include <stdexcept>
#include <vector>

namespace nashpde {

class DimensionCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr Eigen::Index kDefaultDenseCap = 2000;

struct ControlIndex {
  int player = 0;
  int step = 1;  // 1..nt
  int node = 0;  // grid node index
};

/// Explicit matrix of A in flattened coordinates (player-major, then step, then node)
/// together with b and the diagonal of the U Gram matrix.
struct DenseOperator {
  Matrix A;
  Vector b;
  Vector weights;
  std::vector<ControlIndex> index;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> slab_shapes;

  Eigen::Index dimension() const { return A.rows(); }
  ControlBundle to_bundle(const Vector& flat) const;
};

/// Column k is apply_A(e_k). Throws DimensionCapError above `cap`.
DenseOperator assemble_dense(const NashOperator& op, Eigen::Index cap = kDefaultDenseCap);

/// LU with partial pivoting. Throws SingularOperatorError on a negligible pivot.
ControlBundle direct_solve(const DenseOperator& d);

/// max |(WA)_kl - (WA)_lk| / max |WA|.
double symmetry_defect(const DenseOperator& d);

/// Smallest lambda with (1/2)(WA + (WA)^T) x = lambda W x.
double min_eigen_sym(const DenseOperator& d);

}  // namespace nashpde
