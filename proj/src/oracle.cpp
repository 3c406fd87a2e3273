#include "nashpde/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace nashpde {

ControlBundle DenseOperator::to_bundle(const Vector& flat) const {
  if (flat.size() != dimension()) throw std::invalid_argument("to_bundle: length mismatch");
  std::vector<Matrix> slabs;
  Eigen::Index offset = 0;
  for (const auto& [rows, cols] : slab_shapes) {
    Matrix slab(rows, cols);
    for (Eigen::Index n = 0; n < rows; ++n) {
      slab.row(n) = flat.segment(offset, cols).transpose();
      offset += cols;
    }
    slabs.push_back(std::move(slab));
  }
  return ControlBundle(std::move(slabs));
}

DenseOperator assemble_dense(const NashOperator& op, Eigen::Index cap) {
  const ProblemSpec& spec = op.spec();
  const Eigen::Index dim = spec.control_dimension();
  if (dim > cap) {
    throw DimensionCapError("control dimension " + std::to_string(dim) + " exceeds the dense cap of " +
                            std::to_string(cap));
  }

  DenseOperator d;
  d.A.resize(dim, dim);
  d.weights.resize(dim);
  d.index.reserve(static_cast<std::size_t>(dim));
  Eigen::Index k = 0;
  for (int i = 0; i < spec.num_players(); ++i) {
    const PlayerSpec& p = spec.player(i);
    const Vector w = control_weights(spec.grid, p);
    d.slab_shapes.emplace_back(spec.grid.nt, p.num_nodes());
    for (int n = 1; n <= spec.grid.nt; ++n) {
      for (int m = 0; m < p.num_nodes(); ++m, ++k) {
        d.index.push_back({i, n, p.first_node + m});
        d.weights(k) = spec.grid.dt() * w(m);
      }
    }
  }

  Vector unit = Vector::Zero(dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    unit(col) = 1.0;
    d.A.col(col) = op.apply(ControlBundle::unflatten(spec, unit)).flatten();
    unit(col) = 0.0;
  }
  d.b = op.rhs().flatten();
  return d;
}

ControlBundle direct_solve(const DenseOperator& d) {
  const Eigen::PartialPivLU<Matrix> lu(d.A);
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.size() > 0 && pivots.minCoeff() <= 1e-13 * pivots.maxCoeff()) {
    throw SingularOperatorError("dense operator is singular to working precision (pivot ratio " +
                                std::to_string(pivots.minCoeff() / pivots.maxCoeff()) + ")");
  }
  return d.to_bundle(lu.solve(d.b));
}

double symmetry_defect(const DenseOperator& d) {
  const Matrix wa = d.weights.asDiagonal() * d.A;
  const double scale = wa.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (wa - wa.transpose()).cwiseAbs().maxCoeff() / scale;
}

double min_eigen_sym(const DenseOperator& d) {
  const Matrix wa = d.weights.asDiagonal() * d.A;
  const Vector inv_sqrt = d.weights.cwiseSqrt().cwiseInverse();
  const Matrix sym = 0.5 * (wa + wa.transpose());
  const Matrix scaled = inv_sqrt.asDiagonal() * sym * inv_sqrt.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(scaled, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace nashpde
