#include "nashpde/adjoint.hpp"

#include <cmath>

namespace nashpde {

namespace {

SpaceTimeField weighted_misfit(const SpaceTimeField& y, const SpaceTimeField& target,
                               const SpatialField& weight) {
  return (y - target) * weight.asDiagonal();
}

}  // namespace

SpaceTimeField backward_sweep(const GridSpec& grid, const SpaceTimeField& sources,
                              const SpatialField& terminal) {
  if (sources.rows() != grid.num_levels() || sources.cols() != grid.num_nodes() ||
      terminal.size() != grid.num_nodes()) {
    throw std::invalid_argument("backward_sweep: data shape does not match the grid");
  }
  const ImplicitEulerMatrix matrix(grid);
  const double dt = grid.dt();
  SpaceTimeField p = SpaceTimeField::Zero(grid.num_levels(), grid.num_nodes());
  Vector next = terminal.tail(grid.nx);
  for (int n = grid.nt; n >= 1; --n) {
    next = matrix.solve(next + dt * sources.row(n).tail(grid.nx).transpose());
    p.row(n).tail(grid.nx) = next.transpose();
  }
  p.row(0).tail(grid.nx) = matrix.solve(next).transpose();
  return p;
}

AdjointSolution solve_adjoint(const ProblemSpec& spec, int i, const StateSolution& y) {
  const PlayerSpec& player = spec.player(i);
  const SpaceTimeField sources = weighted_misfit(y.y, player.yd, player.rho);
  const SpatialField terminal =
      (y.y.row(spec.grid.nt).transpose() - player.yT).cwiseProduct(player.eta);
  return {backward_sweep(spec.grid, sources, terminal), i};
}

AdjointSolution solve_adjoint_homogeneous(const ProblemSpec& spec, int i, const StateSolution& y_tilde) {
  const PlayerSpec& player = spec.player(i);
  const SpaceTimeField sources = y_tilde.y * player.rho.asDiagonal();
  const SpatialField terminal = y_tilde.y.row(spec.grid.nt).transpose().cwiseProduct(player.eta);
  return {backward_sweep(spec.grid, sources, terminal), i};
}

AdjointSolution solve_adjoint_free(const ProblemSpec& spec, int i) {
  return solve_adjoint(spec, i, solve_state_free(spec));
}

AdjointSolution solve_adjoint_free(const ProblemSpec& spec, int i, const StateSolution& y_bar) {
  return solve_adjoint(spec, i, y_bar);
}

Matrix riesz_gradient(const ProblemSpec& spec, int i, const ControlBundle& v) {
  const StateSolution y = solve_state(spec, v);
  const AdjointSolution p = solve_adjoint(spec, i, y);
  return spec.player(i).alpha * v[i] + restrict_to_omega(spec, p.p, i);
}

double adjoint_identity_defect(const ProblemSpec& spec, std::mt19937_64& rng) {
  const GridSpec& grid = spec.grid;
  std::normal_distribution<double> normal;
  const ControlBundle v = random_bundle(spec, rng);
  SpaceTimeField w = SpaceTimeField::Zero(grid.num_levels(), grid.num_nodes());
  w.bottomRows(grid.nt) = w.bottomRows(grid.nt).unaryExpr([&](double) { return normal(rng); });
  const SpatialField w_terminal = SpatialField::Zero(grid.num_nodes()).unaryExpr([&](double) {
    return normal(rng);
  });

  const Vector weights = trapezoid_weights(grid);
  auto observe = [&](const SpaceTimeField& a, const SpatialField& a_t, const SpaceTimeField& b,
                     const SpatialField& b_t) {
    const double q = (a.bottomRows(grid.nt).cwiseProduct(b.bottomRows(grid.nt)) * weights).sum();
    return grid.dt() * q + a_t.cwiseProduct(b_t).dot(weights);
  };

  const StateSolution y = solve_state_homogeneous(spec, v);
  const SpatialField y_terminal = y.y.row(grid.nt).transpose();
  const double lhs = observe(y.y, y_terminal, w, w_terminal);

  const SpaceTimeField p = backward_sweep(grid, w, w_terminal);
  ControlBundle adjoint(spec);
  for (int i = 0; i < spec.num_players(); ++i) adjoint[i] = restrict_to_omega(spec, p, i);
  const double rhs = inner_product(spec, v, adjoint);

  const double w_norm = std::sqrt(observe(w, w_terminal, w, w_terminal));
  return std::abs(lhs - rhs) / (norm(spec, v) * w_norm);
}

}  // namespace nashpde
