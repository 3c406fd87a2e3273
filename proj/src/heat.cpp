#include "nashpde/heat.hpp"

namespace nashpde {

namespace {

TridiagonalLU<double> factor_implicit_euler(const GridSpec& grid) {
  const int n = grid.nx;
  const double r = grid.dt() / (grid.h() * grid.h());
  Vector sub = Vector::Constant(n, -r);
  Vector diag = Vector::Constant(n, 1.0 + 2.0 * r);
  Vector super = Vector::Constant(n, -r);
  sub(n - 1) = -2.0 * r;  // ghost node y_{nx+1} = y_{nx-1} + 2 h g2
  return TridiagonalLU<double>(sub, diag, super);
}

// Right-hand side on nodes 1..nx for one step.
Vector step_rhs(const SpatialField& y_prev, const SpatialField& forcing, double g1, double g2,
                const GridSpec& grid) {
  const double dt = grid.dt();
  const double h = grid.h();
  Vector rhs = y_prev.tail(grid.nx) + dt * forcing.tail(grid.nx);
  rhs(0) += dt * g1 / (h * h);
  rhs(grid.nx - 1) += dt * 2.0 * g2 / h;
  return rhs;
}

}  // namespace

ImplicitEulerMatrix::ImplicitEulerMatrix(const GridSpec& grid)
    : grid_(grid), lu_(factor_implicit_euler(grid)) {}

Vector ImplicitEulerMatrix::apply(const Vector& x) const {
  const int n = grid_.nx;
  const double r = grid_.dt() / (grid_.h() * grid_.h());
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const double left = i > 0 ? x(i - 1) : 0.0;
    double value = (1.0 + 2.0 * r) * x(i) - r * left;
    if (i + 1 < n) {
      value -= r * x(i + 1);
    } else {
      value -= r * left;  // doubled coupling in the Neumann row
    }
    out(i) = value;
  }
  return out;
}

SpatialField step(const SpatialField& y_prev, const SpatialField& forcing, double g1, double g2,
                  const GridSpec& grid) {
  if (y_prev.size() != grid.num_nodes() || forcing.size() != grid.num_nodes()) {
    throw std::invalid_argument("step: field length must be nx + 1");
  }
  const ImplicitEulerMatrix matrix(grid);
  SpatialField y(grid.num_nodes());
  y(0) = g1;
  y.tail(grid.nx) = matrix.solve(step_rhs(y_prev, forcing, g1, g2, grid));
  return y;
}

StateSolution forward_sweep(const GridSpec& grid, const SpatialField& y0, const SpaceTimeField& forcing,
                            const TimeSeries& g1, const TimeSeries& g2) {
  if (y0.size() != grid.num_nodes() || forcing.rows() != grid.num_levels() ||
      forcing.cols() != grid.num_nodes() || g1.size() != grid.num_levels() ||
      g2.size() != grid.num_levels()) {
    throw std::invalid_argument("forward_sweep: data shape does not match the grid");
  }
  const ImplicitEulerMatrix matrix(grid);
  StateSolution out;
  out.y.resize(grid.num_levels(), grid.num_nodes());
  out.y.row(0) = y0.transpose();
  SpatialField prev = y0;
  for (int n = 1; n <= grid.nt; ++n) {
    const SpatialField load = forcing.row(n).transpose();
    SpatialField next(grid.num_nodes());
    next(0) = g1(n);
    next.tail(grid.nx) = matrix.solve(step_rhs(prev, load, g1(n), g2(n), grid));
    out.y.row(n) = next.transpose();
    prev = std::move(next);
  }
  out.steps = grid.nt;
  return out;
}

SpaceTimeField control_load(const ProblemSpec& spec, const ControlBundle& v) {
  if (v.num_players() != spec.num_players()) {
    throw std::invalid_argument("control_load: player count mismatch");
  }
  SpaceTimeField load = SpaceTimeField::Zero(spec.grid.num_levels(), spec.grid.num_nodes());
  for (int i = 0; i < spec.num_players(); ++i) {
    const PlayerSpec& p = spec.player(i);
    if (v[i].rows() != spec.grid.nt || v[i].cols() != p.num_nodes()) {
      throw std::invalid_argument("control_load: slab shape mismatch");
    }
    const Vector chi = control_characteristic(spec.grid, p);
    load.block(1, p.first_node, spec.grid.nt, p.num_nodes()) += v[i] * chi.asDiagonal();
  }
  return load;
}

StateSolution solve_state(const ProblemSpec& spec, const ControlBundle& v) {
  return forward_sweep(spec.grid, spec.y0, spec.f + control_load(spec, v), spec.g1, spec.g2);
}

StateSolution solve_state_homogeneous(const ProblemSpec& spec, const ControlBundle& v) {
  const GridSpec& g = spec.grid;
  return forward_sweep(g, SpatialField::Zero(g.num_nodes()), control_load(spec, v),
                       TimeSeries::Zero(g.num_levels()), TimeSeries::Zero(g.num_levels()));
}

StateSolution solve_state_free(const ProblemSpec& spec) {
  return forward_sweep(spec.grid, spec.y0, spec.f, spec.g1, spec.g2);
}

}  // namespace nashpde
