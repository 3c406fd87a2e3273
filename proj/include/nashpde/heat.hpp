#pragma once

#include "nashpde/problem.hpp"
#include "nashpde/tridiagonal.hpp"

namespace nashpde {

struct StateSolution {
  SpaceTimeField y;
  int steps = 0;
  double theta = 1.0;  // implicit Euler
};

/// The implicit-Euler matrix M = I - dt * Lap_h acting on nodes 1..nx, with the
/// Dirichlet node eliminated and a ghost-node Neumann row at x = L. With W the
/// trapezoid weights, W M is symmetric, so the discrete adjoint solves with M too.
class ImplicitEulerMatrix {
 public:
  explicit ImplicitEulerMatrix(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }

  /// Solves M x = rhs, where rhs and x cover nodes 1..nx.
  Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }

  /// Applies M to values on nodes 1..nx.
  Vector apply(const Vector& x) const;

 private:
  GridSpec grid_;
  TridiagonalLU<double> lu_;
};

/// One implicit-Euler step over (t_{n-1}, t_n]: returns y_new on all nodes, with
/// y_new(0) = g1 and forcing taken at the new level.
SpatialField step(const SpatialField& y_prev, const SpatialField& forcing, double g1, double g2,
                  const GridSpec& grid);

/// Marches all nt steps. Row 0 of `forcing` is never used.
StateSolution forward_sweep(const GridSpec& grid, const SpatialField& y0, const SpaceTimeField& forcing,
                            const TimeSeries& g1, const TimeSeries& g2);

/// Space-time load produced by the controls: sum_i v_i chi_{omega_i}.
SpaceTimeField control_load(const ProblemSpec& spec, const ControlBundle& v);

/// y(v) for the full data set.
StateSolution solve_state(const ProblemSpec& spec, const ControlBundle& v);
/// y~(v): zero f, y0, g1, g2. Linear in v.
StateSolution solve_state_homogeneous(const ProblemSpec& spec, const ControlBundle& v);
/// y-bar = y(0).
StateSolution solve_state_free(const ProblemSpec& spec);

}  // namespace nashpde
