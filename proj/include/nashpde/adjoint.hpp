#pragma once

#include "nashpde/heat.hpp"

#include <random>

namespace nashpde {

struct AdjointSolution {
  SpaceTimeField p;
  int player = 0;
};

/// Transpose of the forward sweep. With p^{nt+1} := terminal it solves
///   M p^n = p^{n+1} + dt * sources^n,   n = nt..1,
/// and p = 0 on the Dirichlet node. Level 0 is one extra source-free step.
SpaceTimeField backward_sweep(const GridSpec& grid, const SpaceTimeField& sources,
                              const SpatialField& terminal);

/// p_i(v) given y = y(v).
AdjointSolution solve_adjoint(const ProblemSpec& spec, int i, const StateSolution& y);
/// p~_i from y~; the targets are dropped.
AdjointSolution solve_adjoint_homogeneous(const ProblemSpec& spec, int i, const StateSolution& y_tilde);
/// p-bar_i, solving for y-bar internally.
AdjointSolution solve_adjoint_free(const ProblemSpec& spec, int i);
AdjointSolution solve_adjoint_free(const ProblemSpec& spec, int i, const StateSolution& y_bar);

/// dJ_i/dv_i(v) = alpha_i v_i + p_i(v) on omega_i, as a U_i element.
Matrix riesz_gradient(const ProblemSpec& spec, int i, const ControlBundle& v);

/// |<L v, w>_obs - <v, L* w>_U| / (|v| |w|) for one random pair, where L maps a control to
/// its homogeneous state on Q and at T, and L* restricts backward_sweep(w) to each omega_i.
double adjoint_identity_defect(const ProblemSpec& spec, std::mt19937_64& rng);

}  // namespace nashpde
