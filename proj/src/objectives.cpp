#include "nashpde/objectives.hpp"

#include "nashpde/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace nashpde {

std::string FunctionalFamily::label() const {
  if (kind == Kind::coop) return "coop";
  return "jp(" + std::to_string(j + 1) + "," + std::to_string(p + 1) + ")";
}

double space_time_integral(const GridSpec& grid, const SpatialField& weight, const SpaceTimeField& a,
                           const SpaceTimeField& b) {
  const Vector w = trapezoid_weights(grid).cwiseProduct(weight);
  return grid.dt() * (a.bottomRows(grid.nt).cwiseProduct(b.bottomRows(grid.nt)) * w).sum();
}

double spatial_integral(const GridSpec& grid, const SpatialField& weight, const SpatialField& a,
                        const SpatialField& b) {
  return (trapezoid_weights(grid).cwiseProduct(weight).cwiseProduct(a)).dot(b);
}

namespace {

double control_energy(const ProblemSpec& spec, int i, const Matrix& slab) {
  const Vector w = control_weights(spec.grid, spec.player(i));
  return spec.grid.dt() * (slab.cwiseProduct(slab) * w).sum();
}

double weighted_control_energy(const ProblemSpec& spec, const ControlBundle& v) {
  double total = 0.0;
  for (int i = 0; i < spec.num_players(); ++i) total += 0.5 * spec.player(i).alpha * control_energy(spec, i, v[i]);
  return total;
}

SpatialField terminal(const SpaceTimeField& field) { return field.row(field.rows() - 1).transpose(); }

void require_symmetric(const ProblemSpec& spec, const char* what) {
  if (!spec.common_target_mode || !weights_are_common(spec.players)) {
    throw std::invalid_argument(std::string(what) + " is only defined when rho and eta are common to all players");
  }
}

// Homogeneous states y~(0,..,v_i,..,0) for every player.
std::vector<SpaceTimeField> superposition_states(const ProblemSpec& spec, const ControlBundle& v) {
  std::vector<SpaceTimeField> states;
  states.reserve(static_cast<std::size_t>(spec.num_players()));
  for (int i = 0; i < spec.num_players(); ++i) states.push_back(solve_state_homogeneous(spec, isolate(v, i)).y);
  return states;
}

}  // namespace

double eval_Ji_from_state(const ProblemSpec& spec, int i, const ControlBundle& v, const SpaceTimeField& y) {
  const PlayerSpec& player = spec.player(i);
  const SpaceTimeField misfit = y - player.yd;
  const SpatialField end_misfit = terminal(y) - player.yT;
  return 0.5 * player.alpha * control_energy(spec, i, v[i]) +
         0.5 * space_time_integral(spec.grid, player.rho, misfit, misfit) +
         0.5 * spatial_integral(spec.grid, player.eta, end_misfit, end_misfit);
}

double eval_Ji(const ProblemSpec& spec, int i, const ControlBundle& v) {
  return eval_Ji_from_state(spec, i, v, solve_state(spec, v).y);
}

double eval_Jtilde(const NashOperator& op, const ControlBundle& v) {
  if (op.mode() != OperatorMode::symmetric) throw std::invalid_argument("eval_Jtilde requires symmetric mode");
  return op.inner(op.apply(v), v) - 2.0 * op.inner(op.rhs(), v);
}

double eval_J_coop(const ProblemSpec& spec, const ControlBundle& v, CoefficientSet coefficients) {
  require_symmetric(spec, "J_coop");
  const GridSpec& grid = spec.grid;
  const SpatialField& rho = spec.players[0].rho;
  const SpatialField& eta = spec.players[0].eta;
  const SpaceTimeField y_bar = solve_state_free(spec).y;
  const std::vector<SpaceTimeField> y_tilde = superposition_states(spec, v);

  double total = weighted_control_energy(spec, v);
  for (int i = 0; i < spec.num_players(); ++i) {
    const PlayerSpec& player = spec.player(i);
    const SpaceTimeField state = y_tilde[static_cast<std::size_t>(i)] + y_bar;
    const SpaceTimeField misfit = state - player.yd;
    const SpatialField end_misfit = terminal(state) - player.yT;
    total += 0.5 * (space_time_integral(grid, rho, misfit, misfit) + spatial_integral(grid, eta, end_misfit, end_misfit));
  }

  for (int i = 0; i < spec.num_players(); ++i) {
    for (int j = i + 1; j < spec.num_players(); ++j) {
      const auto& yi = y_tilde[static_cast<std::size_t>(i)];
      const auto& yj = y_tilde[static_cast<std::size_t>(j)];
      if (coefficients == CoefficientSet::derived) {
        total += space_time_integral(grid, rho, yi, yj) + spatial_integral(grid, eta, terminal(yi), terminal(yj));
      } else {
        const SpaceTimeField full_i = yi + y_bar;
        const SpaceTimeField full_j = yj + y_bar;
        total += 2.0 * (space_time_integral(grid, rho, full_i, full_j) +
                        spatial_integral(grid, eta, terminal(full_i), terminal(full_j)));
      }
    }
  }
  return total;
}

double eval_Jjp(const ProblemSpec& spec, int j, int p, const ControlBundle& v, CoefficientSet coefficients) {
  require_symmetric(spec, "J_{j,p}");
  const PlayerSpec& tracked = spec.player(j);
  const PlayerSpec& terminal_player = spec.player(p);
  const GridSpec& grid = spec.grid;
  const SpatialField& rho = spec.players[0].rho;
  const SpatialField& eta = spec.players[0].eta;

  const SpaceTimeField y = solve_state(spec, v).y;
  const SpaceTimeField misfit = y - tracked.yd;
  const SpatialField end_misfit = terminal(y) - terminal_player.yT;
  double total = weighted_control_energy(spec, v) + 0.5 * space_time_integral(grid, rho, misfit, misfit) +
                 0.5 * spatial_integral(grid, eta, end_misfit, end_misfit);

  const bool literal = coefficients == CoefficientSet::literal;
  const double factor = literal ? 2.0 : 1.0;
  std::vector<std::optional<SpaceTimeField>> cache(static_cast<std::size_t>(spec.num_players()));
  auto y_tilde = [&](int i) -> const SpaceTimeField& {
    auto& slot = cache[static_cast<std::size_t>(i)];
    if (!slot) slot = solve_state_homogeneous(spec, isolate(v, i)).y;
    return *slot;
  };

  for (int i = 0; i < spec.num_players(); ++i) {
    if (i == j) continue;
    const SpaceTimeField gap = tracked.yd - spec.player(i).yd;
    total += factor * space_time_integral(grid, rho, gap, y_tilde(literal ? j : i));
  }
  for (int i = 0; i < spec.num_players(); ++i) {
    if (i == p) continue;
    const SpatialField gap = terminal_player.yT - spec.player(i).yT;
    total += factor * spatial_integral(grid, eta, gap, terminal(y_tilde(literal ? j : i)));
  }
  return total;
}

ControlBundle functional_gradient(const ProblemSpec& spec, const FunctionalFamily& family, const ControlBundle& v) {
  require_symmetric(spec, "functional_gradient");
  const GridSpec& grid = spec.grid;
  const SpatialField& rho = spec.players[0].rho;
  const SpatialField& eta = spec.players[0].eta;
  ControlBundle grad(spec);

  if (family.kind == FunctionalFamily::Kind::coop) {
    const SpaceTimeField y_bar = solve_state_free(spec).y;
    const std::vector<SpaceTimeField> y_tilde = superposition_states(spec, v);
    for (int k = 0; k < spec.num_players(); ++k) {
      SpaceTimeField field = y_bar - spec.player(k).yd;
      SpatialField end = terminal(y_bar) - spec.player(k).yT;
      for (int i = 0; i < spec.num_players(); ++i) {
        field += y_tilde[static_cast<std::size_t>(i)];
        end += terminal(y_tilde[static_cast<std::size_t>(i)]);
      }
      const SpaceTimeField p = backward_sweep(grid, field * rho.asDiagonal(), end.cwiseProduct(eta));
      grad[k] = spec.player(k).alpha * v[k] + restrict_to_omega(spec, p, k);
    }
    return grad;
  }

  const PlayerSpec& tracked = spec.player(family.j);
  const PlayerSpec& terminal_player = spec.player(family.p);
  const SpaceTimeField y = solve_state(spec, v).y;
  for (int k = 0; k < spec.num_players(); ++k) {
    SpaceTimeField field = y - tracked.yd;
    SpatialField end = terminal(y) - terminal_player.yT;
    if (k != family.j) field += tracked.yd - spec.player(k).yd;
    if (k != family.p) end += terminal_player.yT - spec.player(k).yT;
    const SpaceTimeField p = backward_sweep(grid, field * rho.asDiagonal(), end.cwiseProduct(eta));
    grad[k] = spec.player(k).alpha * v[k] + restrict_to_omega(spec, p, k);
  }
  return grad;
}

EquivalenceReport certify_equivalence(const NashOperator& op, const FunctionalFamily& family, int probes,
                                      std::uint64_t seed, CoefficientSet coefficients) {
  const ProblemSpec& spec = op.spec();
  if (op.mode() != OperatorMode::symmetric) throw std::invalid_argument("certify_equivalence requires symmetric mode");
  if (probes < 10) throw std::invalid_argument("certify_equivalence needs at least 10 probes");
  if (family.kind == FunctionalFamily::Kind::jp) {
    spec.player(family.j);
    spec.player(family.p);
  }

  EquivalenceReport report;
  report.family = family;
  report.coefficients = coefficients;
  report.probes = probes;
  report.seed = seed;

  auto functional = [&](const ControlBundle& v) {
    return family.kind == FunctionalFamily::Kind::coop ? eval_J_coop(spec, v, coefficients)
                                                       : eval_Jjp(spec, family.j, family.p, v, coefficients);
  };

  std::mt19937_64 rng(seed);
  std::vector<double> gaps;
  for (int s = 0; s < probes; ++s) {
    const ControlBundle v = random_bundle(spec, rng);
    gaps.push_back(functional(v) - 0.5 * eval_Jtilde(op, v));
  }
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  double max_dev = 0.0;
  double variance = 0.0;
  for (double g : gaps) {
    max_dev = std::max(max_dev, std::abs(g - mean));
    variance += (g - mean) * (g - mean);
  }
  report.constant_mean = mean;
  report.constant_max_deviation = max_dev;
  report.constant_variance = variance / static_cast<double>(gaps.size());
  report.constant_pass = max_dev < 1e-10 * (1.0 + std::abs(mean));

  if (coefficients != CoefficientSet::derived) return report;

  // Gradient of the functional, from its own terms, against the optimality operator.
  const ControlBundle probe = random_bundle(spec, rng);
  const ControlBundle stacked = op.apply(probe) - op.rhs();
  const ControlBundle own = functional_gradient(spec, family, probe);
  const double scale = std::max(norm(spec, stacked), std::numeric_limits<double>::min());
  report.gradient_mismatch = norm(spec, own - stacked) / scale;
  report.gradient_consistent = report.gradient_mismatch < 1e-10;

  // Minimize the quadratic functional by CG on its own gradient: H d = G(d) - G(0).
  const ControlBundle zero(spec);
  const ControlBundle g0 = functional_gradient(spec, family, zero);
  auto hessian = [&](const ControlBundle& d) { return functional_gradient(spec, family, d) - g0; };
  auto inner = [&](const ControlBundle& a, const ControlBundle& b) { return inner_product(spec, a, b); };
  KrylovOptions options;
  options.rtol = 1e-12;
  options.max_iterations = 10 * static_cast<long>(spec.control_dimension());
  const KrylovResult<ControlBundle> minimizer = conjugate_gradient(hessian, (-1.0) * g0, zero, inner, options);
  if (!minimizer.converged) {
    NashReport partial;
    partial.u = minimizer.x;
    partial.solver = "cg(" + family.label() + ")";
    partial.residual = minimizer.residual;
    partial.iterations = minimizer.iterations;
    partial.residual_history = minimizer.history;
    throw NonConvergenceError("minimization of " + family.label() + " did not converge", std::move(partial));
  }
  report.minimizer_iterations = minimizer.iterations;

  SolverOptions nash_options;
  nash_options.rtol = 1e-12;
  const NashReport nash = solve_cg(op, nash_options);
  const double nash_norm = norm(spec, nash.u);
  const double distance = norm(spec, minimizer.x - nash.u);
  report.argmin_distance = nash_norm > 0.0 ? distance / nash_norm : distance;
  report.argmin_evaluated = true;
  report.functional_at_nash = functional(nash.u);
  report.half_jtilde_at_nash = 0.5 * eval_Jtilde(op, nash.u);
  return report;
}

double fd_gradient_check(const ProblemSpec& spec, int i, const ControlBundle& v, int directions, double eps,
                         std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("fd_gradient_check: eps must be positive");
  ControlBundle gradient(spec);
  gradient[i] = riesz_gradient(spec, i, v);
  const double gradient_norm = norm(spec, gradient);

  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < directions; ++s) {
    const ControlBundle d = random_direction(spec, i, rng);
    ControlBundle plus = v;
    plus.axpy(eps, d);
    ControlBundle minus = v;
    minus.axpy(-eps, d);
    const double fd = (eval_Ji(spec, i, plus) - eval_Ji(spec, i, minus)) / (2.0 * eps);
    const double exact = inner_product(spec, gradient, d);
    double denom = std::abs(exact);
    if (denom <= 1e-12 * gradient_norm) denom = gradient_norm;
    const double error = denom > 0.0 ? std::abs(fd - exact) / denom : std::abs(fd);
    worst = std::max(worst, error);
  }
  return worst;
}

double unilateral_check(const NashOperator& op, const ControlBundle& u, int trials, std::uint64_t seed) {
  const ProblemSpec& spec = op.spec();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, spec.num_players() - 1);
  std::vector<double> base(static_cast<std::size_t>(spec.num_players()));
  for (int i = 0; i < spec.num_players(); ++i) base[static_cast<std::size_t>(i)] = eval_Ji(spec, i, u);

  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const int i = pick(rng);
    const ControlBundle d = random_direction(spec, i, rng);
    for (double eps : {1e-3, 1e-2}) {
      ControlBundle moved = u;
      moved.axpy(eps, d);
      worst = std::min(worst, eval_Ji(spec, i, moved) - base[static_cast<std::size_t>(i)]);
    }
  }
  return worst;
}

}  // namespace nashpde
