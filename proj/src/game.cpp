#include "nashpde/game.hpp"

#include "nashpde/krylov.hpp"
#include "nashpde/objectives.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace nashpde {

std::string to_string(OperatorMode mode) {
  return mode == OperatorMode::symmetric ? "symmetric" : "general";
}

NashOperator::NashOperator(const ProblemSpec& spec, int threads)
    : NashOperator(spec, weights_are_common(spec.players) ? OperatorMode::symmetric : OperatorMode::general,
                   threads) {}

NashOperator::NashOperator(const ProblemSpec& spec, OperatorMode mode, int threads)
    : spec_(&spec), mode_(mode), threads_(std::max(1, threads)) {
  if (mode == OperatorMode::symmetric && !(spec.common_target_mode && weights_are_common(spec.players))) {
    throw std::invalid_argument("symmetric mode requires rho_i and eta_i to be identical for all players");
  }
}

ControlBundle NashOperator::apply(const ControlBundle& v) const {
  const ProblemSpec& spec = *spec_;
  if (!v.same_shape(ControlBundle(spec))) throw std::invalid_argument("apply_A: control bundle shape mismatch");
  ++counters_.applications;

  const StateSolution y_tilde = solve_state_homogeneous(spec, v);
  ++counters_.forward_solves;

  ControlBundle out(spec);
  if (mode_ == OperatorMode::symmetric) {
    const AdjointSolution p = solve_adjoint_homogeneous(spec, 0, y_tilde);
    ++counters_.backward_solves;
    for (int i = 0; i < spec.num_players(); ++i) {
      out[i] = spec.player(i).alpha * v[i] + restrict_to_omega(spec, p.p, i);
    }
    return out;
  }

  auto player_block = [&](int i) {
    const AdjointSolution p = solve_adjoint_homogeneous(spec, i, y_tilde);
    ++counters_.backward_solves;
    return Matrix(spec.player(i).alpha * v[i] + restrict_to_omega(spec, p.p, i));
  };
  if (threads_ > 1 && spec.num_players() > 1) {
    std::vector<std::future<Matrix>> blocks;
    for (int i = 0; i < spec.num_players(); ++i) blocks.push_back(std::async(std::launch::async, player_block, i));
    for (int i = 0; i < spec.num_players(); ++i) out[i] = blocks[static_cast<std::size_t>(i)].get();
  } else {
    for (int i = 0; i < spec.num_players(); ++i) out[i] = player_block(i);
  }
  return out;
}

ControlBundle NashOperator::rhs() const {
  const ProblemSpec& spec = *spec_;
  const StateSolution y_bar = solve_state_free(spec);
  ++counters_.forward_solves;
  ControlBundle b(spec);
  for (int i = 0; i < spec.num_players(); ++i) {
    const AdjointSolution p = solve_adjoint_free(spec, i, y_bar);
    ++counters_.backward_solves;
    b[i] = -restrict_to_omega(spec, p.p, i);
  }
  return b;
}

ControlBundle apply_A(const NashOperator& op, const ControlBundle& v) { return op.apply(v); }

ControlBundle compute_b(const NashOperator& op) { return op.rhs(); }

double nash_residual(const NashOperator& op, const ControlBundle& v) {
  return norm(op.spec(), op.apply(v) - op.rhs());
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename Method>
NashReport run_krylov(const NashOperator& op, const SolverOptions& options, const std::string& name,
                      Method method) {
  const ProblemSpec& spec = op.spec();
  const auto start = Clock::now();
  const long applications_before = op.counters().applications.load();

  KrylovOptions krylov;
  krylov.rtol = options.rtol;
  krylov.max_iterations =
      options.max_iterations > 0 ? options.max_iterations : 10 * static_cast<long>(spec.control_dimension());
  krylov.restart = options.restart;

  const ControlBundle b = op.rhs();
  ControlBundle x0 = options.initial_guess.value_or(ControlBundle(spec));
  if (!x0.same_shape(b)) throw std::invalid_argument("initial guess has the wrong shape");

  auto apply = [&](const ControlBundle& v) { return op.apply(v); };
  auto inner = [&](const ControlBundle& u, const ControlBundle& v) { return op.inner(u, v); };
  KrylovResult<ControlBundle> result = method(apply, b, std::move(x0), inner, krylov);

  NashReport report;
  report.solver = name;
  report.mode = op.mode();
  report.iterations = result.iterations;
  report.internal_residual = result.internal_residual;
  report.residual_history = std::move(result.history);
  report.b_norm = norm(spec, b);
  report.seed = options.seed;
  report.u = std::move(result.x);

  // Fresh forward and adjoint solves, independent of the Krylov recursion.
  const double scale = report.b_norm > 0.0 ? report.b_norm : 1.0;
  report.residual = nash_residual(op, report.u) / scale;
  report.converged = result.converged && report.residual <= options.rtol;

  report.operator_applications = op.counters().applications.load() - applications_before;
  report.solve_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  if (std::isfinite(report.residual)) {
    for (int i = 0; i < spec.num_players(); ++i) report.J_values.push_back(eval_Ji(spec, i, report.u));
  }
  if (options.ellipticity_samples > 0) {
    report.ellipticity = ellipticity_probe(op, options.ellipticity_samples, options.seed);
  }

  if (!report.converged) {
    std::ostringstream message;
    message << name << " did not converge: relative residual " << std::setprecision(3) << report.residual
            << " after " << report.iterations << " iterations (rtol " << options.rtol << ")";
    throw NonConvergenceError(message.str(), std::move(report));
  }
  return report;
}

}  // namespace

NashReport solve_cg(const NashOperator& op, const SolverOptions& options) {
  if (op.mode() != OperatorMode::symmetric || !weights_are_common(op.spec().players)) {
    throw std::invalid_argument("solve_cg requires a symmetric-mode operator (common rho and eta)");
  }
  return run_krylov(op, options, "cg", [](auto&&... args) { return conjugate_gradient(args...); });
}

NashReport solve_general(const NashOperator& op, const SolverOptions& options) {
  return run_krylov(op, options, "gmres", [](auto&&... args) { return gmres(args...); });
}

double ellipticity_probe(const NashOperator& op, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("ellipticity_probe needs at least one sample");
  const ProblemSpec& spec = op.spec();
  std::mt19937_64 rng(seed);
  double lowest = std::numeric_limits<double>::infinity();
  double min_alpha = std::numeric_limits<double>::infinity();
  for (const auto& p : spec.players) min_alpha = std::min(min_alpha, p.alpha);

  for (int s = 0; s < samples; ++s) {
    const ControlBundle v = (s % 2 == 1) ? random_direction(spec, (s / 2) % spec.num_players(), rng)
                                         : random_bundle(spec, rng);
    const double quotient = op.inner(op.apply(v), v) / op.inner(v, v);
    lowest = std::min(lowest, quotient);
    if (op.mode() == OperatorMode::symmetric && quotient < min_alpha - 1e-10) {
      throw std::logic_error("coercivity bound violated: (Av, v)/(v, v) = " + std::to_string(quotient) +
                             " < min alpha = " + std::to_string(min_alpha));
    }
  }
  return lowest;
}

}  // namespace nashpde
