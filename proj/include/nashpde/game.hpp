#pragma once

#include "nashpde/adjoint.hpp"

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashpde {

enum class OperatorMode { symmetric, general };

std::string to_string(OperatorMode mode);

struct OperatorCounters {
  std::atomic<long> applications{0};
  std::atomic<long> forward_solves{0};
  std::atomic<long> backward_solves{0};
};

/// The optimality operator A and right-hand side b of the stacked gradients
/// (dJ_1/dv_1, ..., dJ_N/dv_N) = A v - b.
///
/// In symmetric mode (common rho and eta) a single adjoint solve serves every player.
/// The referenced ProblemSpec must outlive the operator.
class NashOperator {
 public:
  /// Picks symmetric mode when the problem has common weights.
  explicit NashOperator(const ProblemSpec& spec, int threads = 1);
  /// Throws std::invalid_argument when symmetric mode is requested for a problem
  /// whose weights differ between players.
  NashOperator(const ProblemSpec& spec, OperatorMode mode, int threads = 1);

  NashOperator(const NashOperator&) = delete;
  NashOperator& operator=(const NashOperator&) = delete;

  const ProblemSpec& spec() const { return *spec_; }
  OperatorMode mode() const { return mode_; }
  int threads() const { return threads_; }
  const OperatorCounters& counters() const { return counters_; }

  ControlBundle apply(const ControlBundle& v) const;
  ControlBundle rhs() const;

  double inner(const ControlBundle& u, const ControlBundle& v) const {
    return inner_product(*spec_, u, v);
  }

 private:
  const ProblemSpec* spec_;
  OperatorMode mode_;
  int threads_;
  mutable OperatorCounters counters_;
};

/// A v = (alpha_i v_i + p~_i(v) chi_{omega_i})_i.
ControlBundle apply_A(const NashOperator& op, const ControlBundle& v);
/// b = (-p-bar_i chi_{omega_i})_i.
ControlBundle compute_b(const NashOperator& op);
/// |A v - b| in the U norm.
double nash_residual(const NashOperator& op, const ControlBundle& v);

struct SolverOptions {
  double rtol = 1e-10;
  long max_iterations = 0;  // 0 selects 10 * dim U
  int restart = 50;
  std::optional<ControlBundle> initial_guess;
  int ellipticity_samples = 0;  // 0 skips the probe
  std::uint64_t seed = 0;
};

struct NashReport {
  ControlBundle u;
  std::string solver;
  OperatorMode mode = OperatorMode::symmetric;
  bool converged = false;
  long iterations = 0;
  /// |A u - b| / |b| (absolute when b = 0) from fresh forward and adjoint solves.
  double residual = 0.0;
  double internal_residual = 0.0;
  double b_norm = 0.0;
  std::vector<double> residual_history;
  std::vector<double> J_values;
  std::optional<double> ellipticity;
  std::uint64_t seed = 0;
  double solve_seconds = 0.0;
  long operator_applications = 0;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& message, NashReport report)
      : std::runtime_error(message), report_(std::move(report)) {}
  const NashReport& report() const noexcept { return report_; }
  const std::vector<double>& residual_history() const noexcept { return report_.residual_history; }

 private:
  NashReport report_;
};

/// Conjugate gradients on A u = b; symmetric mode only.
NashReport solve_cg(const NashOperator& op, const SolverOptions& options = {});
/// Restarted GMRES on A u = b; any mode.
NashReport solve_general(const NashOperator& op, const SolverOptions& options = {});

/// Smallest Rayleigh quotient (A v, v) / (v, v) over seeded random probes. Every other
/// probe is supported on a single player. In symmetric mode, throws std::logic_error
/// if a probe falls below min_i alpha_i - 1e-10.
double ellipticity_probe(const NashOperator& op, int samples, std::uint64_t seed = 0);

}  // namespace nashpde
