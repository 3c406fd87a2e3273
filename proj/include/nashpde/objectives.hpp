#pragma once

#include "nashpde/game.hpp"

#include <cstdint>
#include <string>

namespace nashpde {

/// Coefficients for the expanded cooperative functionals. `derived` follows from
/// expanding (A v, v) - 2 (b, v); `literal` reproduces the formulas as they are
/// usually printed (doubled cross terms, full states in the cross products, and the
/// correction states indexed by j), kept as a negative control.
enum class CoefficientSet { derived, literal };

struct FunctionalFamily {
  enum class Kind { coop, jp };
  Kind kind = Kind::coop;
  int j = 0;  // tracking target index (jp only)
  int p = 0;  // terminal target index (jp only)

  static FunctionalFamily coop() { return {}; }
  static FunctionalFamily jp(int j, int p) { return {Kind::jp, j, p}; }
  /// "coop" or "jp(j,p)" with 1-based indices.
  std::string label() const;
};

/// Quadratures shared by every functional: rectangle rule in time over levels 1..nt,
/// trapezoid rule in space.
double space_time_integral(const GridSpec& grid, const SpatialField& weight, const SpaceTimeField& a,
                           const SpaceTimeField& b);
double spatial_integral(const GridSpec& grid, const SpatialField& weight, const SpatialField& a,
                        const SpatialField& b);

/// J_i(v) = alpha_i/2 |v_i|^2 + 1/2 int_Q rho_i |y - y_{i,d}|^2 + 1/2 int_Omega eta_i |y(T) - y_{i,T}|^2.
double eval_Ji(const ProblemSpec& spec, int i, const ControlBundle& v);
/// Same functional with the state supplied by the caller.
double eval_Ji_from_state(const ProblemSpec& spec, int i, const ControlBundle& v, const SpaceTimeField& y);

/// (A v, v) - 2 (b, v). Symmetric mode only.
double eval_Jtilde(const NashOperator& op, const ControlBundle& v);

/// Cooperative functional assembled from the superposition states y(0,..,v_i,..,0).
/// With derived coefficients, J_coop - Jtilde/2 does not depend on v.
double eval_J_coop(const ProblemSpec& spec, const ControlBundle& v,
                   CoefficientSet coefficients = CoefficientSet::derived);

/// J_{j,p}: tracks y_{j,d} and y_{p,T}, plus the correction terms. Indices are 0-based.
double eval_Jjp(const ProblemSpec& spec, int j, int p, const ControlBundle& v,
                CoefficientSet coefficients = CoefficientSet::derived);

/// Riesz gradient of J_coop or J_{j,p} (derived coefficients), computed from the
/// functional's own superposition states rather than through A.
ControlBundle functional_gradient(const ProblemSpec& spec, const FunctionalFamily& family,
                                  const ControlBundle& v);

struct EquivalenceReport {
  FunctionalFamily family;
  CoefficientSet coefficients = CoefficientSet::derived;
  int probes = 0;
  std::uint64_t seed = 0;

  // J(v) - Jtilde(v)/2 over the probe set.
  double constant_mean = 0.0;
  double constant_max_deviation = 0.0;
  double constant_variance = 0.0;
  bool constant_pass = false;

  // |grad J(v) - (A v - b)| / |A v - b| at a random v.
  double gradient_mismatch = 0.0;
  bool gradient_consistent = false;

  bool argmin_evaluated = false;
  double argmin_distance = 0.0;
  long minimizer_iterations = 0;
  double functional_at_nash = 0.0;
  double half_jtilde_at_nash = 0.0;

  bool passed() const { return constant_pass && gradient_consistent && argmin_evaluated && argmin_distance < 1e-8; }
};

/// Constant-difference test over `probes` random bundles, then an independent CG
/// minimization of the functional compared against the Nash equilibrium.
/// The literal set only runs the constant-difference part.
EquivalenceReport certify_equivalence(const NashOperator& op, const FunctionalFamily& family, int probes,
                                      std::uint64_t seed,
                                      CoefficientSet coefficients = CoefficientSet::derived);

/// Largest relative error between central differences of J_i and <riesz_gradient, d>
/// over seeded random unit directions supported on player i.
double fd_gradient_check(const ProblemSpec& spec, int i, const ControlBundle& v, int directions, double eps,
                         std::uint64_t seed = 0);

/// min over trials of J_i(u + eps d) - J_i(u), for random players i, random unit
/// directions d on player i and eps in {1e-3, 1e-2}. A Nash equilibrium gives >= -1e-12.
double unilateral_check(const NashOperator& op, const ControlBundle& u, int trials, std::uint64_t seed = 0);

}  // namespace nashpde
