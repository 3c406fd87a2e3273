#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashpde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Scalar field on the space-time grid. Row n is time level t_n, column j is node x_j.
using SpaceTimeField = Eigen::MatrixXd;
/// Nodal values x_0..x_nx.
using SpatialField = Eigen::VectorXd;
/// Values at time levels t_0..t_nt.
using TimeSeries = Eigen::VectorXd;

/// Raised for malformed or inconsistent problem descriptions. `key()` names the
/// offending configuration entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct GridSpec {
  double length = 1.0;
  double horizon = 1.0;
  int nx = 4;
  int nt = 2;

  double h() const { return length / nx; }
  double dt() const { return horizon / nt; }
  double node(int j) const { return j * h(); }
  double level(int n) const { return n * dt(); }
  int num_nodes() const { return nx + 1; }
  int num_levels() const { return nt + 1; }

  void validate() const;
};

/// Trapezoid weights over the whole of [0, L]: h inside, h/2 at both ends.
Vector trapezoid_weights(const GridSpec& grid);

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

struct PlayerSpec {
  double alpha = 1.0;
  Interval omega;
  SpatialField rho;
  SpatialField eta;
  SpaceTimeField yd;
  SpatialField yT;

  // Resolved by validate_problem().
  int first_node = 0;
  int last_node = -1;

  int num_nodes() const { return last_node - first_node + 1; }
};

struct ProblemSpec {
  GridSpec grid;
  std::vector<PlayerSpec> players;
  SpaceTimeField f;
  SpatialField y0;
  TimeSeries g1;  // Dirichlet value at x = 0
  TimeSeries g2;  // outward flux at x = L
  bool common_target_mode = false;

  int num_players() const { return static_cast<int>(players.size()); }
  const PlayerSpec& player(int i) const;
  Eigen::Index control_dimension() const;
};

/// Zero-valued problem on `grid` with one player per interval, every player with
/// alpha = 1 and zero weights and targets. Call validate_problem() after editing.
ProblemSpec make_zero_problem(const GridSpec& grid, const std::vector<Interval>& omegas);

/// Checks every invariant, resolves the node ranges of the control regions and sets
/// `common_target_mode` from an elementwise comparison of the weights.
void validate_problem(ProblemSpec& spec);

/// True when every player shares bit-identical rho and eta fields.
bool weights_are_common(const std::vector<PlayerSpec>& players);

/// Element of U = U_1 x ... x U_N. Slab i is (nt x m_i); entry (n-1, k) is the control
/// applied over (t_{n-1}, t_n] at the k-th node of omega_i.
class ControlBundle {
 public:
  ControlBundle() = default;
  explicit ControlBundle(const ProblemSpec& spec);
  explicit ControlBundle(std::vector<Matrix> slabs) : slabs_(std::move(slabs)) {}

  int num_players() const { return static_cast<int>(slabs_.size()); }
  Eigen::Index size() const;

  Matrix& operator[](int i) { return slabs_.at(static_cast<std::size_t>(i)); }
  const Matrix& operator[](int i) const { return slabs_.at(static_cast<std::size_t>(i)); }

  bool same_shape(const ControlBundle& other) const;
  void set_zero();

  /// Player-major, then step, then node.
  Vector flatten() const;
  static ControlBundle unflatten(const ProblemSpec& spec, const Vector& flat);

  ControlBundle& operator+=(const ControlBundle& other);
  ControlBundle& operator-=(const ControlBundle& other);
  ControlBundle& operator*=(double s);

  /// this += s * x
  void axpy(double s, const ControlBundle& x);

 private:
  std::vector<Matrix> slabs_;
};

ControlBundle operator+(ControlBundle a, const ControlBundle& b);
ControlBundle operator-(ControlBundle a, const ControlBundle& b);
ControlBundle operator*(double s, ControlBundle a);

/// Quadrature weights of U_i: trapezoid rule restricted to omega_i.
Vector control_weights(const GridSpec& grid, const PlayerSpec& player);

/// Nodal characteristic function of omega_i seen by the state equation: the ratio of
/// the U_i weight to the full-domain weight, so 1/2 at the two ends of omega_i.
Vector control_characteristic(const GridSpec& grid, const PlayerSpec& player);

double inner_product(const ProblemSpec& spec, const ControlBundle& u, const ControlBundle& v);
double norm(const ProblemSpec& spec, const ControlBundle& v);

/// Picks the nodal values on omega_i at levels 1..nt.
Matrix restrict_to_omega(const ProblemSpec& spec, const SpaceTimeField& field, int i);
/// Embeds a slab into an otherwise zero field; level 0 stays zero.
SpaceTimeField extend_by_zero(const ProblemSpec& spec, const Matrix& slab, int i);

/// Keeps only player i's slab.
ControlBundle isolate(const ControlBundle& v, int i);

/// Standard normal entries scaled to unit U-norm.
ControlBundle random_bundle(const ProblemSpec& spec, std::mt19937_64& rng);
/// Random unit direction supported on player i only.
ControlBundle random_direction(const ProblemSpec& spec, int i, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Presets

struct Preset {
  std::string kind;
  std::vector<double> params;
  std::filesystem::path path;  // tabulated only
};

/// Samples a preset at nodes x_0..x_nx.
SpatialField sample_spatial(const Preset& preset, const GridSpec& grid);
/// Samples a preset at levels t_0..t_nt (the preset's coordinate is time, extent T).
TimeSeries sample_time_series(const Preset& preset, const GridSpec& grid);
/// Spatial presets are constant in time; tabulated arrays may vary in both.
SpaceTimeField sample_space_time(const Preset& preset, const GridSpec& grid);

/// Evaluates an analytic preset at coordinate `s` of a domain [0, extent].
double evaluate_preset(const std::string& kind, const std::vector<double>& params, double s,
                       double extent);

// ---------------------------------------------------------------------------
// Configuration files

ProblemSpec load_config(const std::filesystem::path& path);
/// `base_dir` resolves relative tabulated paths.
ProblemSpec parse_config(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace nashpde
