#include "nashpde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nashpde {

namespace {

std::string player_key(int i, const char* field) {
  return "players[" + std::to_string(i) + "]." + field;
}

int aligned_node(double x, const GridSpec& grid, const std::string& key) {
  const double s = x / grid.h();
  const double nearest = std::round(s);
  if (!std::isfinite(s) || std::abs(s - nearest) > 1e-9 * std::max(1.0, std::abs(s))) {
    throw ConfigError(key, "endpoint " + std::to_string(x) + " is not a grid node (h = " +
                               std::to_string(grid.h()) + ")");
  }
  return static_cast<int>(nearest);
}

void require_length(const Vector& v, Eigen::Index n, const std::string& key) {
  if (v.size() != n) {
    throw ConfigError(key, "expected " + std::to_string(n) + " values, got " +
                               std::to_string(v.size()));
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& key) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ConfigError(key, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) +
                               " array, got " + std::to_string(m.rows()) + "x" +
                               std::to_string(m.cols()));
  }
}

void require_nonnegative(const Vector& v, const std::string& key) {
  if (!v.allFinite() || (v.size() > 0 && v.minCoeff() < 0.0)) {
    throw ConfigError(key, "weights must be finite and nonnegative");
  }
}

}  // namespace

void GridSpec::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("grid.L", "must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("grid.T", "must be positive");
  if (nx < 4) throw ConfigError("grid.nx", "must be at least 4");
  if (nt < 2) throw ConfigError("grid.nt", "must be at least 2");
}

Vector trapezoid_weights(const GridSpec& grid) {
  Vector w = Vector::Constant(grid.num_nodes(), grid.h());
  w(0) *= 0.5;
  w(grid.nx) *= 0.5;
  return w;
}

const PlayerSpec& ProblemSpec::player(int i) const {
  if (i < 0 || i >= num_players()) {
    throw std::out_of_range("player index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(num_players()) + ")");
  }
  return players[static_cast<std::size_t>(i)];
}

Eigen::Index ProblemSpec::control_dimension() const {
  Eigen::Index m = 0;
  for (const auto& p : players) m += p.num_nodes();
  return m * grid.nt;
}

ProblemSpec make_zero_problem(const GridSpec& grid, const std::vector<Interval>& omegas) {
  const int nodes = grid.num_nodes();
  const int levels = grid.num_levels();
  ProblemSpec spec;
  spec.grid = grid;
  spec.f = SpaceTimeField::Zero(levels, nodes);
  spec.y0 = SpatialField::Zero(nodes);
  spec.g1 = TimeSeries::Zero(levels);
  spec.g2 = TimeSeries::Zero(levels);
  for (const auto& omega : omegas) {
    PlayerSpec p;
    p.alpha = 1.0;
    p.omega = omega;
    p.rho = SpatialField::Zero(nodes);
    p.eta = SpatialField::Zero(nodes);
    p.yd = SpaceTimeField::Zero(levels, nodes);
    p.yT = SpatialField::Zero(nodes);
    spec.players.push_back(std::move(p));
  }
  validate_problem(spec);
  return spec;
}

bool weights_are_common(const std::vector<PlayerSpec>& players) {
  for (std::size_t i = 1; i < players.size(); ++i) {
    if (players[i].rho != players[0].rho || players[i].eta != players[0].eta) return false;
  }
  return true;
}

void validate_problem(ProblemSpec& spec) {
  const GridSpec& grid = spec.grid;
  grid.validate();
  const Eigen::Index nodes = grid.num_nodes();
  const Eigen::Index levels = grid.num_levels();

  require_shape(spec.f, levels, nodes, "data.f");
  require_length(spec.y0, nodes, "data.y0");
  require_length(spec.g1, levels, "data.g1");
  require_length(spec.g2, levels, "data.g2");
  if (!spec.f.allFinite() || !spec.y0.allFinite() || !spec.g1.allFinite() || !spec.g2.allFinite()) {
    throw ConfigError("data", "data fields must be finite");
  }

  if (spec.players.empty()) throw ConfigError("players", "at least one player is required");

  for (int i = 0; i < spec.num_players(); ++i) {
    PlayerSpec& p = spec.players[static_cast<std::size_t>(i)];
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) {
      throw ConfigError(player_key(i, "alpha"), "must be positive");
    }
    const std::string omega_key = player_key(i, "omega");
    if (!(p.omega.a < p.omega.b)) throw ConfigError(omega_key, "requires a < b");
    if (!(p.omega.a > 0.0) || !(p.omega.b < grid.length)) {
      throw ConfigError(omega_key, "must lie strictly inside (0, L)");
    }
    p.first_node = aligned_node(p.omega.a, grid, omega_key);
    p.last_node = aligned_node(p.omega.b, grid, omega_key);

    require_length(p.rho, nodes, player_key(i, "rho"));
    require_length(p.eta, nodes, player_key(i, "eta"));
    require_shape(p.yd, levels, nodes, player_key(i, "yd"));
    require_length(p.yT, nodes, player_key(i, "yT"));
    require_nonnegative(p.rho, player_key(i, "rho"));
    require_nonnegative(p.eta, player_key(i, "eta"));
    if (!p.yd.allFinite() || !p.yT.allFinite()) {
      throw ConfigError(player_key(i, "yd"), "targets must be finite");
    }
  }

  for (int i = 0; i < spec.num_players(); ++i) {
    for (int j = i + 1; j < spec.num_players(); ++j) {
      const auto& a = spec.players[static_cast<std::size_t>(i)];
      const auto& b = spec.players[static_cast<std::size_t>(j)];
      if (a.first_node <= b.last_node && b.first_node <= a.last_node) {
        throw ConfigError(player_key(j, "omega"),
                          "overlapping control regions (players " + std::to_string(i) + " and " +
                              std::to_string(j) + ")");
      }
    }
  }

  spec.common_target_mode = weights_are_common(spec.players);
}

// ---------------------------------------------------------------------------

ControlBundle::ControlBundle(const ProblemSpec& spec) {
  slabs_.reserve(spec.players.size());
  for (const auto& p : spec.players) slabs_.push_back(Matrix::Zero(spec.grid.nt, p.num_nodes()));
}

Eigen::Index ControlBundle::size() const {
  Eigen::Index n = 0;
  for (const auto& s : slabs_) n += s.size();
  return n;
}

bool ControlBundle::same_shape(const ControlBundle& other) const {
  if (slabs_.size() != other.slabs_.size()) return false;
  for (std::size_t i = 0; i < slabs_.size(); ++i) {
    if (slabs_[i].rows() != other.slabs_[i].rows() || slabs_[i].cols() != other.slabs_[i].cols()) {
      return false;
    }
  }
  return true;
}

void ControlBundle::set_zero() {
  for (auto& s : slabs_) s.setZero();
}

Vector ControlBundle::flatten() const {
  Vector flat(size());
  Eigen::Index offset = 0;
  for (const auto& s : slabs_) {
    for (Eigen::Index n = 0; n < s.rows(); ++n) {
      flat.segment(offset, s.cols()) = s.row(n).transpose();
      offset += s.cols();
    }
  }
  return flat;
}

ControlBundle ControlBundle::unflatten(const ProblemSpec& spec, const Vector& flat) {
  ControlBundle v(spec);
  if (flat.size() != v.size()) {
    throw std::invalid_argument("flat control vector has length " + std::to_string(flat.size()) +
                                ", expected " + std::to_string(v.size()));
  }
  Eigen::Index offset = 0;
  for (auto& s : v.slabs_) {
    for (Eigen::Index n = 0; n < s.rows(); ++n) {
      s.row(n) = flat.segment(offset, s.cols()).transpose();
      offset += s.cols();
    }
  }
  return v;
}

ControlBundle& ControlBundle::operator+=(const ControlBundle& other) {
  if (!same_shape(other)) throw std::invalid_argument("control bundle shape mismatch");
  for (std::size_t i = 0; i < slabs_.size(); ++i) slabs_[i] += other.slabs_[i];
  return *this;
}

ControlBundle& ControlBundle::operator-=(const ControlBundle& other) {
  if (!same_shape(other)) throw std::invalid_argument("control bundle shape mismatch");
  for (std::size_t i = 0; i < slabs_.size(); ++i) slabs_[i] -= other.slabs_[i];
  return *this;
}

ControlBundle& ControlBundle::operator*=(double s) {
  for (auto& slab : slabs_) slab *= s;
  return *this;
}

void ControlBundle::axpy(double s, const ControlBundle& x) {
  if (!same_shape(x)) throw std::invalid_argument("control bundle shape mismatch");
  for (std::size_t i = 0; i < slabs_.size(); ++i) slabs_[i] += s * x.slabs_[i];
}

ControlBundle operator+(ControlBundle a, const ControlBundle& b) { return a += b; }
ControlBundle operator-(ControlBundle a, const ControlBundle& b) { return a -= b; }
ControlBundle operator*(double s, ControlBundle a) { return a *= s; }

Vector control_weights(const GridSpec& grid, const PlayerSpec& player) {
  Vector w = Vector::Constant(player.num_nodes(), grid.h());
  w(0) *= 0.5;
  w(w.size() - 1) *= 0.5;
  return w;
}

Vector control_characteristic(const GridSpec& grid, const PlayerSpec& player) {
  const Vector full = trapezoid_weights(grid);
  return control_weights(grid, player).cwiseQuotient(full.segment(player.first_node, player.num_nodes()));
}

double inner_product(const ProblemSpec& spec, const ControlBundle& u, const ControlBundle& v) {
  if (!u.same_shape(v) || u.num_players() != spec.num_players()) {
    throw std::invalid_argument("inner_product: control bundle shape mismatch");
  }
  double total = 0.0;
  for (int i = 0; i < spec.num_players(); ++i) {
    const Vector w = control_weights(spec.grid, spec.players[static_cast<std::size_t>(i)]);
    if (u[i].cols() != w.size()) throw std::invalid_argument("inner_product: slab width mismatch");
    total += (u[i].cwiseProduct(v[i]) * w).sum();
  }
  return spec.grid.dt() * total;
}

double norm(const ProblemSpec& spec, const ControlBundle& v) {
  return std::sqrt(inner_product(spec, v, v));
}

Matrix restrict_to_omega(const ProblemSpec& spec, const SpaceTimeField& field, int i) {
  const PlayerSpec& p = spec.player(i);
  return field.block(1, p.first_node, spec.grid.nt, p.num_nodes());
}

SpaceTimeField extend_by_zero(const ProblemSpec& spec, const Matrix& slab, int i) {
  const PlayerSpec& p = spec.player(i);
  if (slab.rows() != spec.grid.nt || slab.cols() != p.num_nodes()) {
    throw std::invalid_argument("extend_by_zero: slab shape mismatch");
  }
  SpaceTimeField field = SpaceTimeField::Zero(spec.grid.num_levels(), spec.grid.num_nodes());
  field.block(1, p.first_node, spec.grid.nt, p.num_nodes()) = slab;
  return field;
}

ControlBundle isolate(const ControlBundle& v, int i) {
  ControlBundle out = v;
  for (int k = 0; k < out.num_players(); ++k) {
    if (k != i) out[k].setZero();
  }
  return out;
}

ControlBundle random_bundle(const ProblemSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ControlBundle v(spec);
  for (int i = 0; i < v.num_players(); ++i) {
    v[i] = v[i].unaryExpr([&](double) { return normal(rng); });
  }
  v *= 1.0 / norm(spec, v);
  return v;
}

ControlBundle random_direction(const ProblemSpec& spec, int i, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ControlBundle d(spec);
  d[i] = d[i].unaryExpr([&](double) { return normal(rng); });
  d *= 1.0 / norm(spec, d);
  return d;
}

// ---------------------------------------------------------------------------

double evaluate_preset(const std::string& kind, const std::vector<double>& params, double s,
                       double extent) {
  auto arity = [&](std::size_t n) {
    if (params.size() != n) {
      throw ConfigError("params", "preset '" + kind + "' takes " + std::to_string(n) +
                                      " parameters, got " + std::to_string(params.size()));
    }
  };
  if (kind == "constant") {
    arity(1);
    return params[0];
  }
  if (kind == "gaussian") {
    // amplitude, center, width
    arity(3);
    if (!(params[2] > 0.0)) throw ConfigError("params", "gaussian width must be positive");
    const double z = (s - params[1]) / params[2];
    return params[0] * std::exp(-0.5 * z * z);
  }
  if (kind == "sine") {
    // wavenumber k, amplitude: amp * sin(k pi s / extent)
    arity(2);
    return params[1] * std::sin(params[0] * std::numbers::pi * s / extent);
  }
  if (kind == "indicator") {
    arity(2);
    const double tol = 1e-12 * extent;
    return (s >= params[0] - tol && s <= params[1] + tol) ? 1.0 : 0.0;
  }
  if (kind == "tabulated") throw ConfigError("kind", "tabulated presets have no analytic form");
  throw ConfigError("kind", "unknown preset '" + kind + "'");
}

}  // namespace nashpde
