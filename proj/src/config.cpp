#include "nashpde/io.hpp"
#include "nashpde/problem.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace nashpde {

namespace {

using nlohmann::json;

const json& require(const json& node, const std::string& name, const std::string& key) {
  if (!node.is_object() || !node.contains(name)) {
    throw ConfigError(key, "missing required key");
  }
  return node.at(name);
}

double require_number(const json& node, const std::string& name, const std::string& key) {
  const json& v = require(node, name, key);
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

int require_integer(const json& node, const std::string& name, const std::string& key) {
  const json& v = require(node, name, key);
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

Preset parse_preset(const json& node, const std::string& key, const std::filesystem::path& base_dir) {
  if (!node.is_object()) throw ConfigError(key, "expected a preset object {kind, params}");
  const json& kind = require(node, "kind", key + ".kind");
  if (!kind.is_string()) throw ConfigError(key + ".kind", "expected a string");
  Preset preset;
  preset.kind = kind.get<std::string>();
  if (preset.kind == "tabulated") {
    const json& path = require(node, "path", key + ".path");
    if (!path.is_string()) throw ConfigError(key + ".path", "expected a string");
    preset.path = std::filesystem::path(path.get<std::string>());
    if (preset.path.is_relative()) preset.path = base_dir / preset.path;
    return preset;
  }
  const json& params = require(node, "params", key + ".params");
  if (!params.is_array()) throw ConfigError(key + ".params", "expected an array of numbers");
  for (const auto& p : params) {
    if (!p.is_number()) throw ConfigError(key + ".params", "expected an array of numbers");
    preset.params.push_back(p.get<double>());
  }
  return preset;
}

template <typename Sampler>
auto sample_keyed(const json& parent, const std::string& name, const std::string& key,
                  const std::filesystem::path& base_dir, const GridSpec& grid, Sampler sampler) {
  const std::string full = key + "." + name;
  const Preset preset = parse_preset(require(parent, name, full), full, base_dir);
  try {
    return sampler(preset, grid);
  } catch (const ConfigError& e) {
    throw ConfigError(full + (e.key().empty() ? "" : "." + e.key()),
                      std::string(e.what()).substr(e.key().empty() ? 0 : e.key().size() + 2));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Preset sampling

SpatialField sample_spatial(const Preset& preset, const GridSpec& grid) {
  if (preset.kind == "tabulated") {
    const Matrix table = read_numeric_csv(preset.path);
    if (table.size() != grid.num_nodes() || (table.rows() != 1 && table.cols() != 1)) {
      throw ConfigError("path", "tabulated spatial field needs " + std::to_string(grid.num_nodes()) +
                                    " values in one row or column");
    }
    return table.reshaped();
  }
  SpatialField out(grid.num_nodes());
  for (int j = 0; j <= grid.nx; ++j) {
    out(j) = evaluate_preset(preset.kind, preset.params, grid.node(j), grid.length);
  }
  return out;
}

TimeSeries sample_time_series(const Preset& preset, const GridSpec& grid) {
  if (preset.kind == "tabulated") {
    const Matrix table = read_numeric_csv(preset.path);
    if (table.size() != grid.num_levels() || (table.rows() != 1 && table.cols() != 1)) {
      throw ConfigError("path", "tabulated time series needs " + std::to_string(grid.num_levels()) +
                                    " values in one row or column");
    }
    return table.reshaped();
  }
  TimeSeries out(grid.num_levels());
  for (int n = 0; n <= grid.nt; ++n) {
    out(n) = evaluate_preset(preset.kind, preset.params, grid.level(n), grid.horizon);
  }
  return out;
}

SpaceTimeField sample_space_time(const Preset& preset, const GridSpec& grid) {
  if (preset.kind == "tabulated") {
    Matrix table = read_numeric_csv(preset.path);
    if (table.rows() != grid.num_levels() || table.cols() != grid.num_nodes()) {
      throw ConfigError("path", "tabulated space-time field needs " +
                                    std::to_string(grid.num_levels()) + " rows of " +
                                    std::to_string(grid.num_nodes()) + " values");
    }
    return table;
  }
  const SpatialField profile = sample_spatial(preset, grid);
  return profile.transpose().replicate(grid.num_levels(), 1);
}

// ---------------------------------------------------------------------------

ProblemSpec parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("", "configuration must be a JSON object");

  ProblemSpec spec;
  const json& grid = require(root, "grid", "grid");
  spec.grid.length = require_number(grid, "L", "grid.L");
  spec.grid.horizon = require_number(grid, "T", "grid.T");
  spec.grid.nx = require_integer(grid, "nx", "grid.nx");
  spec.grid.nt = require_integer(grid, "nt", "grid.nt");
  spec.grid.validate();
  const GridSpec& g = spec.grid;

  const json& data = require(root, "data", "data");
  spec.f = sample_keyed(data, "f", "data", base_dir, g, sample_space_time);
  spec.y0 = sample_keyed(data, "y0", "data", base_dir, g, sample_spatial);
  spec.g1 = sample_keyed(data, "g1", "data", base_dir, g, sample_time_series);
  spec.g2 = sample_keyed(data, "g2", "data", base_dir, g, sample_time_series);

  const json& players = require(root, "players", "players");
  if (!players.is_array()) throw ConfigError("players", "expected an array");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const std::string key = "players[" + std::to_string(i) + "]";
    const json& node = players[i];
    PlayerSpec p;
    p.alpha = require_number(node, "alpha", key + ".alpha");
    const json& omega = require(node, "omega", key + ".omega");
    if (!omega.is_array() || omega.size() != 2 || !omega[0].is_number() || !omega[1].is_number()) {
      throw ConfigError(key + ".omega", "expected [a, b]");
    }
    p.omega = {omega[0].get<double>(), omega[1].get<double>()};
    p.rho = sample_keyed(node, "rho", key, base_dir, g, sample_spatial);
    p.eta = sample_keyed(node, "eta", key, base_dir, g, sample_spatial);
    p.yd = sample_keyed(node, "yd", key, base_dir, g, sample_space_time);
    p.yT = sample_keyed(node, "yT", key, base_dir, g, sample_spatial);
    spec.players.push_back(std::move(p));
  }

  validate_problem(spec);
  return spec;
}

ProblemSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace nashpde
