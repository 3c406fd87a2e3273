#pragma once

#include "nashpde/problem.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(NASHPDE_CONFIG_DIR) / name;
}

inline nashpde::ProblemSpec load(const std::string& name) { return nashpde::load_config(config_path(name)); }

// Demo data on another grid; nx must be a multiple of 10.
inline nashpde::ProblemSpec demo_on(int nx, int nt) {
  std::string text = "{\"grid\":{\"L\":1,\"T\":1,\"nx\":" + std::to_string(nx) + ",\"nt\":" + std::to_string(nt) +
                     "},\"data\":{\"f\":{\"kind\":\"gaussian\",\"params\":[1,0.5,0.1]},"
                     "\"y0\":{\"kind\":\"sine\",\"params\":[1,1]},"
                     "\"g1\":{\"kind\":\"constant\",\"params\":[0]},"
                     "\"g2\":{\"kind\":\"constant\",\"params\":[-0.2]}},\"players\":[";
  text += "{\"alpha\":0.05,\"omega\":[0.1,0.3],\"rho\":{\"kind\":\"constant\",\"params\":[1]},\"eta\":{\"kind\":\"constant\",\"params\":[2]},"
          "\"yd\":{\"kind\":\"constant\",\"params\":[1]},\"yT\":{\"kind\":\"constant\",\"params\":[0.5]}},";
  text += "{\"alpha\":0.1,\"omega\":[0.6,0.8],\"rho\":{\"kind\":\"constant\",\"params\":[1]},\"eta\":{\"kind\":\"constant\",\"params\":[2]},"
          "\"yd\":{\"kind\":\"constant\",\"params\":[-0.5]},\"yT\":{\"kind\":\"gaussian\",\"params\":[1,0.7,0.1]}}]}";
  return nashpde::parse_config(text, ".");
}

// Random problem data on an existing layout: every field gets seeded normal values,
// weights are kept nonnegative.
inline void randomize(nashpde::ProblemSpec& s, std::uint64_t seed, bool common_weights) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.2, 2.0);
  auto fill = [&](auto& m) { m = m.unaryExpr([&](double) { return normal(rng); }); };
  fill(s.f);
  fill(s.y0);
  fill(s.g1);
  fill(s.g2);
  nashpde::SpatialField rho = s.players.front().rho;
  nashpde::SpatialField eta = s.players.front().eta;
  rho = rho.unaryExpr([&](double) { return uniform(rng); });
  eta = eta.unaryExpr([&](double) { return uniform(rng); });
  for (auto& p : s.players) {
    if (!common_weights) {
      rho = rho.unaryExpr([&](double) { return uniform(rng); });
      eta = eta.unaryExpr([&](double) { return uniform(rng); });
    }
    p.rho = rho;
    p.eta = eta;
    fill(p.yd);
    fill(p.yT);
    p.alpha = uniform(rng);
  }
  nashpde::validate_problem(s);
}

}  // namespace testing_support
