#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

using namespace nashpde;
using testing_support::load;

namespace {

std::string two_player_config(const std::string& omega1, const std::string& omega2) {
  return R"({"grid":{"L":1,"T":1,"nx":10,"nt":4},
    "data":{"f":{"kind":"constant","params":[0]},"y0":{"kind":"constant","params":[0]},
            "g1":{"kind":"constant","params":[0]},"g2":{"kind":"constant","params":[0]}},
    "players":[
      {"alpha":1,"omega":)" + omega1 + R"(,"rho":{"kind":"constant","params":[1]},"eta":{"kind":"constant","params":[1]},
       "yd":{"kind":"constant","params":[0]},"yT":{"kind":"constant","params":[0]}},
      {"alpha":1,"omega":)" + omega2 + R"(,"rho":{"kind":"constant","params":[1]},"eta":{"kind":"constant","params":[1]},
       "yd":{"kind":"constant","params":[0]},"yT":{"kind":"constant","params":[0]}}]})";
}

}  // namespace

TEST_CASE("minimal config parses to a single player") {
  const ProblemSpec s = load("minimal.json");
  CHECK(s.num_players() == 1);
  CHECK(s.grid.nx == 4);
  CHECK(s.grid.nt == 2);
  CHECK(s.f.isZero(0.0));
  CHECK(s.common_target_mode);
}

TEST_CASE("demo config is two players with common weights") {
  const ProblemSpec s = load("demo.json");
  CHECK(s.num_players() == 2);
  CHECK(s.common_target_mode);
  CHECK(s.f.rows() == 51);
  CHECK(s.f.cols() == 51);
}

TEST_CASE("general config has distinct weights") {
  CHECK_FALSE(load("general_small.json").common_target_mode);
}

TEST_CASE("overlapping control regions are rejected") {
  try {
    parse_config(two_player_config("[0.2,0.4]", "[0.3,0.5]"), ".");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("overlapping control regions") != std::string::npos);
  }
}

TEST_CASE("control region must sit on grid nodes") {
  CHECK_THROWS_AS(parse_config(two_player_config("[0.25,0.4]", "[0.6,0.8]"), "."), ConfigError);
}

TEST_CASE("configuration errors name the offending key") {
  try {
    parse_config(two_player_config("[0.2,0.4]", "[0.6]"), ".");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "players[1].omega");
  }
  CHECK_THROWS_AS(parse_config("{not json", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid":{"L":1,"T":1,"nx":2,"nt":4}})", "."), ConfigError);
}

TEST_CASE("nonpositive alpha is rejected") {
  ProblemSpec s = load("demo_small.json");
  s.players[0].alpha = 0.0;
  CHECK_THROWS_AS(validate_problem(s), ConfigError);
}

TEST_CASE("preset evaluation") {
  const GridSpec g{1.0, 1.0, 10, 4};
  CHECK(sample_spatial({"constant", {0.0}, {}}, g).isZero(0.0));

  const SpatialField ind = sample_spatial({"indicator", {0.4, 0.6}, {}}, g);
  for (int j = 0; j <= 10; ++j) CHECK(ind(j) == ((j >= 4 && j <= 6) ? 1.0 : 0.0));

  CHECK(evaluate_preset("sine", {1.0, 2.0}, 0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(evaluate_preset("gaussian", {3.0, 0.2, 0.1}, 0.2, 1.0) == 3.0);
  CHECK(evaluate_preset("gaussian", {1.0, 0.0, 1.0}, 1.0, 1.0) == doctest::Approx(std::exp(-0.5)));
  CHECK_THROWS_AS(evaluate_preset("sawtooth", {}, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(evaluate_preset("sine", {1.0}, 0.0, 1.0), ConfigError);
}

TEST_CASE("presets are deterministic") {
  const GridSpec g{1.0, 2.0, 16, 8};
  const Preset p{"gaussian", {1.0, 0.3, 0.05}, {}};
  CHECK(sample_spatial(p, g) == sample_spatial(p, g));
  CHECK(sample_time_series(p, g).size() == 9);
  const SpaceTimeField st = sample_space_time(p, g);
  CHECK(st.rows() == 9);
  for (int n = 1; n < st.rows(); ++n) CHECK(st.row(n) == st.row(0));
}

TEST_CASE("tabulated preset reads a CSV with header") {
  const auto dir = std::filesystem::temp_directory_path() / "nashpde_tabulated";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "y0.csv");
    out << "value\n";
    for (int j = 0; j <= 4; ++j) out << j * 0.25 << "\n";
  }
  const GridSpec g{1.0, 1.0, 4, 2};
  const SpatialField y0 = sample_spatial({"tabulated", {}, dir / "y0.csv"}, g);
  CHECK(y0(4) == 1.0);
  const GridSpec wrong{1.0, 1.0, 8, 2};
  CHECK_THROWS_AS(sample_spatial({"tabulated", {}, dir / "y0.csv"}, wrong), ConfigError);
}

TEST_CASE("inner product of ones measures omega times T") {
  const GridSpec g{1.0, 1.0, 10, 5};
  ProblemSpec s = make_zero_problem(g, {{0.2, 0.4}});
  validate_problem(s);
  ControlBundle ones(s);
  ones[0].setOnes();
  CHECK(inner_product(s, ones, ones) == doctest::Approx(0.2).epsilon(1e-14));
  ControlBundle zero(s);
  CHECK(inner_product(s, zero, ones) == 0.0);
}

TEST_CASE("inner product is symmetric and positive") {
  ProblemSpec s = load("demo_small.json");
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ControlBundle u = random_bundle(s, rng);
    const ControlBundle v = random_bundle(s, rng);
    CHECK(inner_product(s, u, v) == doctest::Approx(inner_product(s, v, u)).epsilon(1e-15));
    CHECK(inner_product(s, u, u) > 0.0);
    CHECK(norm(s, u) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("control weights and characteristic") {
  const GridSpec g{1.0, 1.0, 10, 2};
  ProblemSpec s = make_zero_problem(g, {{0.2, 0.5}});
  validate_problem(s);
  const Vector w = control_weights(g, s.players[0]);
  const Vector chi = control_characteristic(g, s.players[0]);
  REQUIRE(w.size() == 4);
  CHECK(w(0) == doctest::Approx(0.05));
  CHECK(w(1) == doctest::Approx(0.1));
  CHECK(w(3) == doctest::Approx(0.05));
  CHECK(chi(0) == 0.5);
  CHECK(chi(1) == 1.0);
  CHECK(chi(3) == 0.5);
}

TEST_CASE("restrict and extend") {
  ProblemSpec s = load("demo_small.json");
  const SpaceTimeField zero = SpaceTimeField::Zero(s.grid.num_levels(), s.grid.num_nodes());
  CHECK(restrict_to_omega(s, zero, 1).isZero(0.0));

  const Matrix ones = Matrix::Ones(s.grid.nt, s.players[0].num_nodes());
  const SpaceTimeField e = extend_by_zero(s, ones, 0);
  CHECK(e.row(0).isZero(0.0));
  CHECK(e(3, s.players[0].last_node + 1) == 0.0);
  CHECK(e(3, 0) == 0.0);
  CHECK(e(3, s.players[0].first_node) == 1.0);

  std::mt19937_64 rng(3);
  const ControlBundle v = random_bundle(s, rng);
  for (int i = 0; i < 2; ++i) CHECK(restrict_to_omega(s, extend_by_zero(s, v[i], i), i) == v[i]);
}

TEST_CASE("bundle arithmetic and flattening") {
  ProblemSpec s = load("demo_small.json");
  std::mt19937_64 rng(11);
  const ControlBundle u = random_bundle(s, rng);
  const ControlBundle v = random_bundle(s, rng);
  const ControlBundle w = u + 2.0 * v - u;
  CHECK((w.flatten() - 2.0 * v.flatten()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(ControlBundle::unflatten(s, u.flatten()).flatten() == u.flatten());
  CHECK(u.size() == s.control_dimension());
  CHECK(u.flatten()(0) == u[0](0, 0));
  CHECK(u.flatten()(1) == u[0](0, 1));
  const ControlBundle d = random_direction(s, 1, rng);
  CHECK(d[0].isZero(0.0));
  CHECK(norm(s, d) == doctest::Approx(1.0));
  CHECK(isolate(u, 1)[0].isZero(0.0));
  CHECK(isolate(u, 1)[1] == u[1]);
}
