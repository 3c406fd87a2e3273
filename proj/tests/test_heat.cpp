#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nashpde/heat.hpp"
#include "reference.hpp"
#include "support.hpp"

#include <cmath>

using namespace nashpde;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// y = sin(t + 1) (x^2 + 1): quadratic in x, so the spatial stencil and the ghost node are
// exact and only the time discretization contributes.
double exact(double x, double t) { return std::sin(t + 1.0) * (x * x + 1.0); }

double manufactured_error(int nx, int nt) {
  const GridSpec g{1.0, 1.0, nx, nt};
  SpaceTimeField f(g.num_levels(), g.num_nodes());
  TimeSeries g1(g.num_levels());
  TimeSeries g2(g.num_levels());
  SpatialField y0(g.num_nodes());
  for (int n = 0; n <= nt; ++n) {
    const double t = g.level(n);
    g1(n) = std::sin(t + 1.0);
    g2(n) = 2.0 * g.length * std::sin(t + 1.0);
    for (int j = 0; j <= nx; ++j) {
      const double x = g.node(j);
      f(n, j) = std::cos(t + 1.0) * (x * x + 1.0) - 2.0 * std::sin(t + 1.0);
    }
  }
  for (int j = 0; j <= nx; ++j) y0(j) = exact(g.node(j), 0.0);
  const StateSolution y = forward_sweep(g, y0, f, g1, g2);
  const Vector w = reference::trapezoid(g);
  double sum = 0.0;
  for (int n = 1; n <= nt; ++n) {
    for (int j = 0; j <= nx; ++j) {
      const double e = y.y(n, j) - exact(g.node(j), g.level(n));
      sum += g.dt() * w(j) * e * e;
    }
  }
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("zero data gives a zero step") {
  const GridSpec g{1.0, 1.0, 8, 4};
  const SpatialField z = SpatialField::Zero(9);
  CHECK(step(z, z, 0.0, 0.0, g).isZero(0.0));
}

TEST_CASE("constant field is a steady state") {
  const GridSpec g{1.0, 0.5, 8, 4};
  const SpatialField one = SpatialField::Ones(9);
  const SpatialField y = step(one, SpatialField::Zero(9), 1.0, 0.0, g);
  CHECK(max_abs(y - one) < 1e-14);
}

TEST_CASE("single step against a hand-assembled system") {
  const GridSpec g{1.0, 0.1, 4, 1};
  const double r = g.dt() / (g.h() * g.h());
  Matrix M{{1 + 2 * r, -r, 0, 0}, {-r, 1 + 2 * r, -r, 0}, {0, -r, 1 + 2 * r, -r}, {0, 0, -2 * r, 1 + 2 * r}};
  SpatialField forcing = SpatialField::Zero(5);
  forcing(2) = 1.0;
  const Vector expected = M.lu().solve(g.dt() * forcing.tail(4));
  const SpatialField y = step(SpatialField::Zero(5), forcing, 0.0, 0.0, g);
  CHECK(y(0) == 0.0);
  CHECK(max_abs(y.tail(4) - expected) < 1e-15);

  const ImplicitEulerMatrix matrix(g);
  CHECK(max_abs(matrix.apply(expected) - g.dt() * forcing.tail(4)) < 1e-15);
}

TEST_CASE("boundary data enter the step") {
  const GridSpec g{2.0, 0.3, 6, 3};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  SpatialField prev(7), forcing(7);
  for (int j = 0; j < 7; ++j) {
    prev(j) = normal(rng);
    forcing(j) = normal(rng);
  }
  ProblemSpec s = make_zero_problem(g, {{g.node(2), g.node(4)}});
  s.y0 = prev;
  s.f.row(1) = forcing.transpose();
  s.g1(1) = 0.7;
  s.g2(1) = -1.3;
  validate_problem(s);
  const ControlBundle zero(s);
  const Matrix ref = reference::state(s, zero);
  const SpatialField y = step(prev, forcing, 0.7, -1.3, g);
  CHECK(max_abs(y.transpose() - ref.row(1)) < 1e-13);
}

TEST_CASE("forward sweep matches the global space-time system") {
  ProblemSpec s = load_config(testing_support::config_path("demo_small.json"));
  testing_support::randomize(s, 17, true);
  std::mt19937_64 rng(2);
  const ControlBundle v = random_bundle(s, rng);
  const Matrix ref = reference::state(s, v);
  CHECK(max_abs(solve_state(s, v).y - ref) < 1e-12 * (1.0 + max_abs(ref)));
}

TEST_CASE("state decomposition and linearity") {
  ProblemSpec s = testing_support::load("demo_small.json");
  testing_support::randomize(s, 23, false);
  std::mt19937_64 rng(9);
  const ControlBundle v = random_bundle(s, rng);
  const ControlBundle zero(s);

  CHECK(solve_state(s, zero).y == solve_state_free(s).y);
  CHECK(solve_state_homogeneous(s, zero).y.isZero(0.0));

  const Matrix full = solve_state(s, v).y;
  const Matrix split = solve_state_homogeneous(s, v).y + solve_state_free(s).y;
  CHECK(max_abs(full - split) < 1e-13 * (1.0 + max_abs(full)));

  const Matrix ytilde = solve_state_homogeneous(s, v).y;
  CHECK(max_abs(solve_state_homogeneous(s, -3.7 * v).y + 3.7 * ytilde) < 1e-13);

  const Matrix sum = solve_state_homogeneous(s, isolate(v, 0)).y + solve_state_homogeneous(s, isolate(v, 1)).y;
  CHECK(max_abs(sum - ytilde) < 1e-14);
}

TEST_CASE("zero data give a zero state") {
  ProblemSpec s = testing_support::load("all_zero.json");
  CHECK(solve_state_free(s).y.isZero(0.0));
  CHECK(solve_state(s, ControlBundle(s)).y.isZero(0.0));
}

TEST_CASE("constant data are preserved") {
  ProblemSpec s = testing_support::load("all_zero.json");
  s.y0.setConstant(2.5);
  s.g1.setConstant(2.5);
  CHECK(max_abs(solve_state_free(s).y.array() - 2.5) < 1e-13);
}

TEST_CASE("discrete maximum principle") {
  ProblemSpec s = testing_support::load("all_zero.json");
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    s.y0 = s.y0.unaryExpr([&](double) { return uniform(rng); });
    s.g1 = s.g1.unaryExpr([&](double) { return uniform(rng); });
    const double lo = std::min(s.y0.minCoeff(), s.g1.minCoeff());
    const double hi = std::max(s.y0.maxCoeff(), s.g1.maxCoeff());
    const Matrix y = solve_state_free(s).y;
    CHECK(y.minCoeff() >= lo - 1e-14);
    CHECK(y.maxCoeff() <= hi + 1e-14);
  }
}

TEST_CASE("first order in time on a manufactured solution") {
  const double e1 = manufactured_error(20, 10);
  const double e2 = manufactured_error(20, 20);
  const double e3 = manufactured_error(20, 40);
  CHECK(e1 / e2 >= 1.6);
  CHECK(e1 / e2 <= 2.4);
  CHECK(e2 / e3 >= 1.6);
  CHECK(e2 / e3 <= 2.4);
}

TEST_CASE("free state at T is stable under refinement") {
  const ProblemSpec coarse = testing_support::load("demo.json");
  const ProblemSpec fine = testing_support::demo_on(100, 100);
  const SpatialField a = solve_state_free(coarse).y.row(50).transpose();
  const SpatialField b = solve_state_free(fine).y.row(100).transpose();
  SpatialField b_on_coarse(51);
  for (int j = 0; j <= 50; ++j) b_on_coarse(j) = b(2 * j);
  CHECK((a - b_on_coarse).norm() / b_on_coarse.norm() < 5e-2);
}

TEST_CASE("control load uses half weight at the ends of omega") {
  ProblemSpec s = testing_support::load("demo_small.json");
  ControlBundle v(s);
  v[0].setOnes();
  const SpaceTimeField load = control_load(s, v);
  const PlayerSpec& p = s.players[0];
  CHECK(load(1, p.first_node) == 0.5);
  CHECK(load(1, p.first_node + 1) == 1.0);
  CHECK(load(1, p.last_node) == 0.5);
  CHECK(load.row(0).isZero(0.0));
}
