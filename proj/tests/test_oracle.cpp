#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nashpde/oracle.hpp"
#include "reference.hpp"
#include "support.hpp"

using namespace nashpde;
using testing_support::load;

TEST_CASE("dense assembly uses one application per column") {
  GridSpec g{1.0, 1.0, 6, 4};
  ProblemSpec s = make_zero_problem(g, {{1.0 / 6, 2.0 / 6}, {4.0 / 6, 5.0 / 6}});
  validate_problem(s);
  testing_support::randomize(s, 1, true);
  const NashOperator op(s);
  const DenseOperator d = assemble_dense(op);
  CHECK(d.dimension() == 16);
  CHECK(op.counters().applications == 16);
  CHECK(d.index.size() == 16);
  CHECK(d.index[0].player == 0);
  CHECK(d.index[0].step == 1);
  CHECK(d.index[0].node == 1);
  CHECK(d.index[15].player == 1);
  CHECK(d.index[15].step == 4);
  CHECK(d.index[15].node == 5);
}

TEST_CASE("dense matrix reproduces the matrix-free operator") {
  const ProblemSpec s = load("general_small.json");
  const NashOperator op(s);
  const DenseOperator d = assemble_dense(op);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const ControlBundle v = random_bundle(s, rng);
    const Vector dense = d.A * v.flatten();
    const Vector free = apply_A(op, v).flatten();
    CHECK((dense - free).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + free.cwiseAbs().maxCoeff()));
  }
  CHECK((d.b - compute_b(op).flatten()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d.weights - reference::control_gram(s)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("unobserved problem is a diagonal of alphas") {
  const ProblemSpec s = load("zero_weights.json");
  const DenseOperator d = assemble_dense(NashOperator(s));
  Vector alphas(d.dimension());
  for (Eigen::Index k = 0; k < d.dimension(); ++k) alphas(k) = s.players[static_cast<std::size_t>(d.index[static_cast<std::size_t>(k)].player)].alpha;
  CHECK(d.A == Matrix(alphas.asDiagonal()));
  CHECK(symmetry_defect(d) == 0.0);
  CHECK(min_eigen_sym(d) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("direct solve of the zero and diagonal problems") {
  const ProblemSpec z = load("all_zero.json");
  CHECK(direct_solve(assemble_dense(NashOperator(z))).flatten().isZero(0.0));

  const ProblemSpec s = load("zero_weights.json");
  DenseOperator d = assemble_dense(NashOperator(s));
  std::mt19937_64 rng(3);
  d.b = random_bundle(s, rng).flatten();
  const Vector u = direct_solve(d).flatten();
  for (Eigen::Index k = 0; k < d.dimension(); ++k) CHECK(u(k) == doctest::Approx(d.b(k) / d.A(k, k)).epsilon(1e-15));
}

TEST_CASE("direct solve agrees with conjugate gradients") {
  const ProblemSpec s = load("demo_small.json");
  const NashOperator op(s);
  const ControlBundle direct = direct_solve(assemble_dense(op));
  const ControlBundle cg = solve_cg(op).u;
  CHECK(norm(s, direct - cg) / norm(s, direct) < 1e-8);
}

TEST_CASE("symmetric mode is symmetric in the weighted inner product") {
  const ProblemSpec s = load("demo_small.json");
  CHECK(symmetry_defect(assemble_dense(NashOperator(s))) < 1e-12);
}

TEST_CASE("distinct observation masks break symmetry") {
  const ProblemSpec s = load("general_small.json");
  CHECK(symmetry_defect(assemble_dense(NashOperator(s))) > 1e-6);
}

TEST_CASE("smallest symmetrized eigenvalue respects the coercivity bound") {
  const ProblemSpec s = load("demo_small.json");
  CHECK(min_eigen_sym(assemble_dense(NashOperator(s))) >= 0.05 - 1e-10);
}

TEST_CASE("tiny alpha with crossed observation loses ellipticity") {
  // The crossed-mask data of general_tiny_alpha.json on the small oracle grid.
  ProblemSpec s = load("general_small.json");
  for (auto& p : s.players) p.alpha = 1e-9;
  std::swap(s.players[0].rho, s.players[1].rho);
  validate_problem(s);
  const NashOperator op(s);
  CHECK(min_eigen_sym(assemble_dense(op)) < 0.0);
  CHECK_THROWS_AS(solve_cg(op), std::invalid_argument);
}

TEST_CASE("dimension cap") {
  const ProblemSpec s = load("oversized.json");
  CHECK_THROWS_AS(assemble_dense(NashOperator(s)), DimensionCapError);
  const ProblemSpec small = load("demo_small.json");
  CHECK_THROWS_AS(assemble_dense(NashOperator(small), 10), DimensionCapError);
}

TEST_CASE("singular operator is reported") {
  const ProblemSpec s = load("zero_weights.json");
  DenseOperator d = assemble_dense(NashOperator(s));
  d.A.row(3).setZero();
  CHECK_THROWS_AS(direct_solve(d), SingularOperatorError);
}

TEST_CASE("eigenvalue matches the dense reference") {
  const ProblemSpec s = load("general_small.json");
  const DenseOperator d = assemble_dense(NashOperator(s));
  const reference::DenseGame ref = reference::game(s);
  const Vector r = ref.gram.cwiseSqrt().cwiseInverse();
  const Matrix GA = ref.gram.asDiagonal() * ref.A;
  const Matrix scaled = r.asDiagonal() * (0.5 * (GA + GA.transpose())) * r.asDiagonal();
  const double expected = Eigen::SelfAdjointEigenSolver<Matrix>(scaled).eigenvalues()(0);
  CHECK(min_eigen_sym(d) == doctest::Approx(expected).epsilon(1e-10));
}
