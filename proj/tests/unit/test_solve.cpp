#include "mscut/solve.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace mscut;

namespace {

// 1D Dirichlet Laplacian stencil [-1 2 -1]; eigenvalues 2 - 2 cos(k pi/(n+1)).
SparseMatrix laplacian(int n) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

double laplacian_kappa(int n) {
  const double lo = 2 - 2 * std::cos(std::numbers::pi / (n + 1));
  const double hi = 2 - 2 * std::cos(n * std::numbers::pi / (n + 1));
  return hi / lo;
}

} // namespace

TEST_CASE("direct and iterative paths agree with a dense solve") {
  const int n = 60;
  SparseMatrix a = laplacian(n);
  a.diagonal().array() += 0.01;
  oracle::Gen gen(61);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i)
    b[i] = gen.uniform(-1, 1);
  const Eigen::VectorXd ref = Eigen::MatrixXd(a).ldlt().solve(b);

  const SolveReport direct = solve_spd(a, b);
  CHECK(direct.method == "cholesky");
  CHECK((direct.solution - ref).norm() <= 1e-12 * ref.norm());
  CHECK(direct.residual <= 1e-13);

  SolveOptions iterative;
  iterative.direct_limit = 0;
  const SolveReport cg = solve_spd(a, b, iterative);
  CHECK(cg.method == "pcg");
  CHECK(cg.iterations > 0);
  CHECK((cg.solution - ref).norm() <= 1e-8 * ref.norm());
}

TEST_CASE("indefinite and mismatched systems are rejected") {
  SparseMatrix a = laplacian(5);
  a.coeffRef(2, 2) = -3.0;
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(5);
  try {
    solve_spd(a, b);
    FAIL("expected a solver error");
  } catch (const Error &e) {
    CHECK(e.category() == ErrorCategory::Solver);
  }
  CHECK_THROWS_AS(solve_spd(laplacian(4), b), Error);
  CHECK_THROWS_AS(cond_estimate(a), Error);
  ConditionOptions lanczos;
  lanczos.dense_limit = 0;
  CHECK_THROWS_AS(cond_estimate(a, lanczos), Error);
}

TEST_CASE("condition number: dense and Lanczos estimates match the closed form") {
  for (int n : {10, 80, 300}) {
    const SparseMatrix a = laplacian(n);
    const double exact = laplacian_kappa(n);
    CHECK(cond_estimate(a) == doctest::Approx(exact).epsilon(1e-10));
    ConditionOptions lanczos;
    lanczos.dense_limit = 0;
    CHECK(cond_estimate(a, lanczos) == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("Lanczos handles a clustered spectrum") {
  oracle::Gen gen(62);
  const int n = 400;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i)
    t.emplace_back(i, i, i < n - 3 ? gen.uniform(1.0, 1.001) : 50.0 + i);
  t.emplace_back(0, 0, -0.999); // one small outlier at ~1e-3
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  const ExtremeEigenvalues dense = extreme_eigenvalues(a);
  ConditionOptions lanczos;
  lanczos.dense_limit = 0;
  const ExtremeEigenvalues approx = extreme_eigenvalues(a, lanczos);
  CHECK(approx.max == doctest::Approx(dense.max).epsilon(1e-8));
  CHECK(approx.min == doctest::Approx(dense.min).epsilon(1e-8));
}
