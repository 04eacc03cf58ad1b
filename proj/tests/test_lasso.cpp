#include <doctest.h>

#include <random>

#include "cpreg/lasso.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cpreg;
using namespace cpreg::testing;

namespace {

LassoProblem make_problem(std::mt19937_64& rng, Index n, Index p, double lambda_frac) {
  const MatrixXd X = random_matrix(rng, n, p);
  const VectorXd coef = sparse_coefficients(rng, p, std::min<Index>(p, 3));
  const VectorXd y = X * coef + 0.5 * random_vector(rng, n);
  const double top = lasso_lambda_max(X, y, static_cast<double>(n));
  return LassoProblem{X, y, n, lambda_frac * top};
}

}  // namespace

TEST_CASE("lambda at or above lambda_max gives the zero vector exactly") {
  std::mt19937_64 rng(101);
  LassoProblem problem = make_problem(rng, 25, 8, 1.0);
  const LassoSolution at_max = fit_lasso(problem);
  CHECK(at_max.converged);
  CHECK(at_max.beta.isZero(0.0));

  problem.lambda *= 1.5;
  CHECK(fit_lasso(problem).beta.isZero(0.0));
}

TEST_CASE("unpenalized scalar problem recovers the least squares slope") {
  std::mt19937_64 rng(103);
  const MatrixXd X = random_matrix(rng, 20, 1);
  const VectorXd y = 1.7 * X.col(0) + 0.1 * random_vector(rng, 20);
  const LassoProblem problem{X, y, 20, 0.0};
  const LassoSolution solution = fit_lasso(problem);
  const double ols = X.col(0).dot(y) / X.col(0).squaredNorm();
  CHECK(solution.beta[0] == doctest::Approx(ols).epsilon(1e-10));
}

TEST_CASE("objective agrees with the proximal gradient oracle") {
  std::mt19937_64 rng(107);
  const LassoProblem problem = make_problem(rng, 30, 10, 0.1);
  const LassoSolution cd = fit_lasso(problem);
  REQUIRE(cd.converged);

  const ProximalResult oracle = proximal_gradient_lasso(
      problem.X_sub, problem.y_sub, static_cast<double>(problem.n_full), problem.lambda);
  const double cd_objective = lasso_objective(problem.X_sub, problem.y_sub,
                                              static_cast<double>(problem.n_full),
                                              problem.lambda, cd.beta);
  CHECK(cd_objective == doctest::Approx(oracle.objective).epsilon(1e-8));
}

TEST_CASE("converged solutions satisfy the KKT bound") {
  std::mt19937_64 rng(109);
  for (int instance = 0; instance < 20; ++instance) {
    const Index n = 10 + static_cast<Index>(rng() % 40);
    const Index p = 2 + static_cast<Index>(rng() % 20);
    LassoProblem problem = make_problem(rng, n, p, 0.02 + 0.2 * (instance % 5));
    const LassoSolution solution = fit_lasso(problem);
    CHECK(solution.converged);
    CHECK(solution.kkt_residual <= 1e-6);
    // recompute independently of the solver's own report
    CHECK(kkt_residual(problem.X_sub, problem.y_sub, static_cast<double>(problem.n_full),
                       problem.lambda, solution.beta) <= 1e-6);
  }
}

TEST_CASE("partial-sample normalizer matches the partition objective") {
  // m rows, normalizer n_full > m: lambda_max must still zero the fit
  std::mt19937_64 rng(113);
  const MatrixXd X = random_matrix(rng, 15, 6);
  const VectorXd y = random_vector(rng, 15);
  const double top = lasso_lambda_max(X, y, 40.0);
  const LassoSolution solution = fit_lasso(LassoProblem{X, y, 40, top});
  CHECK(solution.beta.isZero(0.0));
}

TEST_CASE("objective never increases across sweeps") {
  std::mt19937_64 rng(127);
  for (int instance = 0; instance < 5; ++instance) {
    const LassoProblem problem = make_problem(rng, 40, 15, 0.05);
    std::vector<double> trace;
    LassoOptions options;
    options.objective_trace = &trace;
    fit_lasso(problem, nullptr, options);
    REQUIRE(trace.size() >= 2);
    for (size_t k = 1; k < trace.size(); ++k) {
      CHECK(trace[k] <= trace[k - 1] + 1e-12 * (1.0 + std::abs(trace[k - 1])));
    }
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  std::mt19937_64 rng(131);
  const LassoProblem problem = make_problem(rng, 50, 30, 0.001);
  LassoOptions options;
  options.max_sweeps = 1;
  const LassoSolution solution = fit_lasso(problem, nullptr, options);
  CHECK_FALSE(solution.converged);
  CHECK(solution.iterations == 1);
}

TEST_CASE("lambda path endpoints and spacing") {
  std::mt19937_64 rng(137);
  const MatrixXd X = random_matrix(rng, 10, 4);
  const VectorXd y = random_vector(rng, 10);
  const double top = lasso_lambda_max(X, y, 10.0);

  SUBCASE("two points") {
    const VectorXd path = lambda_path(X, y, 10.0, 2, 0.5);
    CHECK(path[0] == top);
    CHECK(path[1] == doctest::Approx(0.5 * top).epsilon(1e-15));
  }
  SUBCASE("hundred points, geometric") {
    const VectorXd path = lambda_path(X, y, 10.0, 100, 1e-3);
    CHECK(path[0] == top);
    CHECK(path[99] == doctest::Approx(1e-3 * top).epsilon(1e-15));
    const double ratio = path[1] / path[0];
    for (Index k = 1; k < 100; ++k) {
      CHECK(path[k] < path[k - 1]);  // strictly decreasing
      CHECK(path[k] / path[k - 1] == doctest::Approx(ratio).epsilon(1e-10));
    }
  }
  SUBCASE("all-zero design errors") {
    CHECK_THROWS_AS(lambda_path(MatrixXd::Zero(10, 4), y, 10.0, 10, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("sparsity is monotone along the path") {
  std::mt19937_64 rng(139);
  for (int instance = 0; instance < 5; ++instance) {
    const Index n = 40, p = 12;
    const MatrixXd X = random_matrix(rng, n, p);
    const VectorXd y = X * sparse_coefficients(rng, p, 4) + 0.3 * random_vector(rng, n);
    const VectorXd path = lambda_path(X, y, static_cast<double>(n), 40, 1e-2);

    VectorXd beta = VectorXd::Zero(p);
    int previous_nnz = 0;
    VectorXd previous_beta = beta;
    for (Index k = 0; k < path.size(); ++k) {
      coordinate_descent(X, y, static_cast<double>(n), path[k], beta);
      int nnz = 0;
      for (Index j = 0; j < p; ++j) {
        if (std::abs(beta[j]) > 1e-8) ++nnz;
      }
      if (nnz < previous_nnz) {
        // a coefficient may only leave the support if it was already
        // within tolerance of the active-set threshold
        for (Index j = 0; j < p; ++j) {
          if (std::abs(previous_beta[j]) > 1e-8 && std::abs(beta[j]) <= 1e-8) {
            CHECK(std::abs(previous_beta[j]) < 1e-6);
          }
        }
      }
      previous_nnz = nnz;
      previous_beta = beta;
    }
  }
}

TEST_CASE("joint block-diagonal problem separates into the two partition fits") {
  std::mt19937_64 rng(149);
  const Index n = 30, p = 5, m_low = 12;
  const MatrixXd X = random_matrix(rng, n, p);
  const VectorXd y = random_vector(rng, n);

  const MatrixXd X_low = X.topRows(m_low);
  const MatrixXd X_high = X.bottomRows(n - m_low);
  const VectorXd y_low = y.head(m_low);
  const VectorXd y_high = y.tail(n - m_low);

  const double lambda =
      0.3 * std::max(lasso_lambda_max(X_low, y_low, static_cast<double>(n)),
                     lasso_lambda_max(X_high, y_high, static_cast<double>(n)));

  MatrixXd X_joint = MatrixXd::Zero(n, 2 * p);
  X_joint.topLeftCorner(m_low, p) = X_low;
  X_joint.bottomRightCorner(n - m_low, p) = X_high;
  const LassoSolution joint = fit_lasso(LassoProblem{X_joint, y, n, lambda});
  const LassoSolution low = fit_lasso(LassoProblem{X_low, y_low, n, lambda});
  const LassoSolution high = fit_lasso(LassoProblem{X_high, y_high, n, lambda});

  REQUIRE(joint.converged);
  for (Index j = 0; j < p; ++j) {
    CHECK(joint.beta[j] == doctest::Approx(low.beta[j]).epsilon(1e-8));
    CHECK(joint.beta[p + j] == doctest::Approx(high.beta[j]).epsilon(1e-8));
  }
}

TEST_CASE("cross validation") {
  std::mt19937_64 rng(151);
  const Index n = 60, p = 8;
  const MatrixXd X = random_matrix(rng, n, p);
  const VectorXd y = X * sparse_coefficients(rng, p, 3) + 0.5 * random_vector(rng, n);
  const VectorXd path = lambda_path(X, y, static_cast<double>(n), 30, 1e-2);

  SUBCASE("single-point path returns that lambda") {
    VectorXd one(1);
    one << path[5];
    const CrossValidationResult cv = cross_validate_lambda(X, y, n, 5, one, 9);
    CHECK(cv.best_lambda == path[5]);
  }
  SUBCASE("deterministic given the seed") {
    const CrossValidationResult a = cross_validate_lambda(X, y, n, 5, path, 42);
    const CrossValidationResult b = cross_validate_lambda(X, y, n, 5, path, 42);
    CHECK(a.best_lambda == b.best_lambda);
    CHECK(a.cv_errors == b.cv_errors);
    const CrossValidationResult c = cross_validate_lambda(X, y, n, 5, path, 43);
    CHECK(c.cv_errors != a.cv_errors);  // folds actually move with the seed
  }
  SUBCASE("fewer rows than folds errors") {
    CHECK_THROWS_AS(
        cross_validate_lambda(X.topRows(3), y.head(3), 3, 5, path, 1),
        std::invalid_argument);
  }
}

TEST_CASE("pure-noise response selects heavy shrinkage") {
  int top_decile_hits = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const Index n = 150, p = 10;
    const MatrixXd X = random_matrix(rng, n, p);
    const VectorXd y = random_vector(rng, n);  // independent of X
    const VectorXd path = lambda_path(X, y, static_cast<double>(n), 100, 1e-3);
    const CrossValidationResult cv =
        cross_validate_lambda(X, y, n, 5, path, static_cast<std::uint64_t>(seed));
    if (cv.best_index < 10) ++top_decile_hits;
  }
  CHECK(top_decile_hits > 10);
}

TEST_CASE("fold assignment is a balanced partition") {
  const std::vector<int> folds = assign_folds(23, 5, 7);
  std::vector<int> counts(5, 0);
  for (int f : folds) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    counts[static_cast<size_t>(f)]++;
  }
  for (int c : counts) CHECK(c >= 4);
}
