#pragma once

#include <cstdint>
#include <vector>

#include "cpreg/types.hpp"

namespace cpreg {

/// One l1-penalized least squares problem. The objective is
///   (1/n_full) * ||y_sub - X_sub beta||_2^2 + lambda * ||beta||_1,
/// where n_full may exceed the number of rows in X_sub: partition fits
/// normalize by the full sample size, matching the change point loss.
struct LassoProblem {
  MatrixXd X_sub;
  VectorXd y_sub;
  Index n_full = 0;
  double lambda = 0.0;
};

struct LassoSolution {
  VectorXd beta;
  int iterations = 0;       // coordinate descent sweeps
  double kkt_residual = 0.0;
  bool converged = false;
};

struct LassoOptions {
  int max_sweeps = 100000;
  double coef_tol = 1e-9;  // sweep stops when max coefficient change < coef_tol*(1+||beta||_inf)
  double kkt_tol = 1e-6;
  std::vector<double>* objective_trace = nullptr;  // per-sweep objective, for diagnostics
};

double lasso_objective(const MatrixXd& X, const VectorXd& y, double normalizer,
                       double lambda, const VectorXd& beta);

/// Smallest lambda at which the zero vector is optimal:
/// max_j |(2/normalizer) x_j' y|.
double lasso_lambda_max(const MatrixXd& X_sub, const VectorXd& y_sub, double normalizer);

/// Cyclic coordinate descent with soft thresholding and an active-set
/// strategy: after a full sweep, only nonzero coordinates are iterated
/// until convergence, then one full sweep confirms the KKT conditions.
/// beta is the warm start and is updated in place. normalizer plays the
/// role of n_full and may be fractional (cross-validation scales it by
/// the training fraction to keep lambda on a comparable scale).
LassoSolution coordinate_descent(const MatrixXd& X, const VectorXd& y, double normalizer,
                                 double lambda, VectorXd& beta,
                                 const LassoOptions& options = {});

LassoSolution fit_lasso(const LassoProblem& problem, const VectorXd* warm_start = nullptr,
                        const LassoOptions& options = {});

/// Log-spaced descending grid from lambda_max down to ratio*lambda_max.
VectorXd lambda_path(const MatrixXd& X_sub, const VectorXd& y_sub, double normalizer,
                     int n_points, double ratio);

/// Same grid from an explicitly supplied top value.
VectorXd lambda_path_from_top(double lambda_top, int n_points, double ratio);

/// Max KKT violation of beta for the stated objective; zero at an optimum.
double kkt_residual(const MatrixXd& X, const VectorXd& y, double normalizer,
                    double lambda, const VectorXd& beta);

struct CrossValidationResult {
  double best_lambda = 0.0;
  Index best_index = 0;
  VectorXd cv_errors;  // mean held-out squared prediction error per path point
};

/// K-fold cross validation over a descending lambda path. Folds are
/// contiguous blocks of a seeded uniform random permutation of the rows;
/// fits along the path are warm started. Deterministic given the seed.
CrossValidationResult cross_validate_lambda(const MatrixXd& X_sub, const VectorXd& y_sub,
                                            Index n_full, int k_folds, const VectorXd& path,
                                            std::uint64_t seed,
                                            SolveCounters* counters = nullptr);

/// Fold assignment used by cross_validate_lambda: fold_of[i] in [0, k).
std::vector<int> assign_folds(Index m, int k_folds, std::uint64_t seed);

}  // namespace cpreg
