#include "cpreg/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cpreg {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// One cyclic sweep over the coordinates listed in `coords`.
// Returns the max absolute coefficient change.
double sweep(const MatrixXd& X, double lambda, const VectorXd& col_scale, VectorXd& beta,
             VectorXd& residual, const std::vector<Index>& coords, double inv_norm) {
  double max_change = 0.0;
  for (Index j : coords) {
    const double a = col_scale[j];
    if (a == 0.0) {
      if (beta[j] != 0.0) {
        residual += X.col(j) * beta[j];
        max_change = std::max(max_change, std::abs(beta[j]));
        beta[j] = 0.0;
      }
      continue;
    }
    const double grad = 2.0 * inv_norm * X.col(j).dot(residual);
    const double rho = grad + a * beta[j];
    const double updated = soft_threshold(rho, lambda) / a;
    const double change = updated - beta[j];
    if (change != 0.0) {
      residual -= X.col(j) * change;
      beta[j] = updated;
      max_change = std::max(max_change, std::abs(change));
    }
  }
  return max_change;
}

}  // namespace

double lasso_objective(const MatrixXd& X, const VectorXd& y, double normalizer,
                       double lambda, const VectorXd& beta) {
  return (y - X * beta).squaredNorm() / normalizer + lambda * beta.lpNorm<1>();
}

double lasso_lambda_max(const MatrixXd& X_sub, const VectorXd& y_sub, double normalizer) {
  return (2.0 / normalizer) * (X_sub.transpose() * y_sub).cwiseAbs().maxCoeff();
}

double kkt_residual(const MatrixXd& X, const VectorXd& y, double normalizer,
                    double lambda, const VectorXd& beta) {
  const VectorXd grad = (2.0 / normalizer) * (X.transpose() * (y - X * beta));
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    double violation;
    if (beta[j] > 0.0) {
      violation = std::abs(grad[j] - lambda);
    } else if (beta[j] < 0.0) {
      violation = std::abs(grad[j] + lambda);
    } else {
      violation = std::max(0.0, std::abs(grad[j]) - lambda);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

LassoSolution coordinate_descent(const MatrixXd& X, const VectorXd& y, double normalizer,
                                 double lambda, VectorXd& beta, const LassoOptions& options) {
  const Index p = X.cols();
  if (beta.size() != p) {
    throw std::invalid_argument("coordinate_descent: warm start length does not match p");
  }
  if (lambda < 0.0 || normalizer <= 0.0) {
    throw std::invalid_argument("coordinate_descent: lambda must be >= 0 and normalizer > 0");
  }

  const double inv_norm = 1.0 / normalizer;
  VectorXd col_scale(p);
  for (Index j = 0; j < p; ++j) {
    col_scale[j] = 2.0 * inv_norm * X.col(j).squaredNorm();
  }

  std::vector<Index> all_coords(static_cast<size_t>(p));
  std::iota(all_coords.begin(), all_coords.end(), Index{0});

  VectorXd residual = y - X * beta;
  LassoSolution solution;
  int sweeps = 0;
  bool converged = false;

  auto record = [&]() {
    if (options.objective_trace != nullptr) {
      options.objective_trace->push_back(
          residual.squaredNorm() * inv_norm + lambda * beta.lpNorm<1>());
    }
  };

  while (sweeps < options.max_sweeps) {
    const double full_change = sweep(X, lambda, col_scale, beta, residual, all_coords, inv_norm);
    ++sweeps;
    record();
    if (full_change < options.coef_tol * (1.0 + beta.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }

    std::vector<Index> active;
    active.reserve(static_cast<size_t>(p));
    for (Index j = 0; j < p; ++j) {
      if (beta[j] != 0.0) active.push_back(j);
    }
    while (!active.empty() && sweeps < options.max_sweeps) {
      const double change = sweep(X, lambda, col_scale, beta, residual, active, inv_norm);
      ++sweeps;
      record();
      if (change < options.coef_tol * (1.0 + beta.cwiseAbs().maxCoeff())) break;
    }
  }

  solution.beta = beta;
  solution.iterations = sweeps;
  solution.kkt_residual = kkt_residual(X, y, normalizer, lambda, beta);
  solution.converged = converged && solution.kkt_residual <= options.kkt_tol;
  return solution;
}

LassoSolution fit_lasso(const LassoProblem& problem, const VectorXd* warm_start,
                        const LassoOptions& options) {
  if (problem.X_sub.rows() < 1) {
    throw std::invalid_argument("fit_lasso: empty design");
  }
  if (problem.X_sub.rows() != problem.y_sub.size()) {
    throw std::invalid_argument("fit_lasso: X_sub and y_sub row counts differ");
  }
  VectorXd beta = warm_start != nullptr ? *warm_start : VectorXd::Zero(problem.X_sub.cols());
  if (warm_start != nullptr && warm_start->size() != problem.X_sub.cols()) {
    throw std::invalid_argument("fit_lasso: warm start length does not match p");
  }
  return coordinate_descent(problem.X_sub, problem.y_sub,
                            static_cast<double>(problem.n_full), problem.lambda, beta, options);
}

VectorXd lambda_path_from_top(double lambda_top, int n_points, double ratio) {
  if (n_points < 2) {
    throw std::invalid_argument("lambda_path: need at least 2 points");
  }
  if (ratio <= 0.0 || ratio >= 1.0) {
    throw std::invalid_argument("lambda_path: ratio must be in (0,1)");
  }
  if (!(lambda_top > 0.0) || !std::isfinite(lambda_top)) {
    throw std::invalid_argument("lambda_path: lambda_max undefined (zero or non-finite design)");
  }
  VectorXd path(n_points);
  const double log_top = std::log(lambda_top);
  const double log_step = std::log(ratio) / static_cast<double>(n_points - 1);
  for (int k = 0; k < n_points; ++k) {
    path[k] = std::exp(log_top + log_step * k);
  }
  path[0] = lambda_top;
  path[n_points - 1] = ratio * lambda_top;
  return path;
}

VectorXd lambda_path(const MatrixXd& X_sub, const VectorXd& y_sub, double normalizer,
                     int n_points, double ratio) {
  return lambda_path_from_top(lasso_lambda_max(X_sub, y_sub, normalizer), n_points, ratio);
}

std::vector<int> assign_folds(Index m, int k_folds, std::uint64_t seed) {
  std::vector<Index> perm(static_cast<size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold_of(static_cast<size_t>(m));
  for (Index pos = 0; pos < m; ++pos) {
    fold_of[static_cast<size_t>(perm[static_cast<size_t>(pos)])] =
        static_cast<int>((static_cast<long>(pos) * k_folds) / m);
  }
  return fold_of;
}

CrossValidationResult cross_validate_lambda(const MatrixXd& X_sub, const VectorXd& y_sub,
                                            Index n_full, int k_folds, const VectorXd& path,
                                            std::uint64_t seed, SolveCounters* counters) {
  const Index m = X_sub.rows();
  if (k_folds < 2) {
    throw std::invalid_argument("cross_validate_lambda: k_folds must be >= 2");
  }
  if (m < k_folds) {
    throw std::invalid_argument("cross_validate_lambda: fewer rows than folds");
  }
  if (path.size() < 1) {
    throw std::invalid_argument("cross_validate_lambda: empty path");
  }

  const std::vector<int> fold_of = assign_folds(m, k_folds, seed);
  VectorXd squared_error = VectorXd::Zero(path.size());

  for (int fold = 0; fold < k_folds; ++fold) {
    std::vector<Index> train, test;
    train.reserve(static_cast<size_t>(m));
    for (Index i = 0; i < m; ++i) {
      (fold_of[static_cast<size_t>(i)] == fold ? test : train).push_back(i);
    }
    MatrixXd X_train(static_cast<Index>(train.size()), X_sub.cols());
    VectorXd y_train(static_cast<Index>(train.size()));
    for (size_t r = 0; r < train.size(); ++r) {
      X_train.row(static_cast<Index>(r)) = X_sub.row(train[r]);
      y_train[static_cast<Index>(r)] = y_sub[train[r]];
    }
    // keep lambda on the scale of the final fit: shrink the normalizer by
    // the training fraction
    const double normalizer =
        static_cast<double>(n_full) * static_cast<double>(train.size()) / static_cast<double>(m);

    VectorXd beta = VectorXd::Zero(X_sub.cols());
    for (Index k = 0; k < path.size(); ++k) {
      coordinate_descent(X_train, y_train, normalizer, path[k], beta);
      for (Index i : test) {
        const double err = y_sub[i] - X_sub.row(i).dot(beta);
        squared_error[k] += err * err;
      }
    }
    if (counters != nullptr) counters->cv_fold_solves += 1;
  }

  CrossValidationResult result;
  result.cv_errors = squared_error / static_cast<double>(m);
  result.best_index = 0;
  for (Index k = 1; k < path.size(); ++k) {
    // strict improvement keeps the larger lambda on ties
    if (result.cv_errors[k] < result.cv_errors[result.best_index]) {
      result.best_index = k;
    }
  }
  result.best_lambda = path[result.best_index];
  return result;
}

}  // namespace cpreg
