#include "cpreg/two_step.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace cpreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Submatrix {
  MatrixXd X;
  VectorXd y;
};

Submatrix take_rows(const Dataset& data, const std::vector<Index>& rows) {
  Submatrix out;
  out.X.resize(static_cast<Index>(rows.size()), data.p());
  out.y.resize(static_cast<Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Index>(r)) = data.X.row(rows[r]);
    out.y[static_cast<Index>(r)] = data.y[rows[r]];
  }
  return out;
}

// Solve the path from the top down to stop_index with warm starts and
// return the coefficients at stop_index.
LassoSolution solve_down_path(const MatrixXd& X, const VectorXd& y, double normalizer,
                              const VectorXd& path, Index stop_index) {
  VectorXd beta = VectorXd::Zero(X.cols());
  LassoSolution solution;
  for (Index k = 0; k <= stop_index; ++k) {
    solution = coordinate_descent(X, y, normalizer, path[k], beta);
  }
  return solution;
}

ChangePointEstimate estimate_at_value(const Dataset& data, double tau_value) {
  Index low_count = 0;
  for (Index i = 0; i < data.n(); ++i) {
    if (data.w[i] <= tau_value) ++low_count;
  }
  if (low_count == 0 || low_count == data.n()) {
    throw std::invalid_argument("two_step: initializer gives a one-sided partition");
  }
  return ChangePointEstimate::at(tau_value, low_count - 1);
}

}  // namespace

double lambda_at_se_cutoff(const PairFitResult& fit, double c) {
  Index best = 0;
  for (Index k = 1; k < fit.cv_errors.size(); ++k) {
    if (fit.cv_errors[k] < fit.cv_errors[best]) best = k;
  }
  const double cutoff = fit.cv_errors[best] + c * fit.cv_se_min;
  for (Index k = 0; k <= best; ++k) {
    if (fit.cv_errors[k] <= cutoff) return fit.path[k];
  }
  return fit.lambda;
}

double empirical_quantile(const VectorXd& values, double q) {
  if (values.size() == 0) {
    throw std::invalid_argument("empirical_quantile: empty vector");
  }
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<long>(std::ceil(q * n)) - 1;
  rank = std::clamp<long>(rank, 0, static_cast<long>(sorted.size()) - 1);
  return sorted[static_cast<size_t>(rank)];
}

PairFitResult cv_pair_fit(const Dataset& data, const ChangePointEstimate& tau, int k_folds,
                          const LambdaPathSpec& path_spec, std::uint64_t seed,
                          SolveCounters* counters) {
  if (!tau.finite) {
    throw std::invalid_argument("cv_pair_fit: need a finite threshold");
  }
  const Index n = data.n();
  const Index p = data.p();
  const double n_full = static_cast<double>(n);
  const PartitionIndices part = binary_partition(data, tau);

  const Submatrix low = take_rows(data, part.low);
  const Submatrix high = take_rows(data, part.high);

  double lambda_top = 0.0;
  if (!part.low.empty()) lambda_top = std::max(lambda_top, lasso_lambda_max(low.X, low.y, n_full));
  if (!part.high.empty())
    lambda_top = std::max(lambda_top, lasso_lambda_max(high.X, high.y, n_full));
  const VectorXd path = lambda_path_from_top(lambda_top, path_spec.n_points, path_spec.ratio);

  const std::vector<int> fold_of = assign_folds(n, k_folds, seed);
  VectorXd squared_error = VectorXd::Zero(path.size());
  MatrixXd fold_mean_error(k_folds, path.size());

  for (int fold = 0; fold < k_folds; ++fold) {
    std::vector<Index> train_low, train_high, test;
    for (Index i = 0; i < n; ++i) {
      if (fold_of[static_cast<size_t>(i)] == fold) {
        test.push_back(i);
      } else if (data.w[i] <= tau.threshold) {
        train_low.push_back(i);
      } else {
        train_high.push_back(i);
      }
    }
    const double train_total = static_cast<double>(train_low.size() + train_high.size());
    const double normalizer = n_full * train_total / static_cast<double>(n);

    const Submatrix tl = take_rows(data, train_low);
    const Submatrix th = take_rows(data, train_high);
    VectorXd beta = VectorXd::Zero(p);
    VectorXd gamma = VectorXd::Zero(p);
    for (Index k = 0; k < path.size(); ++k) {
      if (!train_low.empty()) coordinate_descent(tl.X, tl.y, normalizer, path[k], beta);
      if (!train_high.empty()) coordinate_descent(th.X, th.y, normalizer, path[k], gamma);
      double fold_error = 0.0;
      for (Index i : test) {
        const VectorXd& coef = data.w[i] <= tau.threshold ? beta : gamma;
        const double err = data.y[i] - data.X.row(i).dot(coef);
        fold_error += err * err;
      }
      squared_error[k] += fold_error;
      fold_mean_error(fold, k) = fold_error / static_cast<double>(test.size());
    }
    if (counters != nullptr) {
      counters->cv_fold_solves += (train_low.empty() ? 0 : 1) + (train_high.empty() ? 0 : 1);
    }
  }

  Index best = 0;
  for (Index k = 1; k < path.size(); ++k) {
    if (squared_error[k] < squared_error[best]) best = k;
  }

  PairFitResult result;
  result.cv_errors = squared_error / static_cast<double>(n);
  // one-standard-error rule on the fold means
  const VectorXd fold_means = fold_mean_error.col(best);
  const double center = fold_means.mean();
  const double se = std::sqrt((fold_means.array() - center).square().sum() /
                              static_cast<double>(k_folds - 1)) /
                    std::sqrt(static_cast<double>(k_folds));
  auto index_at_cutoff = [&](double c) {
    const double cutoff = result.cv_errors[best] + c * se;
    for (Index k = 0; k <= best; ++k) {
      if (result.cv_errors[k] <= cutoff) return k;
    }
    return best;
  };
  result.lambda_1se = path[index_at_cutoff(1.0)];
  result.cv_se_min = se;
  result.path = path;

  const Index fit_index = best;
  result.lambda = path[fit_index];
  result.pair.beta = VectorXd::Zero(p);
  result.pair.gamma = VectorXd::Zero(p);
  if (!part.low.empty()) {
    const LassoSolution sol = solve_down_path(low.X, low.y, n_full, path, fit_index);
    result.pair.beta = sol.beta;
    result.converged = result.converged && sol.converged;
    if (counters != nullptr) counters->final_path_solves += 1;
  }
  if (!part.high.empty()) {
    const LassoSolution sol = solve_down_path(high.X, high.y, n_full, path, fit_index);
    result.pair.gamma = sol.beta;
    result.converged = result.converged && sol.converged;
    if (counters != nullptr) counters->final_path_solves += 1;
  }
  if (counters != nullptr) counters->pair_fits += 1;
  return result;
}

SingleFitResult cv_single_fit(const MatrixXd& X, const VectorXd& y, Index n_full, int k_folds,
                              const LambdaPathSpec& path_spec, std::uint64_t seed,
                              SolveCounters* counters) {
  const VectorXd path =
      lambda_path(X, y, static_cast<double>(n_full), path_spec.n_points, path_spec.ratio);
  const CrossValidationResult cv =
      cross_validate_lambda(X, y, n_full, k_folds, path, seed, counters);

  SingleFitResult result;
  result.cv_errors = cv.cv_errors;
  result.lambda = cv.best_lambda;
  const LassoSolution sol =
      solve_down_path(X, y, static_cast<double>(n_full), path, cv.best_index);
  result.beta = sol.beta;
  result.converged = sol.converged;
  if (counters != nullptr) {
    counters->final_path_solves += 1;
    counters->single_fits += 1;
  }
  return result;
}

InitializerResult initialize_tau(const Dataset& data, InitScheme scheme, std::uint64_t seed,
                                 int k_folds, const LambdaPathSpec& path_spec,
                                 SolveCounters* counters) {
  InitializerResult result;
  if (scheme == InitScheme::A) {
    result.tau0 = empirical_quantile(data.w, 0.5);
    return result;
  }

  const double quantiles[3] = {0.25, 0.50, 0.75};
  result.candidate_losses.assign(3, std::numeric_limits<double>::quiet_NaN());
  double best_loss = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 3; ++c) {
    const double value = empirical_quantile(data.w, quantiles[c]);
    ChangePointEstimate candidate;
    try {
      candidate = estimate_at_value(data, value);
    } catch (const std::invalid_argument&) {
      continue;  // one-sided candidate, skip
    }
    PairFitResult fit = cv_pair_fit(data, candidate, k_folds, path_spec, seed, counters);
    const double loss = squared_loss_Q(candidate, fit.pair, data);
    result.candidate_losses[static_cast<size_t>(c)] = loss;
    if (loss < best_loss) {
      best_loss = loss;
      result.tau0 = value;
      result.fitted = std::move(fit);
    }
  }
  if (!result.fitted.has_value()) {
    throw std::invalid_argument("initialize_tau: every quantile candidate is one-sided");
  }
  return result;
}

Dataset standardize_dataset(const Dataset& data) {
  const Index n = data.n();
  const double denom = static_cast<double>(n - 1);
  auto scale_of = [&](const VectorXd& centered) {
    const double sd = std::sqrt(centered.squaredNorm() / denom);
    return sd > 0.0 ? sd : 1.0;
  };

  VectorXd y = data.y.array() - data.y.mean();
  y /= scale_of(y);
  MatrixXd X = data.X;
  for (Index j = 0; j < X.cols(); ++j) {
    X.col(j).array() -= X.col(j).mean();
    X.col(j) /= scale_of(X.col(j));
  }
  return Dataset(std::move(y), std::move(X), data.w);
}

namespace {

// Steps 1 and 2 given the step-0 pair; shared by both entry points.
TwoStepFit finish_algorithm(const Dataset& data, double tau0_value, PairFitResult step0,
                            const AlgorithmConfig& config, SolveCounters counters,
                            double step0_seconds) {
  TwoStepFit fit;
  fit.initializer_used = tau0_value;
  fit.lambda1 = step0.lambda;
  fit.converged = step0.converged;
  fit.wall_time_step[0] = step0_seconds;

  // step 1: l0 change point update, mu fixed or BIC selected
  auto t1 = Clock::now();
  Step1Result step1;
  if (config.fixed_mu.has_value()) {
    step1 = step1_optimize(data, step0.pair, *config.fixed_mu, config.tie_rule);
  } else {
    const std::vector<double> grid = default_mu_grid(data, step0.pair);
    const double lambda_refit = lambda_at_se_cutoff(step0, kBicRefitSeFraction);
    const BicSelection bic =
        select_mu_bic(data, step0.pair, grid, lambda_refit, config.tie_rule, &counters);
    step1 = bic.step1;
  }
  counters.step1_sweeps += 1;
  fit.mu = step1.selected_mu;
  fit.tau = step1.tau;
  fit.wall_time_step[1] = seconds_since(t1);

  // step 2: refit both regimes on the updated partition
  auto t2 = Clock::now();
  if (fit.tau.finite) {
    PairFitResult step2 = cv_pair_fit(data, fit.tau, config.k_folds, config.lambda_path_spec,
                                      config.seed, &counters);
    fit.coefficients = std::move(step2.pair);
    fit.lambda2 = step2.lambda;
    fit.converged = fit.converged && step2.converged;
  } else {
    SingleFitResult step2 = cv_single_fit(data.X, data.y, data.n(), config.k_folds,
                                          config.lambda_path_spec, config.seed, &counters);
    fit.coefficients.beta = step2.beta;
    fit.coefficients.gamma = step2.beta;
    fit.lambda2 = step2.lambda;
    fit.converged = fit.converged && step2.converged;
    fit.single_regime = true;
  }
  fit.wall_time_step[2] = seconds_since(t2);

  fit.final_loss = squared_loss_Q(fit.tau, fit.coefficients, data);
  fit.counters = counters;
  return fit;
}

}  // namespace

TwoStepFit run_algorithm1(const Dataset& data, const AlgorithmConfig& config) {
  if (config.k_folds < 2) {
    throw std::invalid_argument("run_algorithm1: k_folds must be >= 2");
  }
  if (data.n() <= 2 * config.k_folds) {
    throw std::invalid_argument("run_algorithm1: need n > 2*k_folds");
  }
  const Dataset* working = &data;
  std::optional<Dataset> standardized;
  if (config.standardize) {
    standardized.emplace(standardize_dataset(data));
    working = &*standardized;
  }

  SolveCounters counters;
  auto t0 = Clock::now();
  InitializerResult init = initialize_tau(*working, config.scheme, config.seed, config.k_folds,
                                          config.lambda_path_spec, &counters);
  PairFitResult step0;
  if (init.fitted.has_value()) {
    step0 = std::move(*init.fitted);
  } else {
    const ChangePointEstimate tau0 = estimate_at_value(*working, init.tau0);
    step0 = cv_pair_fit(*working, tau0, config.k_folds, config.lambda_path_spec, config.seed,
                        &counters);
  }
  return finish_algorithm(*working, init.tau0, std::move(step0), config, counters,
                          seconds_since(t0));
}

TwoStepFit run_algorithm1_from(const Dataset& data, double tau0, const AlgorithmConfig& config) {
  if (config.k_folds < 2) {
    throw std::invalid_argument("run_algorithm1: k_folds must be >= 2");
  }
  if (data.n() <= 2 * config.k_folds) {
    throw std::invalid_argument("run_algorithm1: need n > 2*k_folds");
  }
  const Dataset* working = &data;
  std::optional<Dataset> standardized;
  if (config.standardize) {
    standardized.emplace(standardize_dataset(data));
    working = &*standardized;
  }

  SolveCounters counters;
  auto t0 = Clock::now();
  const ChangePointEstimate tau0_est = estimate_at_value(*working, tau0);
  PairFitResult step0 = cv_pair_fit(*working, tau0_est, config.k_folds, config.lambda_path_spec,
                                    config.seed, &counters);
  return finish_algorithm(*working, tau0, std::move(step0), config, counters,
                          seconds_since(t0));
}

}  // namespace cpreg
