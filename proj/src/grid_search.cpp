#include "cpreg/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cpreg {

AugmentedDesign build_augmented_design(const Dataset& data, double tau) {
  const Index n = data.n();
  const Index p = data.p();
  AugmentedDesign design;
  design.X_tilde.resize(n, 2 * p);
  design.X_tilde.leftCols(p) = data.X;
  for (Index i = 0; i < n; ++i) {
    if (data.w[i] <= tau) {
      design.X_tilde.row(i).tail(p) = data.X.row(i);
    } else {
      design.X_tilde.row(i).tail(p).setZero();
    }
  }
  design.D.resize(2 * p);
  for (Index j = 0; j < 2 * p; ++j) {
    design.D[j] = std::sqrt(design.X_tilde.col(j).squaredNorm() / static_cast<double>(n));
  }
  return design;
}

namespace {

struct CandidateGrid {
  std::vector<double> values;      // distinct w ascending, windowed
  std::vector<Index> low_counts;   // observations with w <= value
};

CandidateGrid windowed_candidates(const Dataset& data, std::pair<double, double> window) {
  std::vector<double> sorted(data.w.data(), data.w.data() + data.n());
  std::sort(sorted.begin(), sorted.end());
  CandidateGrid grid;
  const double n = static_cast<double>(data.n());
  size_t i = 0;
  while (i < sorted.size()) {
    const double value = sorted[i];
    while (i < sorted.size() && sorted[i] == value) ++i;
    const double quantile = static_cast<double>(i) / n;
    if (quantile > window.first && quantile < window.second) {
      grid.values.push_back(value);
      grid.low_counts.push_back(static_cast<Index>(i));
    }
  }
  return grid;
}

// Scaled design for one candidate: column j of X_tilde divided by D_j,
// zero-norm columns left identically zero (their coefficients stay pinned).
MatrixXd scaled_design(const AugmentedDesign& design) {
  MatrixXd scaled = design.X_tilde;
  for (Index j = 0; j < scaled.cols(); ++j) {
    if (design.D[j] > 0.0) {
      scaled.col(j) /= design.D[j];
    } else {
      scaled.col(j).setZero();
    }
  }
  return scaled;
}

}  // namespace

GridSearchResult full_grid_search(const Dataset& data, double lambda,
                                  std::pair<double, double> quantile_window,
                                  SolveCounters* counters) {
  if (lambda <= 0.0) {
    throw std::invalid_argument("full_grid_search: lambda must be positive");
  }
  const CandidateGrid grid = windowed_candidates(data, quantile_window);
  if (grid.values.empty()) {
    throw std::invalid_argument("full_grid_search: no candidates inside the quantile window");
  }

  const Index n = data.n();
  const Index p = data.p();
  const double n_full = static_cast<double>(n);

  GridSearchResult result;
  result.lambda = lambda;
  result.candidates = grid.values;
  result.objective_curve.resize(grid.values.size());

  VectorXd alpha_warm = VectorXd::Zero(2 * p);  // unscaled coordinates
  double best_objective = std::numeric_limits<double>::infinity();

  for (size_t c = 0; c < grid.values.size(); ++c) {
    const AugmentedDesign design = build_augmented_design(data, grid.values[c]);
    const MatrixXd scaled = scaled_design(design);

    VectorXd coef(2 * p);  // scaled coordinates: coef_j = alpha_j * D_j
    for (Index j = 0; j < 2 * p; ++j) {
      coef[j] = design.D[j] > 0.0 ? alpha_warm[j] * design.D[j] : 0.0;
    }
    const LassoSolution solution = coordinate_descent(scaled, data.y, n_full, lambda, coef);
    if (counters != nullptr) counters->grid_candidate_solves += 1;

    const double objective =
        (data.y - scaled * coef).squaredNorm() / n_full + lambda * coef.lpNorm<1>();
    result.objective_curve[c] = objective;

    for (Index j = 0; j < 2 * p; ++j) {
      alpha_warm[j] = design.D[j] > 0.0 ? coef[j] / design.D[j] : 0.0;
    }
    if (objective < best_objective) {
      best_objective = objective;
      result.alpha = alpha_warm;
      result.tau_hat = grid.values[c];
      result.grid_index = grid.low_counts[c] - 1;
      result.converged = solution.converged;
    }
  }

  result.coefficients.gamma = result.alpha.head(p);
  result.coefficients.beta = result.alpha.head(p) + result.alpha.tail(p);
  return result;
}

double select_grid_lambda(const Dataset& data, int k_folds, const LambdaPathSpec& path_spec,
                          std::uint64_t seed, SolveCounters* counters) {
  const double median = empirical_quantile(data.w, 0.5);
  const AugmentedDesign design = build_augmented_design(data, median);
  const MatrixXd scaled = scaled_design(design);
  const VectorXd path = lambda_path(scaled, data.y, static_cast<double>(data.n()),
                                    path_spec.n_points, path_spec.ratio);
  const CrossValidationResult cv =
      cross_validate_lambda(scaled, data.y, data.n(), k_folds, path, seed, counters);
  return cv.best_lambda;
}

}  // namespace cpreg
