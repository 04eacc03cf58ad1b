#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cpreg/two_step.hpp"
#include "cpreg/types.hpp"

namespace cpreg {

/// 2p-column design for a candidate threshold: columns (x_i', x_i' 1[w_i <= tau])
/// with the diagonal penalty weights D_j = root mean square norm of column j.
struct AugmentedDesign {
  MatrixXd X_tilde;
  VectorXd D;
};

AugmentedDesign build_augmented_design(const Dataset& data, double tau);

struct GridSearchResult {
  VectorXd alpha;                   // 2p vector in the (gamma, beta-gamma) parametrization
  RegressionPair coefficients;      // recovered (beta, gamma)
  double tau_hat = 0.0;
  Index grid_index = -1;            // rank of tau_hat in sorted w
  double lambda = 0.0;
  std::vector<double> candidates;   // searched thresholds, ascending
  std::vector<double> objective_curve;  // penalized objective per candidate
  bool converged = true;
};

/// The full grid search estimator: for each distinct observed w whose
/// empirical quantile lies inside the window, solve the weighted Lasso
///   min (1/n) ||y - X_tilde(tau) alpha||^2 + lambda ||D(tau) alpha||_1
/// and keep the tau minimizing the penalized objective. Zero-norm columns
/// are excluded (their coefficients are pinned at zero); consecutive
/// candidates are warm started.
GridSearchResult full_grid_search(const Dataset& data, double lambda,
                                  std::pair<double, double> quantile_window = {0.1, 0.9},
                                  SolveCounters* counters = nullptr);

/// CV'd lambda for the baseline, chosen once at the median-w candidate on
/// the rescaled augmented design and then held fixed across the grid.
double select_grid_lambda(const Dataset& data, int k_folds, const LambdaPathSpec& path_spec,
                          std::uint64_t seed, SolveCounters* counters = nullptr);

}  // namespace cpreg
