#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cpreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Observed sample: response y, predictors X (n x p) and the change
/// inducing covariate w. Immutable after construction; the constructor
/// rejects dimension mismatches and non-finite entries.
struct Dataset {
  VectorXd y;
  MatrixXd X;
  VectorXd w;

  Dataset(VectorXd y_in, MatrixXd X_in, VectorXd w_in);

  Index n() const { return y.size(); }
  Index p() const { return X.cols(); }
};

/// Change point estimate: either the no-change model (threshold at
/// negative infinity) or a finite threshold equal to one of the observed
/// w values. grid_index is the rank of the threshold in sorted w, i.e.
/// the number of observations with w_i <= threshold minus one.
struct ChangePointEstimate {
  bool finite = false;
  double threshold = 0.0;
  Index grid_index = -1;

  static ChangePointEstimate no_change() { return {}; }
  static ChangePointEstimate at(double threshold, Index grid_index) {
    ChangePointEstimate cp;
    cp.finite = true;
    cp.threshold = threshold;
    cp.grid_index = grid_index;
    return cp;
  }

  // The implementable surrogate for the l0 penalty on the cdf scale.
  int l0_indicator() const { return finite ? 1 : 0; }
};

/// Pre/post change regression coefficients.
struct RegressionPair {
  VectorXd beta;
  VectorXd gamma;

  RegressionPair() = default;
  RegressionPair(VectorXd b, VectorXd g) : beta(std::move(b)), gamma(std::move(g)) {}

  double jump_size() const { return (beta - gamma).norm(); }
};

/// Instrumented solve counts, filled in by the fitting routines that own
/// the corresponding units of work.
struct SolveCounters {
  long pair_fits = 0;           // CV'd (beta,gamma) pair fits on a partition
  long final_path_solves = 0;   // warm-started path solves producing a final fit
  long cv_fold_solves = 0;      // per-fold path solves inside cross validation
  long single_fits = 0;         // CV'd single-regime fits (no-change refits)
  long bic_refits = 0;          // partition refits triggered by BIC selection
  long step1_sweeps = 0;        // O(n p) grid sweeps
  long grid_candidate_solves = 0;  // weighted Lasso solves in the grid baseline
};

/// Full output of the two step algorithm.
struct TwoStepFit {
  RegressionPair coefficients;
  ChangePointEstimate tau;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu = 0.0;
  double final_loss = 0.0;
  double initializer_used = 0.0;
  std::array<double, 3> wall_time_step = {0.0, 0.0, 0.0};
  bool single_regime = false;  // set when tau is no-change and beta == gamma
  bool converged = true;       // false when any internal Lasso fit failed to converge
  SolveCounters counters;
};

}  // namespace cpreg
