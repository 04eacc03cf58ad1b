#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpreg/changepoint.hpp"
#include "cpreg/lasso.hpp"
#include "cpreg/types.hpp"

namespace cpreg {

enum class InitScheme { A, B };

struct LambdaPathSpec {
  int n_points = 100;
  double ratio = 1e-3;
};

struct AlgorithmConfig {
  InitScheme scheme = InitScheme::A;
  int k_folds = 5;
  LambdaPathSpec lambda_path_spec;
  std::optional<double> fixed_mu;  // empty: mu selected by BIC
  std::uint64_t seed = 0;
  bool standardize = false;
  TieRule tie_rule = TieRule::prefer_no_change;
};

/// Cross-validated fit of the separable pair problem on the binary
/// partition of tau: one shared lambda penalizes the stacked (beta, gamma)
/// vector, so each fold fits the two partition Lassos at the same lambda
/// and scores held-out rows with the regime their w assigns.
struct PairFitResult {
  RegressionPair pair;
  double lambda = 0.0;      // CV-minimizing penalty, used for the fit itself
  double lambda_1se = 0.0;  // largest penalty within one SE of the minimum
  double cv_se_min = 0.0;   // standard error of the CV curve at its minimum
  bool converged = true;
  VectorXd cv_errors;
  VectorXd path;
};

PairFitResult cv_pair_fit(const Dataset& data, const ChangePointEstimate& tau, int k_folds,
                          const LambdaPathSpec& path_spec, std::uint64_t seed,
                          SolveCounters* counters = nullptr);

/// Largest path value whose CV error is within c standard errors of the
/// minimum (c = 0 gives lambda, c = 1 gives lambda_1se).
double lambda_at_se_cutoff(const PairFitResult& fit, double c);

/// SE backoff for the BIC refit penalty. CV-minimal refits overfit each
/// partition by more than the (log n)/n indicator penalty and a full
/// one-SE backoff under-fits; the decision rate is calibrated at a
/// quarter SE.
inline constexpr double kBicRefitSeFraction = 0.25;

/// Single-regime counterpart used when step 1 selects no change.
struct SingleFitResult {
  VectorXd beta;
  double lambda = 0.0;
  bool converged = true;
  VectorXd cv_errors;
};

SingleFitResult cv_single_fit(const MatrixXd& X, const VectorXd& y, Index n_full, int k_folds,
                              const LambdaPathSpec& path_spec, std::uint64_t seed,
                              SolveCounters* counters = nullptr);

/// Type-1 empirical quantile (inverse ecdf); q = 0.5 gives the lower median.
double empirical_quantile(const VectorXd& values, double q);

struct InitializerResult {
  double tau0 = 0.0;
  // per-candidate total least squares losses, scheme B only; skipped
  // candidates hold NaN
  std::vector<double> candidate_losses;
  // scheme B keeps the winning candidate's fitted pair so step 0 does not refit
  std::optional<PairFitResult> fitted;
};

/// Scheme A: the 0.5th empirical quantile of w. Scheme B: the candidate
/// among the 0.25/0.50/0.75 quantiles minimizing the least squares loss of
/// its own CV'd pair fit; one-sided candidates are skipped.
InitializerResult initialize_tau(const Dataset& data, InitScheme scheme, std::uint64_t seed,
                                 int k_folds = 5, const LambdaPathSpec& path_spec = {},
                                 SolveCounters* counters = nullptr);

/// Centered, column-scaled copy (y and X only; w is left alone since the
/// threshold lives on its scale).
Dataset standardize_dataset(const Dataset& data);

/// The full two step algorithm: initialize, step 0 pair fit, step 1 change
/// point update, step 2 refit.
TwoStepFit run_algorithm1(const Dataset& data, const AlgorithmConfig& config);

/// Same, with an explicit initializer value instead of a scheme.
TwoStepFit run_algorithm1_from(const Dataset& data, double tau0, const AlgorithmConfig& config);

}  // namespace cpreg
