#pragma once

#include <vector>

#include "cpreg/loss.hpp"
#include "cpreg/types.hpp"

namespace cpreg {

enum class TieRule {
  prefer_no_change,    // ties go to no-change, then the smallest threshold
  smallest_threshold,  // ties go to the smallest finite threshold
};

/// Penalty policy for step 1: a single fixed mu, or a descending grid
/// scored by BIC.
struct Step1Config {
  std::vector<double> mu_grid;  // one entry = fixed mu
  TieRule tie_rule = TieRule::prefer_no_change;
};

struct Step1Result {
  ChangePointEstimate tau;
  // objective per candidate; entry 0 is the no-change candidate, then the
  // distinct observed w values ascending
  std::vector<double> objective_values;
  double selected_mu = 0.0;
};

/// l0-penalized change point update on the finite candidate grid:
/// argmin over {-inf} union {distinct w} of Q(tau, pair) + mu * ||tau||_0*.
Step1Result step1_optimize(const Dataset& data, const RegressionPair& pair, double mu,
                           TieRule tie_rule = TieRule::prefer_no_change);

/// Same, reusing a precomputed loss profile (the sweep is the expensive part).
Step1Result step1_from_profile(const GridLossProfile& profile, double mu, TieRule tie_rule);

/// Default BIC grid: 50 log-spaced values over [1e-4*delta, delta], where
/// delta = max(Q(no-change) - min over finite candidates, eps) brackets every
/// penalty level at which the decision can flip. Returned descending.
std::vector<double> default_mu_grid(const Dataset& data, const RegressionPair& pair,
                                    int n_points = 50);

struct BicSelection {
  double mu = 0.0;
  Step1Result step1;
  RegressionPair refit;            // Lasso refit on the winning partition
  std::vector<double> bic_values;  // aligned with the mu grid
  bool zero_loss_flagged = false;  // Q hit exact zero, log clamped
};

/// BIC(mu) = log Q(tau(mu), beta(mu), gamma(mu)) + (log n / n) * ||tau(mu)||_0*,
/// where beta(mu), gamma(mu) are Lasso refits at lambda_refit on the binary
/// partition given by tau(mu). Distinct partitions are memoized so each refit
/// runs once. Ties in BIC go to the larger mu.
BicSelection select_mu_bic(const Dataset& data, const RegressionPair& pair0,
                           const std::vector<double>& mu_grid, double lambda_refit,
                           TieRule tie_rule = TieRule::prefer_no_change,
                           SolveCounters* counters = nullptr);

}  // namespace cpreg
