#include "cpreg/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cpreg/lasso.hpp"

namespace cpreg {

Step1Result step1_from_profile(const GridLossProfile& profile, double mu, TieRule tie_rule) {
  Step1Result result;
  result.selected_mu = mu;
  const size_t n_candidates = profile.thresholds.size();
  result.objective_values.resize(n_candidates + 1);
  result.objective_values[0] = profile.q_no_change;

  size_t best_finite = 0;
  double best_finite_value = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < n_candidates; ++k) {
    const double value = profile.q_finite[k] + mu;
    result.objective_values[k + 1] = value;
    if (value < best_finite_value) {  // strict: ties keep the smaller threshold
      best_finite_value = value;
      best_finite = k;
    }
  }

  const bool no_change_wins = tie_rule == TieRule::prefer_no_change
                                  ? profile.q_no_change <= best_finite_value
                                  : profile.q_no_change < best_finite_value;
  if (no_change_wins) {
    result.tau = ChangePointEstimate::no_change();
  } else {
    result.tau = ChangePointEstimate::at(profile.thresholds[best_finite],
                                         profile.low_counts[best_finite] - 1);
  }
  return result;
}

Step1Result step1_optimize(const Dataset& data, const RegressionPair& pair, double mu,
                           TieRule tie_rule) {
  if (mu <= 0.0) {
    throw std::invalid_argument("step1_optimize: mu must be positive");
  }
  return step1_from_profile(grid_loss_profile(data, pair), mu, tie_rule);
}

std::vector<double> default_mu_grid(const Dataset& data, const RegressionPair& pair,
                                    int n_points) {
  const GridLossProfile profile = grid_loss_profile(data, pair);
  const double min_finite =
      *std::min_element(profile.q_finite.begin(), profile.q_finite.end());
  const double delta = std::max(profile.q_no_change - min_finite,
                                std::numeric_limits<double>::epsilon());
  std::vector<double> grid(static_cast<size_t>(n_points));
  const double log_top = std::log(delta);
  const double log_step = std::log(1e-4) / static_cast<double>(n_points - 1);
  for (int k = 0; k < n_points; ++k) {
    grid[static_cast<size_t>(k)] = std::exp(log_top + log_step * k);
  }
  return grid;  // descending
}

namespace {

// Lasso refit of (beta, gamma) on the binary partition of tau; no-change
// collapses to a single fit duplicated across regimes.
RegressionPair refit_on_partition(const Dataset& data, const ChangePointEstimate& tau,
                                  double lambda_refit, SolveCounters* counters) {
  const Index n = data.n();
  const Index p = data.p();
  auto fit_rows = [&](const std::vector<Index>& rows) {
    MatrixXd X(static_cast<Index>(rows.size()), p);
    VectorXd y(static_cast<Index>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      X.row(static_cast<Index>(r)) = data.X.row(rows[r]);
      y[static_cast<Index>(r)] = data.y[rows[r]];
    }
    VectorXd beta = VectorXd::Zero(p);
    coordinate_descent(X, y, static_cast<double>(n), lambda_refit, beta);
    return beta;
  };

  if (counters != nullptr) counters->bic_refits += 1;
  if (!tau.finite) {
    VectorXd gamma = VectorXd::Zero(p);
    coordinate_descent(data.X, data.y, static_cast<double>(n), lambda_refit, gamma);
    return {gamma, gamma};
  }
  const PartitionIndices part = binary_partition(data, tau);
  if (part.low.empty() || part.high.empty()) {
    // tau at the sample extremes: all mass on one side, fit that side only
    VectorXd fitted = fit_rows(part.low.empty() ? part.high : part.low);
    return {fitted, fitted};
  }
  return {fit_rows(part.low), fit_rows(part.high)};
}

}  // namespace

BicSelection select_mu_bic(const Dataset& data, const RegressionPair& pair0,
                           const std::vector<double>& mu_grid, double lambda_refit,
                           TieRule tie_rule, SolveCounters* counters) {
  if (mu_grid.empty()) {
    throw std::invalid_argument("select_mu_bic: empty mu grid");
  }
  if (lambda_refit <= 0.0) {
    throw std::invalid_argument("select_mu_bic: lambda_refit must be positive");
  }

  const GridLossProfile profile = grid_loss_profile(data, pair0);
  const double n = static_cast<double>(data.n());
  const double bic_penalty = std::log(n) / n;

  // memoize refits per distinct partition: key -1 is no-change, otherwise
  // the grid index of the threshold
  struct Scored {
    RegressionPair refit;
    double bic;
    bool zero_loss;
  };
  std::map<Index, Scored> cache;

  BicSelection selection;
  selection.bic_values.reserve(mu_grid.size());
  double best_bic = std::numeric_limits<double>::infinity();

  for (double mu : mu_grid) {
    if (mu <= 0.0 || !std::isfinite(mu)) {
      throw std::invalid_argument("select_mu_bic: mu grid entries must be positive and finite");
    }
    Step1Result step1 = step1_from_profile(profile, mu, tie_rule);
    const Index key = step1.tau.finite ? step1.tau.grid_index : Index{-1};
    auto it = cache.find(key);
    if (it == cache.end()) {
      Scored scored;
      scored.refit = refit_on_partition(data, step1.tau, lambda_refit, counters);
      double q = squared_loss_Q(step1.tau, scored.refit, data);
      scored.zero_loss = q == 0.0;
      q = std::max(q, 1e-300);
      scored.bic = std::log(q) + bic_penalty * step1.tau.l0_indicator();
      it = cache.emplace(key, std::move(scored)).first;
    }
    selection.bic_values.push_back(it->second.bic);
    // the grid is descending, so strict improvement keeps the larger mu on ties
    if (it->second.bic < best_bic) {
      best_bic = it->second.bic;
      selection.mu = mu;
      selection.step1 = std::move(step1);
      selection.refit = it->second.refit;
      selection.zero_loss_flagged = it->second.zero_loss;
    }
  }
  return selection;
}

}  // namespace cpreg
