#include "cpreg/loss.hpp"

#include <algorithm>
#include <numeric>

namespace cpreg {

Dataset::Dataset(VectorXd y_in, MatrixXd X_in, VectorXd w_in)
    : y(std::move(y_in)), X(std::move(X_in)), w(std::move(w_in)) {
  const Index n = y.size();
  if (n < 2) {
    throw std::invalid_argument("Dataset: need at least 2 observations, got " +
                                std::to_string(n));
  }
  if (X.rows() != n || w.size() != n) {
    throw std::invalid_argument("Dataset: y, X, w row counts differ");
  }
  if (!y.allFinite() || !X.allFinite() || !w.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entries");
  }
}

PartitionIndices binary_partition(const Dataset& data, const ChangePointEstimate& tau) {
  PartitionIndices part;
  const Index n = data.n();
  part.low.reserve(tau.finite ? static_cast<size_t>(n) : 0);
  part.high.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (tau.finite && data.w[i] <= tau.threshold) {
      part.low.push_back(i);
    } else {
      part.high.push_back(i);
    }
  }
  return part;
}

double squared_loss_Q(const ChangePointEstimate& tau, const RegressionPair& pair,
                      const Dataset& data) {
  const Index n = data.n();
  if (pair.gamma.size() != data.p() || (tau.finite && pair.beta.size() != data.p())) {
    throw std::invalid_argument("squared_loss_Q: coefficient length does not match p");
  }
  double sum = 0.0;
  if (!tau.finite) {
    sum = (data.y - data.X * pair.gamma).squaredNorm();
  } else {
    const VectorXd rb = data.y - data.X * pair.beta;
    const VectorXd rg = data.y - data.X * pair.gamma;
    for (Index i = 0; i < n; ++i) {
      const double r = data.w[i] <= tau.threshold ? rb[i] : rg[i];
      sum += r * r;
    }
  }
  return sum / static_cast<double>(n);
}

GridLossProfile grid_loss_profile(const Dataset& data, const RegressionPair& pair) {
  const Index n = data.n();
  if (pair.beta.size() != data.p() || pair.gamma.size() != data.p()) {
    throw std::invalid_argument("grid_loss_profile: coefficient length does not match p");
  }

  const VectorXd rb = (data.y - data.X * pair.beta).array().square();
  const VectorXd rg = (data.y - data.X * pair.gamma).array().square();

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return data.w[a] < data.w[b]; });

  GridLossProfile profile;
  profile.q_no_change = rg.sum() / static_cast<double>(n);

  double sum_low = 0.0;
  double sum_high = rg.sum();
  size_t i = 0;
  while (i < order.size()) {
    const double value = data.w[order[i]];
    // duplicates of the threshold all belong to the low partition
    while (i < order.size() && data.w[order[i]] == value) {
      sum_low += rb[order[i]];
      sum_high -= rg[order[i]];
      ++i;
    }
    profile.thresholds.push_back(value);
    profile.q_finite.push_back((sum_low + sum_high) / static_cast<double>(n));
    profile.low_counts.push_back(static_cast<Index>(i));
  }
  return profile;
}

}  // namespace cpreg
