#pragma once

#include <vector>

#include "cpreg/types.hpp"

namespace cpreg {

struct PartitionIndices {
  std::vector<Index> low;   // { i : w_i <= tau }
  std::vector<Index> high;  // complement
};

/// Split observations at the threshold. The no-change model puts every
/// observation in the high (gamma) regime.
PartitionIndices binary_partition(const Dataset& data, const ChangePointEstimate& tau);

/// Least squares loss of the change point model,
///   Q(tau, beta, gamma) = (1/n) sum_{w_i <= tau} (y_i - x_i'beta)^2
///                       + (1/n) sum_{w_i >  tau} (y_i - x_i'gamma)^2,
/// with both partial sums normalized by the full sample size. For the
/// no-change model the indicator vanishes and every observation uses gamma.
double squared_loss_Q(const ChangePointEstimate& tau, const RegressionPair& pair,
                      const Dataset& data);

/// Loss evaluated at every candidate threshold in one sorted sweep.
/// thresholds holds the distinct w values ascending; q_finite[k] is
/// Q(thresholds[k], pair) and low_counts[k] the size of the low partition
/// there. q_no_change is the loss of the no-change candidate.
struct GridLossProfile {
  std::vector<double> thresholds;
  std::vector<double> q_finite;
  std::vector<Index> low_counts;
  double q_no_change = 0.0;
};

/// Two-pass sweep: residual squares are computed once per regime, then the
/// two running sums are updated incrementally as the threshold crosses each
/// distinct w value. O(n p) total instead of O(n^2 p).
GridLossProfile grid_loss_profile(const Dataset& data, const RegressionPair& pair);

}  // namespace cpreg
