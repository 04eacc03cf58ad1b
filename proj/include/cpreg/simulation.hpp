#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpreg/two_step.hpp"
#include "cpreg/types.hpp"

namespace cpreg {

enum class Method { algo1A, algo1B, full_grid };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// Monte Carlo experiment description. tau0 empty means the no-change
/// design (y depends on gamma0 only). beta0/gamma0 left empty pick up the
/// standard sparse defaults.
struct SimulationConfig {
  int n = 150;
  int p = 25;
  std::optional<double> tau0 = 0.5;
  double rho = 0.5;
  double sigma_eps = 1.0;
  int replications = 100;
  std::uint64_t base_seed = 1;
  Method method = Method::algo1A;
  VectorXd beta0;
  VectorXd gamma0;
  int k_folds = 5;
  LambdaPathSpec lambda_path_spec;
  std::optional<double> fixed_mu;  // empty: BIC
  std::pair<double, double> grid_window = {0.1, 0.9};
  int threads = 0;  // 0: hardware concurrency
};

VectorXd default_beta0(int p);   // (1,1,1,1,0,...)
VectorXd default_gamma0(int p);  // (0,0,0,0,1,1,1,1,0,...)

struct GroundTruth {
  VectorXd beta0;
  VectorXd gamma0;
  std::optional<double> tau0;
};

GroundTruth ground_truth(const SimulationConfig& config);

/// Deterministic replicate stream: seeded from (base_seed, replicate_index),
/// x_i ~ N(0, Sigma) with Sigma_ij = rho^|i-j| via its lower-triangular
/// factor, w_i ~ U(0,1), eps_i ~ N(0, sigma_eps^2), y from the model.
Dataset generate_dataset(const SimulationConfig& config, int replicate_index);

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate_index);

/// One fitted replicate, reduced to what the metrics need.
struct ReplicateResult {
  int rep = 0;
  bool ok = true;
  std::string error;
  bool detected_no_change = false;  // step-1 decision, before any adjustment
  bool adjusted = false;            // boundary rule applied
  double tau_value = 0.0;           // threshold for metrics (boundary rule may set 0 or 1)
  VectorXd beta;
  VectorXd gamma;
  double seconds = 0.0;
  SolveCounters counters;
};

/// Fairness substitution for a finite-tau0 design: a no-change verdict is
/// scored as tau=0 with beta=0 when tau0 <= 0.5, and as tau=1 with gamma=0
/// when tau0 > 0.5. Finite verdicts pass through. Idempotent.
ReplicateResult apply_boundary_rule(const ReplicateResult& fit, double tau0);

struct MetricsRow {
  std::string method;
  int n = 0;
  int p = 0;
  std::optional<double> tau0;
  double bias_beta = 0.0;
  double bias_gamma = 0.0;
  double bias_tau = 0.0;
  double mse_beta = 0.0;
  double mse_gamma = 0.0;
  double mse_tau = 0.0;
  double mse_phi_tau = 0.0;
  double prm = 0.0;  // defined iff tau0 is no-change
  double mean_time_seconds = 0.0;
  int replications = 0;
  int excluded = 0;
};

/// Monte Carlo aggregates. bias(beta) = ||mean(beta_hat - beta0)||_2 and
/// mse(beta) = ||mean((beta_hat - beta0)^2)||_2 with the square taken
/// elementwise; tau metrics use plain means. With w ~ U(0,1) the cdf is the
/// identity, so mse of Phi(tau) uses tau directly. Failed replicates must be
/// filtered out by the caller.
MetricsRow compute_metrics(const std::vector<ReplicateResult>& estimates,
                           const GroundTruth& truth);

ReplicateResult run_replicate(const SimulationConfig& config, int replicate_index);

struct MonteCarloOutput {
  MetricsRow metrics;
  std::vector<ReplicateResult> replicates;  // ordered by replicate index
  int excluded = 0;
};

/// generate -> fit -> boundary rule -> aggregate, deterministically per
/// (base_seed, index). Replicates run on a worker pool; the reduction is
/// ordered by index so the thread count never changes the output.
MonteCarloOutput run_monte_carlo(const SimulationConfig& config);

std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row, bool zero_time = false);

}  // namespace cpreg
