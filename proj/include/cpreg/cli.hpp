#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpreg/csv.hpp"
#include "cpreg/simulation.hpp"
#include "cpreg/two_step.hpp"

namespace cpreg {

inline constexpr int kFitReportSchemaVersion = 1;

struct FitCommandOptions {
  InitScheme scheme = InitScheme::A;
  std::optional<double> fixed_mu;  // empty: BIC
  bool standardize = false;
  std::optional<double> drop_correlated;  // drop predictors with |corr(x_j, w)| above this
  std::uint64_t seed = 0;
  int k_folds = 5;
  bool no_timings = false;  // zero the timing fields for byte-stable output
};

/// Predictors too correlated with w, per the --drop-correlated flag.
struct CorrelationFilter {
  NamedDataset filtered;
  std::vector<std::string> dropped;
};

CorrelationFilter drop_correlated_predictors(const NamedDataset& input, double threshold);

nlohmann::json build_fit_report(const TwoStepFit& fit, const Dataset& data,
                                const std::vector<std::string>& predictor_names,
                                const std::vector<std::string>& dropped_columns,
                                bool no_timings);

/// Full fit pipeline on an in-memory dataset; the CSV entry point parses
/// the file and delegates here.
nlohmann::json run_fit(const NamedDataset& input, const FitCommandOptions& options);
nlohmann::json run_fit_file(const std::string& csv_path, const FitCommandOptions& options);

struct SimulateCommandOptions {
  std::vector<int> n_values = {150};
  std::vector<int> p_values = {25};
  std::vector<std::optional<double>> tau0_values = {0.5};
  std::vector<Method> methods = {Method::algo1A};
  int replications = 100;
  std::uint64_t seed = 1;
  double rho = 0.5;
  double sigma_eps = 1.0;
  std::optional<double> fixed_mu;
  int threads = 0;
  bool no_timings = false;
};

/// Runs the Monte Carlo grid and appends one metrics row per
/// (method, n, p, tau0) cell; per-replicate JSON lines go to log_out when
/// given.
void run_simulate(const SimulateCommandOptions& options, std::ostream& csv_out,
                  std::ostream* log_out = nullptr);

struct BenchCommandOptions {
  int n = 150;
  int p = 25;
  double tau0 = 0.5;
  int replications = 3;
  std::uint64_t seed = 1;
  int threads = 0;
  bool no_timings = false;
};

/// Times algo1A against the full grid search on identical seeded datasets.
void run_bench(const BenchCommandOptions& options, std::ostream& out);

}  // namespace cpreg
