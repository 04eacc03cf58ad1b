#include "cpreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cpreg {

using nlohmann::json;

CorrelationFilter drop_correlated_predictors(const NamedDataset& input, double threshold) {
  const Dataset& data = input.data;
  const Index n = data.n();
  const VectorXd w_centered = data.w.array() - data.w.mean();
  const double w_norm = w_centered.norm();
  if (w_norm == 0.0) {
    throw std::invalid_argument("fit: change covariate w is constant");
  }

  std::vector<Index> kept_cols;
  std::vector<std::string> dropped;
  for (Index j = 0; j < data.p(); ++j) {
    const VectorXd x_centered = data.X.col(j).array() - data.X.col(j).mean();
    const double x_norm = x_centered.norm();
    const double corr = x_norm == 0.0 ? 0.0 : w_centered.dot(x_centered) / (w_norm * x_norm);
    if (std::abs(corr) > threshold) {
      dropped.push_back(input.predictor_names[static_cast<size_t>(j)]);
    } else {
      kept_cols.push_back(j);
    }
  }
  if (kept_cols.empty()) {
    throw std::invalid_argument("fit: --drop-correlated removed every predictor");
  }

  MatrixXd X(n, static_cast<Index>(kept_cols.size()));
  std::vector<std::string> names;
  for (size_t c = 0; c < kept_cols.size(); ++c) {
    X.col(static_cast<Index>(c)) = data.X.col(kept_cols[c]);
    names.push_back(input.predictor_names[static_cast<size_t>(kept_cols[c])]);
  }
  return CorrelationFilter{NamedDataset{Dataset(data.y, std::move(X), data.w), std::move(names)},
                           std::move(dropped)};
}

json build_fit_report(const TwoStepFit& fit, const Dataset& data,
                      const std::vector<std::string>& predictor_names,
                      const std::vector<std::string>& dropped_columns, bool no_timings) {
  json report;
  report["schema_version"] = kFitReportSchemaVersion;
  report["no_change"] = !fit.tau.finite;
  if (fit.tau.finite) {
    report["tau_hat"] = fit.tau.threshold;
    report["tau_hat_quantile"] =
        static_cast<double>(fit.tau.grid_index + 1) / static_cast<double>(data.n());
  } else {
    report["tau_hat"] = nullptr;
    report["tau_hat_quantile"] = nullptr;
  }

  auto nonzero_map = [&](const VectorXd& coef) {
    json map = json::object();
    for (Index j = 0; j < coef.size(); ++j) {
      if (coef[j] != 0.0) {
        const std::string name = static_cast<size_t>(j) < predictor_names.size()
                                     ? predictor_names[static_cast<size_t>(j)]
                                     : "x" + std::to_string(j + 1);
        map[name] = coef[j];
      }
    }
    return map;
  };
  if (fit.tau.finite) {
    report["beta"] = nonzero_map(fit.coefficients.beta);
  } else {
    report["beta"] = json::object();  // single-regime report carries gamma only
  }
  report["gamma"] = nonzero_map(fit.coefficients.gamma);

  report["lambda1"] = fit.lambda1;
  report["lambda2"] = fit.lambda2;
  report["mu"] = fit.mu;
  report["initializer"] = fit.initializer_used;
  report["converged"] = fit.converged;
  report["timings"] = {
      {"step0", no_timings ? 0.0 : fit.wall_time_step[0]},
      {"step1", no_timings ? 0.0 : fit.wall_time_step[1]},
      {"step2", no_timings ? 0.0 : fit.wall_time_step[2]},
  };
  report["dropped_columns"] = dropped_columns;
  return report;
}

json run_fit(const NamedDataset& input, const FitCommandOptions& options) {
  const VectorXd w_centered = input.data.w.array() - input.data.w.mean();
  if (w_centered.norm() == 0.0) {
    throw std::invalid_argument("fit: change covariate w is constant");
  }

  const NamedDataset* working = &input;
  std::optional<CorrelationFilter> filter;
  std::vector<std::string> dropped;
  if (options.drop_correlated.has_value()) {
    filter.emplace(drop_correlated_predictors(input, *options.drop_correlated));
    working = &filter->filtered;
    dropped = filter->dropped;
  }

  AlgorithmConfig config;
  config.scheme = options.scheme;
  config.k_folds = options.k_folds;
  config.fixed_mu = options.fixed_mu;
  config.seed = options.seed;
  config.standardize = options.standardize;
  const TwoStepFit fit = run_algorithm1(working->data, config);
  return build_fit_report(fit, working->data, working->predictor_names, dropped,
                          options.no_timings);
}

json run_fit_file(const std::string& csv_path, const FitCommandOptions& options) {
  return run_fit(dataset_from_csv(read_csv_file(csv_path)), options);
}

namespace {

json replicate_log_entry(const MetricsRow& row, const ReplicateResult& rep, bool no_timings) {
  json entry;
  entry["method"] = row.method;
  entry["n"] = row.n;
  entry["p"] = row.p;
  if (row.tau0.has_value()) {
    entry["tau0"] = *row.tau0;
  } else {
    entry["tau0"] = nullptr;
  }
  entry["rep"] = rep.rep;
  entry["ok"] = rep.ok;
  if (!rep.ok) {
    entry["error"] = rep.error;
    return entry;
  }
  entry["no_change"] = rep.detected_no_change;
  entry["adjusted"] = rep.adjusted;
  entry["tau_hat"] = rep.tau_value;
  entry["time"] = no_timings ? 0.0 : rep.seconds;
  return entry;
}

}  // namespace

void run_simulate(const SimulateCommandOptions& options, std::ostream& csv_out,
                  std::ostream* log_out) {
  if (options.replications < 1) {
    throw std::invalid_argument("simulate: replications must be >= 1");
  }
  csv_out << metrics_csv_header() << '\n';
  for (Method method : options.methods) {
    for (int n : options.n_values) {
      for (int p : options.p_values) {
        for (const std::optional<double>& tau0 : options.tau0_values) {
          if (!tau0.has_value() && method == Method::full_grid) {
            throw std::invalid_argument(
                "simulate: the full grid baseline cannot run a no-change design");
          }
          SimulationConfig config;
          config.n = n;
          config.p = p;
          config.tau0 = tau0;
          config.rho = options.rho;
          config.sigma_eps = options.sigma_eps;
          config.replications = options.replications;
          config.base_seed = options.seed;
          config.method = method;
          config.fixed_mu = options.fixed_mu;
          config.threads = options.threads;
          const MonteCarloOutput output = run_monte_carlo(config);
          csv_out << metrics_csv_line(output.metrics, options.no_timings) << '\n';
          if (log_out != nullptr) {
            for (const ReplicateResult& rep : output.replicates) {
              *log_out << replicate_log_entry(output.metrics, rep, options.no_timings).dump()
                       << '\n';
            }
          }
        }
      }
    }
  }
}

void run_bench(const BenchCommandOptions& options, std::ostream& out) {
  SimulationConfig config;
  config.n = options.n;
  config.p = options.p;
  config.tau0 = options.tau0;
  config.replications = options.replications;
  config.base_seed = options.seed;
  config.threads = options.threads;

  config.method = Method::algo1A;
  const MonteCarloOutput algo = run_monte_carlo(config);
  config.method = Method::full_grid;
  const MonteCarloOutput grid = run_monte_carlo(config);

  long algo_pair_fits = 0;
  long grid_solves = 0;
  for (const ReplicateResult& rep : algo.replicates) algo_pair_fits += rep.counters.pair_fits;
  for (const ReplicateResult& rep : grid.replicates) {
    grid_solves += rep.counters.grid_candidate_solves;
  }

  const double t_algo = algo.metrics.mean_time_seconds;
  const double t_grid = grid.metrics.mean_time_seconds;
  const double ratio = t_algo > 0.0 ? t_grid / t_algo : 0.0;

  char line[256];
  out << "n,p,tau0,reps,time_algo1A,time_full_grid,ratio,algo1A_pair_fits,"
         "full_grid_candidate_solves\n";
  std::snprintf(line, sizeof(line), "%d,%d,%.10g,%d,%.10g,%.10g,%.10g,%ld,%ld\n", options.n,
                options.p, options.tau0, options.replications,
                options.no_timings ? 0.0 : t_algo, options.no_timings ? 0.0 : t_grid,
                options.no_timings ? 0.0 : ratio, algo_pair_fits, grid_solves);
  out << line;
}

}  // namespace cpreg
