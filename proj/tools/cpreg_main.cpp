#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cpreg/cli.hpp"

namespace {

std::optional<double> parse_tau0(const std::string& text) {
  if (text == "none") return std::nullopt;
  return std::stod(text);
}

std::ofstream open_or_die(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CLI::ValidationError("cannot open output file: " + path);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change point regression: two step l1/l0 estimator, grid search baseline, "
               "and Monte Carlo harness"};
  app.require_subcommand(1);

  // ---- fit ----------------------------------------------------------------
  std::string fit_csv;
  std::string fit_out;
  std::string fit_scheme = "A";
  double fit_mu = 0.0;
  bool fit_mu_set = false;
  bool fit_standardize = false;
  double fit_drop_corr = 0.0;
  bool fit_drop_corr_set = false;
  std::uint64_t fit_seed = 0;
  int fit_folds = 5;
  bool fit_no_timings = false;

  CLI::App* fit = app.add_subcommand("fit", "Fit the change point model to a CSV file");
  fit->add_option("csv", fit_csv, "input CSV with 'y' and 'w' columns")->required();
  fit->add_option("-o,--output", fit_out, "write the JSON report here (default: stdout)");
  fit->add_option("--scheme", fit_scheme, "initializer scheme: A (median) or B (quartiles)")
      ->check(CLI::IsMember({"A", "B"}));
  fit->add_option("--mu", fit_mu, "fixed step-1 penalty (default: BIC selection)")
      ->each([&](const std::string&) { fit_mu_set = true; });
  fit->add_flag("--standardize", fit_standardize, "center and unit-scale y and X columns");
  fit->add_option("--drop-correlated", fit_drop_corr,
                  "drop predictors with |correlation with w| above this")
      ->each([&](const std::string&) { fit_drop_corr_set = true; });
  fit->add_option("--seed", fit_seed, "seed for cross validation folds");
  fit->add_option("--folds", fit_folds, "cross validation folds")->check(CLI::Range(2, 100));
  fit->add_flag("--no-timings", fit_no_timings, "zero timing fields (byte-stable output)");

  // ---- simulate -----------------------------------------------------------
  std::vector<int> sim_n = {150};
  std::vector<int> sim_p = {25};
  std::vector<std::string> sim_tau0 = {"0.5"};
  std::vector<std::string> sim_methods = {"algo1A"};
  int sim_reps = 100;
  std::uint64_t sim_seed = 1;
  double sim_rho = 0.5;
  double sim_sigma = 1.0;
  double sim_mu = 0.0;
  bool sim_mu_set = false;
  int sim_threads = 0;
  bool sim_no_timings = false;
  std::string sim_out;
  std::string sim_log;

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo metrics over a design grid");
  simulate->add_option("--n", sim_n, "sample sizes")->delimiter(',');
  simulate->add_option("--p", sim_p, "predictor counts")->delimiter(',');
  simulate->add_option("--tau0", sim_tau0, "true thresholds in (0,1), or 'none'")
      ->delimiter(',');
  simulate->add_option("--methods,--method", sim_methods, "algo1A, algo1B, full_grid")
      ->delimiter(',')
      ->check(CLI::IsMember({"algo1A", "algo1B", "full_grid"}));
  simulate->add_option("--reps", sim_reps, "replications per cell")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "base seed");
  simulate->add_option("--rho", sim_rho, "AR(1) design correlation")
      ->check(CLI::Range(-0.999, 0.999));
  simulate->add_option("--sigma", sim_sigma, "noise standard deviation")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--mu", sim_mu, "fixed step-1 penalty (default: BIC selection)")
      ->each([&](const std::string&) { sim_mu_set = true; });
  simulate->add_option("--threads", sim_threads, "worker threads (0: all cores)");
  simulate->add_flag("--no-timings", sim_no_timings, "zero the time column");
  simulate->add_option("-o,--output", sim_out, "metrics CSV path (default: stdout)");
  simulate->add_option("--log", sim_log, "per-replicate JSON-lines log path");

  // ---- bench --------------------------------------------------------------
  cpreg::BenchCommandOptions bench_options;
  std::string bench_out;
  CLI::App* bench = app.add_subcommand("bench", "Time algo1A against the full grid search");
  bench->add_option("--n", bench_options.n, "sample size");
  bench->add_option("--p", bench_options.p, "predictor count");
  bench->add_option("--tau0", bench_options.tau0, "true threshold")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--reps", bench_options.replications, "replications")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_options.seed, "base seed");
  bench->add_option("--threads", bench_options.threads, "worker threads (0: all cores)");
  bench->add_flag("--no-timings", bench_options.no_timings, "zero the timing columns");
  bench->add_option("-o,--output", bench_out, "CSV path (default: stdout)");

  // ---- export -------------------------------------------------------------
  int exp_n = 150;
  int exp_p = 25;
  std::string exp_tau0 = "0.5";
  double exp_rho = 0.5;
  double exp_sigma = 1.0;
  std::uint64_t exp_seed = 1;
  int exp_rep = 0;
  std::string exp_out;
  CLI::App* exp = app.add_subcommand("export", "Write one simulated dataset as CSV");
  exp->add_option("--n", exp_n, "sample size");
  exp->add_option("--p", exp_p, "predictor count");
  exp->add_option("--tau0", exp_tau0, "true threshold in (0,1), or 'none'");
  exp->add_option("--rho", exp_rho, "AR(1) design correlation");
  exp->add_option("--sigma", exp_sigma, "noise standard deviation");
  exp->add_option("--seed", exp_seed, "base seed");
  exp->add_option("--rep", exp_rep, "replicate index");
  exp->add_option("-o,--output", exp_out, "CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      cpreg::FitCommandOptions options;
      options.scheme = fit_scheme == "A" ? cpreg::InitScheme::A : cpreg::InitScheme::B;
      if (fit_mu_set) options.fixed_mu = fit_mu;
      options.standardize = fit_standardize;
      if (fit_drop_corr_set) options.drop_correlated = fit_drop_corr;
      options.seed = fit_seed;
      options.k_folds = fit_folds;
      options.no_timings = fit_no_timings;
      const nlohmann::json report = cpreg::run_fit_file(fit_csv, options);
      if (fit_out.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        open_or_die(fit_out) << report.dump(2) << '\n';
      }
    } else if (simulate->parsed()) {
      cpreg::SimulateCommandOptions options;
      options.n_values = sim_n;
      options.p_values = sim_p;
      options.tau0_values.clear();
      for (const std::string& t : sim_tau0) options.tau0_values.push_back(parse_tau0(t));
      options.methods.clear();
      for (const std::string& m : sim_methods) {
        options.methods.push_back(cpreg::method_from_name(m));
      }
      options.replications = sim_reps;
      options.seed = sim_seed;
      options.rho = sim_rho;
      options.sigma_eps = sim_sigma;
      if (sim_mu_set) options.fixed_mu = sim_mu;
      options.threads = sim_threads;
      options.no_timings = sim_no_timings;

      std::ofstream log_file;
      std::ostream* log = nullptr;
      if (!sim_log.empty()) {
        log_file = open_or_die(sim_log);
        log = &log_file;
      }
      if (sim_out.empty()) {
        cpreg::run_simulate(options, std::cout, log);
      } else {
        std::ofstream out = open_or_die(sim_out);
        cpreg::run_simulate(options, out, log);
      }
    } else if (bench->parsed()) {
      if (bench_out.empty()) {
        cpreg::run_bench(bench_options, std::cout);
      } else {
        std::ofstream out = open_or_die(bench_out);
        cpreg::run_bench(bench_options, out);
      }
    } else if (exp->parsed()) {
      cpreg::SimulationConfig config;
      config.n = exp_n;
      config.p = exp_p;
      config.tau0 = parse_tau0(exp_tau0);
      config.rho = exp_rho;
      config.sigma_eps = exp_sigma;
      config.base_seed = exp_seed;
      const cpreg::Dataset data = cpreg::generate_dataset(config, exp_rep);
      if (exp_out.empty()) {
        cpreg::write_dataset_csv(std::cout, data);
      } else {
        std::ofstream out = open_or_die(exp_out);
        cpreg::write_dataset_csv(out, data);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
