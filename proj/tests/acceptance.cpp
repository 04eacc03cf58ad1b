// Acceptance suite: end-to-end checks of the estimator against its
// published behavior, one pass/fail line per criterion. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cpreg/changepoint.hpp"
#include "cpreg/grid_search.hpp"
#include "cpreg/lasso.hpp"
#include "cpreg/simulation.hpp"
#include "cpreg/two_step.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cpreg;
using namespace cpreg::testing;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %s (%s)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, ...) {
  char buffer[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buffer, sizeof(buffer), f, args);
  va_end(args);
  return buffer;
}

// ---- criterion 1: step-1 sweep vs from-scratch enumeration ---------------
void criterion1() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8101);
  int mismatches = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const Index n = 5 + static_cast<Index>(rng() % 46);
    const Index p = 1 + static_cast<Index>(rng() % 10);
    const Dataset data = random_dataset(rng, n, p);
    const RegressionPair pair(random_vector(rng, p), random_vector(rng, p));
    std::uniform_real_distribution<double> mu_dist(1e-4, 3.0);
    const double mu = mu_dist(rng);

    const Step1Result fast = step1_optimize(data, pair, mu);
    const BruteForceStep1 slow = brute_force_step1(data, pair.beta, pair.gamma, mu);
    const bool same = fast.tau.finite == slow.finite &&
                      (!fast.tau.finite || fast.tau.threshold == slow.threshold);
    if (!same) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  report("criterion 1: step-1 oracle equivalence (200 instances)",
         mismatches == 0 && elapsed < 10.0,
         fmt("mismatches=%d, %.1fs (budget 10s)", mismatches, elapsed));
}

// ---- criterion 2: lasso KKT and proximal-gradient objective agreement ----
void criterion2() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8102);
  int kkt_violations = 0;
  int objective_gaps = 0;
  double worst_gap = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const Index n = 30 + static_cast<Index>(rng() % 171);   // up to 200
    const Index p = 10 + static_cast<Index>(rng() % 291);   // up to 300
    const MatrixXd X = random_matrix(rng, n, p);
    const VectorXd y =
        X * sparse_coefficients(rng, p, std::min<Index>(p, 5)) + 0.5 * random_vector(rng, n);
    const VectorXd path = lambda_path(X, y, static_cast<double>(n), 20, 1e-2);
    const double lambda = path[instance % 20];

    const LassoSolution cd = fit_lasso(LassoProblem{X, y, n, lambda});
    if (!cd.converged || cd.kkt_residual > 1e-6) ++kkt_violations;
    if (kkt_residual(X, y, static_cast<double>(n), lambda, cd.beta) > 1e-6) ++kkt_violations;

    const ProximalResult oracle =
        proximal_gradient_lasso(X, y, static_cast<double>(n), lambda, 1e-10);
    const double cd_objective =
        lasso_objective(X, y, static_cast<double>(n), lambda, cd.beta);
    const double gap = std::abs(cd_objective - oracle.objective);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-8 * std::max(1.0, std::abs(oracle.objective))) ++objective_gaps;
  }
  const double elapsed = seconds_since(start);
  report("criterion 2: lasso KKT + proximal oracle (100 instances)",
         kkt_violations == 0 && objective_gaps == 0 && elapsed < 60.0,
         fmt("kkt violations=%d, objective gaps=%d, worst=%.2e, %.1fs (budget 60s)",
             kkt_violations, objective_gaps, worst_gap, elapsed));
}

// ---- criterion 3: step-function property on a fine grid ------------------
void criterion3() {
  std::mt19937_64 rng(8103);
  bool ok = true;
  std::string detail = "all 20 instances clean";
  for (int instance = 0; instance < 20 && ok; ++instance) {
    const Index n = 5 + static_cast<Index>(rng() % 36);
    const Index p = 1 + static_cast<Index>(rng() % 8);
    const Dataset data = random_dataset(rng, n, p);
    const RegressionPair pair(random_vector(rng, p), random_vector(rng, p));
    std::uniform_real_distribution<double> mu_dist(0.01, 1.0);
    const double mu = mu_dist(rng);
    const double w_min = data.w.minCoeff();

    std::set<double> distinct;
    size_t n_distinct_w = 0;
    {
      std::set<double> values(data.w.data(), data.w.data() + n);
      n_distinct_w = values.size();
    }
    double previous = 0.0;
    for (int g = 0; g <= 10000; ++g) {
      const double tau = static_cast<double>(g) / 10000.0;
      const double value =
          direct_loss(data, pair.beta, pair.gamma, true, tau) + (tau >= w_min ? mu : 0.0);
      distinct.insert(value);
      if (g > 0 && value != previous) {
        const double lo = static_cast<double>(g - 1) / 10000.0;
        bool straddles = false;
        for (Index i = 0; i < n; ++i) {
          if (data.w[i] > lo && data.w[i] <= tau) straddles = true;
        }
        if (!straddles) {
          ok = false;
          detail = fmt("instance %d: jump without an observation in (%.4f, %.4f]", instance,
                       lo, tau);
        }
      }
      previous = value;
    }
    if (distinct.size() > n_distinct_w + 1) {
      ok = false;
      detail = fmt("instance %d: %zu distinct values > n_distinct+1 = %zu", instance,
                   distinct.size(), n_distinct_w + 1);
    }
  }
  report("criterion 3: step-function property (20 instances, 10^4-point grid)", ok, detail);
}

// ---- criterion 4: no-change detection rates -------------------------------
void criterion4() {
  const auto start = std::chrono::steady_clock::now();
  double prm_anchor = 0.0;
  int trend_hits = 0;
  for (int group = 0; group < 5; ++group) {
    SimulationConfig config;
    config.p = 25;
    config.tau0 = std::nullopt;
    config.replications = 100;
    config.base_seed = 9001 + static_cast<std::uint64_t>(group);
    config.method = Method::algo1A;

    config.n = 150;
    const double prm_150 = run_monte_carlo(config).metrics.prm;
    config.n = 350;
    const double prm_350 = run_monte_carlo(config).metrics.prm;
    if (prm_350 >= prm_150) ++trend_hits;
    if (group == 0) prm_anchor = prm_150;
  }
  const bool in_band = prm_anchor >= 0.64 && prm_anchor <= 0.88;
  const bool trend = trend_hits >= 3;
  report("criterion 4: no-change detection",
         in_band && trend,
         fmt("PrM(n=150,p=25)=%.2f (band 0.64..0.88), trend hits %d/5, %.0fs", prm_anchor,
             trend_hits, seconds_since(start)));
}

// ---- criterion 5: simulation A reproduction at desk scale ----------------
void criterion5() {
  const auto start = std::chrono::steady_clock::now();
  SimulationConfig config;
  config.n = 250;
  config.p = 25;
  config.tau0 = 0.169;
  config.replications = 100;
  config.base_seed = 9101;

  config.method = Method::algo1A;
  const MetricsRow algo = run_monte_carlo(config).metrics;
  config.method = Method::full_grid;
  const MetricsRow grid = run_monte_carlo(config).metrics;

  const bool mse_ok = algo.mse_tau <= 0.001;
  const bool bias_ok = algo.bias_beta >= 0.4354 / 2.0 && algo.bias_beta <= 0.4354 * 2.0;
  const bool cross_ok = std::abs(algo.bias_tau - grid.bias_tau) <= 0.02;
  report("criterion 5: simulation A reproduction (n=250, p=25, tau0=0.169)",
         mse_ok && bias_ok && cross_ok,
         fmt("mse_tau=%.5f (<=0.001), bias_beta=%.3f (0.218..0.871), |bias_tau gap|=%.4f "
             "(<=0.02), %.0fs",
             algo.mse_tau, algo.bias_beta, std::abs(algo.bias_tau - grid.bias_tau),
             seconds_since(start)));
}

// ---- criterion 6: consistency trend ---------------------------------------
void criterion6() {
  const auto start = std::chrono::steady_clock::now();
  int hits = 0;
  for (int group = 0; group < 5; ++group) {
    SimulationConfig config;
    config.p = 25;
    config.tau0 = 0.264;
    config.replications = 100;
    config.base_seed = 9201 + static_cast<std::uint64_t>(group);
    config.method = Method::algo1A;

    config.n = 150;
    const double mse_150 = run_monte_carlo(config).metrics.mse_tau;
    config.n = 350;
    const double mse_350 = run_monte_carlo(config).metrics.mse_tau;
    if (mse_350 < mse_150) ++hits;
  }
  report("criterion 6: consistency trend (tau0=0.264, p=25)", hits >= 4,
         fmt("mse(n=350) < mse(n=150) in %d/5 seed groups, %.0fs", hits,
             seconds_since(start)));
}

// ---- criterion 7: initializer insensitivity --------------------------------
void criterion7() {
  const auto start = std::chrono::steady_clock::now();
  int same_interval = 0;
  double bias_a = 0.0;
  double bias_b = 0.0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    SimulationConfig sim;
    sim.n = 350;
    sim.p = 25;
    sim.tau0 = 0.169;
    sim.base_seed = 9301;
    const Dataset data = generate_dataset(sim, rep);

    AlgorithmConfig config;
    config.seed = replicate_seed(9301, rep);
    config.scheme = InitScheme::A;
    const TwoStepFit a = run_algorithm1(data, config);
    config.scheme = InitScheme::B;
    const TwoStepFit b = run_algorithm1(data, config);

    if (a.tau.finite == b.tau.finite &&
        (!a.tau.finite || a.tau.threshold == b.tau.threshold)) {
      ++same_interval;
    }
    const double ta = a.tau.finite ? a.tau.threshold : 0.0;  // boundary rule, tau0 < 0.5
    const double tb = b.tau.finite ? b.tau.threshold : 0.0;
    bias_a += ta - 0.169;
    bias_b += tb - 0.169;
  }
  const double agreement = static_cast<double>(same_interval) / reps;
  const double bias_gap = std::abs(bias_a / reps - bias_b / reps);
  const bool interval_ok = agreement >= 0.9;
  const bool bias_ok = bias_gap < 0.01;
  report("criterion 7a: schemes A/B same inter-observation interval >= 90%", interval_ok,
         fmt("agreement=%.0f%% (%d/%d); unattainable at the estimator's own grid scatter, "
             "see ledger",
             100.0 * agreement, same_interval, reps));
  report("criterion 7b: |bias_tau(A) - bias_tau(B)| < 0.01", bias_ok,
         fmt("gap=%.4f, %.0fs", bias_gap, seconds_since(start)));
}

// ---- criterion 8: cost and timing contract ---------------------------------
void criterion8() {
  const auto start = std::chrono::steady_clock::now();

  // instrumented counts at a small size: exactly 2 CV'd pair fits for
  // algo1A with fixed mu, |T*| grid solves for the baseline
  {
    SimulationConfig sim;
    sim.n = 150;
    sim.p = 25;
    sim.tau0 = 0.5;
    sim.base_seed = 9401;
    const Dataset data = generate_dataset(sim, 0);

    AlgorithmConfig config;
    config.fixed_mu = 0.05;
    config.seed = 1;
    const TwoStepFit fit = run_algorithm1(data, config);
    const bool pair_fits_ok = fit.tau.finite && fit.counters.pair_fits == 2 &&
                              fit.counters.final_path_solves == 4;

    SolveCounters counters;
    const GridSearchResult grid = full_grid_search(data, 0.05, {0.1, 0.9}, &counters);
    const bool grid_ok =
        counters.grid_candidate_solves == static_cast<long>(grid.candidates.size());
    report("criterion 8a: instrumented solve counts", pair_fits_ok && grid_ok,
           fmt("algo1A pair_fits=%ld (want 2), path_solves=%ld (want 4); grid solves=%ld == "
               "|T*|=%zu",
               fit.counters.pair_fits, fit.counters.final_path_solves,
               counters.grid_candidate_solves, grid.candidates.size()));
  }

  // wall-time ratio at n=350, p=250
  SimulationConfig config;
  config.n = 350;
  config.p = 250;
  config.tau0 = 0.5;
  config.replications = 2;
  config.base_seed = 9402;
  config.threads = 1;

  config.method = Method::algo1A;
  const double t_algo = run_monte_carlo(config).metrics.mean_time_seconds;
  config.method = Method::full_grid;
  const double t_grid = run_monte_carlo(config).metrics.mean_time_seconds;
  const double ratio = t_grid / t_algo;
  report("criterion 8b: wall-time ratio full_grid/algo1A >= 5 at n=350, p=250", ratio >= 5.0,
         fmt("algo1A %.2fs, full_grid %.2fs, ratio %.1f, total %.0fs", t_algo, t_grid, ratio,
             seconds_since(start)));
}

// ---- criterion 9: byte-identical outputs under a fixed seed ----------------
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void criterion9() {
  const std::string cli = CPREG_CLI_PATH;
  bool ok = true;
  std::string detail = "fit/simulate/bench/export all byte-identical";

  auto run = [&](const std::string& command) {
    const int rc = std::system(command.c_str());
    if (rc != 0) {
      ok = false;
      detail = "command failed: " + command;
    }
  };

  run(cli + " export --n 60 --p 6 --tau0 0.4 --seed 11 -o acc9_data.csv");
  run(cli + " export --n 60 --p 6 --tau0 0.4 --seed 11 -o acc9_data2.csv");
  if (ok && slurp("acc9_data.csv") != slurp("acc9_data2.csv")) {
    ok = false;
    detail = "export outputs differ";
  }

  run(cli + " fit acc9_data.csv --seed 3 --no-timings -o acc9_fit1.json");
  run(cli + " fit acc9_data.csv --seed 3 --no-timings -o acc9_fit2.json");
  if (ok && slurp("acc9_fit1.json") != slurp("acc9_fit2.json")) {
    ok = false;
    detail = "fit reports differ";
  }

  run(cli +
      " simulate --n 60 --p 6 --tau0 0.4,none --methods algo1A --reps 3 --seed 5"
      " --no-timings -o acc9_sim1.csv --log acc9_log1.jsonl");
  run(cli +
      " simulate --n 60 --p 6 --tau0 0.4,none --methods algo1A --reps 3 --seed 5"
      " --no-timings -o acc9_sim2.csv --log acc9_log2.jsonl");
  if (ok && (slurp("acc9_sim1.csv") != slurp("acc9_sim2.csv") ||
             slurp("acc9_log1.jsonl") != slurp("acc9_log2.jsonl"))) {
    ok = false;
    detail = "simulate outputs differ";
  }

  run(cli + " bench --n 60 --p 6 --tau0 0.5 --reps 1 --seed 7 --no-timings -o acc9_b1.csv");
  run(cli + " bench --n 60 --p 6 --tau0 0.5 --reps 1 --seed 7 --no-timings -o acc9_b2.csv");
  if (ok && slurp("acc9_b1.csv") != slurp("acc9_b2.csv")) {
    ok = false;
    detail = "bench outputs differ";
  }

  report("criterion 9: deterministic command outputs", ok, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("================\n%d criterion check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
