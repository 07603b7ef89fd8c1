#include "atomslab/atoms.hpp"
#include "atomslab/duel.hpp"
#include "atomslab/gapscan.hpp"
#include "atomslab/harness.hpp"
#include "atomslab/panel.hpp"
#include "atomslab/synth.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int run_backtest_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                         std::optional<std::string> out,
                         std::optional<std::size_t> max_lookback) {
  atomslab::RunConfig config = atomslab::load_config(config_path);
  if (seed) config.seeds = {*seed};
  if (out) config.output_dir = *out;
  if (max_lookback) {
    config.max_lookback = *max_lookback;
    std::cerr << "note: scan capped at max_lookback = " << *max_lookback << '\n';
  }
  const atomslab::BacktestReport report = atomslab::run_backtest(config);
  atomslab::emit(report, config.output_dir);
  std::cout << "wrote report to " << config.output_dir << " (" << report.selectors.size()
            << " selectors, seeds " << report.seeds.size() << ", periods "
            << report.first_prediction_period << ".." << report.last_period << ")\n";
  for (const auto& sel : report.selectors)
    std::cout << "  " << sel.name << ": r2_zero mean " << sel.r2_zero.mean << '\n';
  return 0;
}

int run_simulate_command(const atomslab::synth::DriftEnv& env, int periods,
                         const std::string& out) {
  const atomslab::Panel panel = atomslab::synth::generate(env, periods);
  atomslab::save_csv(panel, out);
  std::cout << "wrote " << out << " (" << panel.period_count() << " periods, "
            << env.samples_per_period << " obs/period)\n";
  return 0;
}

int run_duel_command(const std::string& config_path, std::size_t f1, std::size_t f2, int t,
                     std::uint64_t seed, const std::string& metric,
                     std::optional<std::size_t> max_lookback) {
  const atomslab::RunConfig config = atomslab::load_config(config_path);
  atomslab::Panel panel;
  if (config.csv)
    panel = atomslab::load_csv(config.csv->path, config.csv->schema);
  else if (config.synth_env)
    panel = atomslab::synth::generate(config.synth_env->env, config.synth_env->periods);
  else
    throw std::runtime_error("config has no data source");

  if (t < 2 || t > panel.period_count())
    throw std::runtime_error("t must lie in [2, " + std::to_string(panel.period_count()) + "]");

  const atomslab::SplitPanel splits = atomslab::split(panel, config.train_fraction, seed);
  const auto grid = atomslab::build_candidate_grid(t, splits, config.grid);
  if (f1 >= grid.size() || f2 >= grid.size())
    throw std::runtime_error("candidate index out of range; grid has " +
                             std::to_string(grid.size()) + " candidates");

  atomslab::ComparisonConfig cmp;
  cmp.max_lookback = max_lookback ? max_lookback : config.max_lookback;
  atomslab::DuelOutcome outcome;
  if (metric == "mse") {
    outcome = atomslab::duel_mse(grid[f1], grid[f2], splits, t, cmp, f1, f2);
  } else if (metric == "r2") {
    cmp.m_squared = 5.0;
    const auto moments = atomslab::validation_second_moments(splits, t);
    outcome = atomslab::duel_r2(grid[f1], grid[f2], splits, moments, t, cmp, f1, f2);
  } else {
    throw std::runtime_error("metric must be 'mse' or 'r2'");
  }

  std::cout << "f1 = [" << f1 << "] " << grid[f1].spec.describe_full() << "\n"
            << "f2 = [" << f2 << "] " << grid[f2].spec.describe_full() << "\n";
  atomslab::write_scan_csv(std::cout, outcome.scan);
  std::cout << "chosen ell = " << outcome.chosen_window
            << ", delta_hat = " << outcome.delta_hat_at_choice << ", winner = ["
            << outcome.winner << "] " << grid[outcome.winner].spec.describe_full() << '\n';
  return 0;
}

int run_complexity_command(const std::string& lambda_list, std::size_t trials,
                           std::uint64_t seed) {
  std::vector<std::size_t> lambdas;
  std::stringstream ss(lambda_list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    lambdas.push_back(static_cast<std::size_t>(std::stoull(token)));
  }
  if (lambdas.empty()) throw std::runtime_error("--lambda-list must name at least one size");

  std::cout << "lambda,mean_comparisons\n";
  for (const std::size_t lambda : lambdas) {
    const double mean = atomslab::measure_tournament_complexity(lambda, trials, seed);
    std::cout << lambda << ',' << mean << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive tournament model selection under distribution drift"};
  app.require_subcommand(1);

  // backtest
  auto* backtest = app.add_subcommand("backtest", "Run a walk-forward backtest from a config");
  std::string config_path;
  backtest->add_option("--config", config_path, "JSON run configuration")->required();
  std::optional<std::uint64_t> seed_override;
  backtest->add_option("--seed", seed_override, "Replace the config's seed list");
  std::optional<std::string> out_override;
  backtest->add_option("--out", out_override, "Override the output directory");
  std::optional<std::size_t> lookback_override;
  backtest->add_option("--max-lookback", lookback_override, "Cap the scanned windows");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic drift panel as CSV");
  std::string kind = "zigzag_linear_sine";
  simulate->add_option("--kind", kind,
                       "zigzag_linear_sine | piecewise_regime | stationary");
  atomslab::synth::DriftEnv env;
  int periods = 100;
  std::string sim_out = "panel.csv";
  simulate->add_option("--eta", env.eta, "Drift step per period");
  simulate->add_option("--gamma", env.gamma, "Sine misspecification amplitude");
  simulate->add_option("--noise-sd", env.noise_sd, "Noise standard deviation");
  simulate->add_option("--samples-per-period", env.samples_per_period, "Observations per period");
  simulate->add_option("--periods", periods, "Number of periods");
  simulate->add_option("--seed", env.seed, "Generator seed");
  simulate->add_option("--change-point", env.change_points,
                       "Regime change points (piecewise_regime)");
  simulate->add_option("--out", sim_out, "Output CSV path");

  // duel
  auto* duel = app.add_subcommand("duel", "Scan and compare two grid candidates at period t");
  std::string duel_config;
  duel->add_option("--config", duel_config, "JSON run configuration")->required();
  std::size_t f1 = 0, f2 = 0;
  duel->add_option("--f1", f1, "First candidate index (the pivot)")->required();
  duel->add_option("--f2", f2, "Second candidate index")->required();
  int duel_t = 0;
  duel->add_option("--t", duel_t, "Comparison period")->required();
  std::uint64_t duel_seed = 0;
  duel->add_option("--seed", duel_seed, "Split seed");
  std::string metric = "mse";
  duel->add_option("--metric", metric, "mse | r2");
  std::optional<std::size_t> duel_lookback;
  duel->add_option("--max-lookback", duel_lookback, "Cap the scanned windows");

  // complexity
  auto* complexity = app.add_subcommand("complexity", "Measure mean tournament comparisons");
  std::string lambda_list;
  complexity->add_option("--lambda-list", lambda_list, "Comma-separated candidate counts")
      ->required();
  std::size_t trials = 200;
  complexity->add_option("--trials", trials, "Trials per candidate count");
  std::uint64_t complexity_seed = 0;
  complexity->add_option("--seed", complexity_seed, "Trial seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (backtest->parsed())
      return run_backtest_command(config_path, seed_override, out_override, lookback_override);
    if (simulate->parsed()) {
      env.kind = [&] {
        if (kind == "zigzag_linear_sine") return atomslab::synth::DriftKind::ZigzagLinearSine;
        if (kind == "piecewise_regime") return atomslab::synth::DriftKind::PiecewiseRegime;
        if (kind == "stationary") return atomslab::synth::DriftKind::Stationary;
        throw std::runtime_error("unknown kind: " + kind);
      }();
      return run_simulate_command(env, periods, sim_out);
    }
    if (duel->parsed())
      return run_duel_command(duel_config, f1, f2, duel_t, duel_seed, metric, duel_lookback);
    if (complexity->parsed())
      return run_complexity_command(lambda_list, trials, complexity_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
