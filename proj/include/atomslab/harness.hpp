#pragma once

#include "atomslab/baselines.hpp"
#include "atomslab/gapscan.hpp"
#include "atomslab/metrics.hpp"
#include "atomslab/model_zoo.hpp"
#include "atomslab/panel.hpp"
#include "atomslab/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace atomslab {

struct CsvSource {
  std::string path;
  CsvSchema schema;
};

struct SynthSource {
  synth::DriftEnv env;
  int periods = 0;
};

struct AtomsMseSelector {
  double delta_prime = 0.1;
  double m_squared = 5e-4;
};

struct AtomsR2Selector {
  double delta_prime = 0.1;
  double m_squared = 5.0;
  double v_floor = 1e-8;
};

struct FixedValSelector {
  std::size_t window = 512;
};

struct FixedCvSelector {
  std::size_t window = 36;
  std::size_t folds = 5;
};

using SelectorConfig =
    std::variant<AtomsMseSelector, AtomsR2Selector, FixedValSelector, FixedCvSelector>;

std::string selector_name(const SelectorConfig& selector);
bool is_adaptive(const SelectorConfig& selector); // atoms-type selectors

// Full description of one walk-forward experiment. Loaded from JSON (see
// configs/ for an annotated example).
struct RunConfig {
  std::optional<CsvSource> csv;
  std::optional<SynthSource> synth_env;
  double train_fraction = 0.8;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9,
                                      10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
  bool resplit_each_period = false; // default: one split per run seed
  int warmup = 2;                   // first prediction at period warmup+1
  std::optional<std::size_t> max_lookback;
  std::vector<SelectorConfig> selectors = {AtomsMseSelector{}, FixedValSelector{32},
                                           FixedValSelector{128}, FixedValSelector{512},
                                           FixedCvSelector{}};
  GridConfig grid;
  std::vector<RegimeWindow> regimes;
  std::string output_dir = "out";
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Seed of the randomness consumed by selector `selector_index` at period t
// (tournament pivot order, CV folds). Deriving it from (run seed, period)
// keeps selections stable under history truncation and across selectors.
std::uint64_t selector_period_seed(std::uint64_t run_seed, std::size_t selector_index, int t);

// One selection event, for the audit CSV.
struct SelectionRecord {
  std::uint64_t seed = 0;
  int period = 0;
  std::string selector;
  std::string family;
  std::string hyperparameters;
  int window_exponent = 0;     // -1 for fixed_cv (pooled window, no k)
  std::size_t duel_count = 0;  // 0 for non-tournament selectors
  std::size_t final_window = 0; // last duel's chosen ell, or the validation window used
};

struct MetricSummary {
  double mean = 0.0;
  std::vector<double> per_seed;
};

struct SelectorReport {
  std::string name;
  std::vector<PredictionLog> per_seed_logs;           // index aligned with seeds
  std::vector<std::vector<double>> per_seed_wealth;   // wealth curve per seed
  MetricSummary r2_zero;
  MetricSummary r2_standard;
  MetricSummary final_wealth;
  std::vector<std::pair<std::string, std::optional<MetricSummary>>> annual_r2_zero;
  std::vector<std::pair<std::string, std::optional<MetricSummary>>> annual_r2_standard;
  std::vector<std::pair<std::string, std::optional<MetricSummary>>> regime_r2_zero;
};

struct BacktestReport {
  std::vector<std::uint64_t> seeds;
  int first_prediction_period = 0;
  int last_period = 0;
  std::vector<std::string> panel_labels;
  std::vector<SelectorReport> selectors;
  std::vector<SelectionRecord> selections;
  // adaptive selector -> baseline selector -> mean per-seed excess ratio
  std::map<std::string, std::map<std::string, double>> excess_ratios;
  double wall_seconds = 0.0; // reported in timing.json, never in metrics.json
};

// Walk-forward backtest: per seed, split once (or per period), and for each
// period t in [warmup+1, T] fit the candidate grid on the training side,
// let every selector choose using validation data from periods < t, and
// score all selectors on the full, untouched period-t sample.
BacktestReport run_backtest(const RunConfig& config);
BacktestReport run_backtest(const RunConfig& config, const Panel& panel);

// Deterministic JSON form of the report (excludes timing).
nlohmann::json report_to_json(const BacktestReport& report);

// Writes metrics.json, predictions.csv, selections.csv, wealth.csv,
// timing.json and the SVG charts into outdir. Plot failures degrade to
// warnings on stderr; everything else throws.
void emit(const BacktestReport& report, const std::string& outdir);

} // namespace atomslab
