#include "atomslab/harness.hpp"

#include "atomslab/atoms.hpp"
#include "atomslab/duel.hpp"
#include "atomslab/num_format.hpp"
#include "atomslab/parallel.hpp"
#include "atomslab/rng.hpp"
#include "atomslab/svg_plot.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace atomslab {

namespace {

// Substream tags: selector s at period t draws its randomness (pivot order,
// CV folds) from substream(substream(run_seed, kSelectorTag + s), t); the
// per-period resplit mode uses substream(run_seed, kResplitTag + t).
constexpr std::uint64_t kSelectorTag = 1000;
constexpr std::uint64_t kResplitTag = 2000000;

synth::DriftKind kind_from_string(const std::string& s) {
  if (s == "zigzag_linear_sine") return synth::DriftKind::ZigzagLinearSine;
  if (s == "piecewise_regime") return synth::DriftKind::PiecewiseRegime;
  if (s == "stationary") return synth::DriftKind::Stationary;
  throw std::runtime_error("unknown synth kind: " + s);
}

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

std::string selector_name(const SelectorConfig& selector) {
  if (std::holds_alternative<AtomsMseSelector>(selector)) return "atoms_mse";
  if (std::holds_alternative<AtomsR2Selector>(selector)) return "atoms_r2";
  if (const auto* fv = std::get_if<FixedValSelector>(&selector))
    return "fixed_val_" + std::to_string(fv->window);
  return "fixed_cv";
}

bool is_adaptive(const SelectorConfig& selector) {
  return std::holds_alternative<AtomsMseSelector>(selector) ||
         std::holds_alternative<AtomsR2Selector>(selector);
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig config;

  if (!j.contains("data")) throw std::runtime_error("config error: missing 'data'");
  const auto& data = j.at("data");
  if (data.contains("csv")) {
    CsvSource src;
    src.path = data.at("csv").at("path").get<std::string>();
    src.schema.period_column = data.at("csv").at("period_column").get<std::string>();
    src.schema.target_column = data.at("csv").at("target_column").get<std::string>();
    config.csv = std::move(src);
  } else if (data.contains("synth")) {
    const auto& s = data.at("synth");
    SynthSource src;
    src.env.kind = kind_from_string(s.at("kind").get<std::string>());
    maybe_get(s, "eta", src.env.eta);
    maybe_get(s, "gamma", src.env.gamma);
    maybe_get(s, "noise_sd", src.env.noise_sd);
    maybe_get(s, "samples_per_period", src.env.samples_per_period);
    maybe_get(s, "seed", src.env.seed);
    maybe_get(s, "change_points", src.env.change_points);
    src.periods = s.at("periods").get<int>();
    config.synth_env = std::move(src);
  } else {
    throw std::runtime_error("config error: 'data' needs either 'csv' or 'synth'");
  }

  maybe_get(j, "train_fraction", config.train_fraction);
  maybe_get(j, "seeds", config.seeds);
  maybe_get(j, "resplit_each_period", config.resplit_each_period);
  maybe_get(j, "warmup", config.warmup);
  if (j.contains("max_lookback") && !j.at("max_lookback").is_null())
    config.max_lookback = j.at("max_lookback").get<std::size_t>();
  maybe_get(j, "output_dir", config.output_dir);

  if (j.contains("selectors")) {
    config.selectors.clear();
    for (const auto& s : j.at("selectors")) {
      const std::string type = s.at("type").get<std::string>();
      if (type == "atoms_mse") {
        AtomsMseSelector sel;
        maybe_get(s, "delta_prime", sel.delta_prime);
        maybe_get(s, "m_squared", sel.m_squared);
        config.selectors.emplace_back(sel);
      } else if (type == "atoms_r2") {
        AtomsR2Selector sel;
        maybe_get(s, "delta_prime", sel.delta_prime);
        maybe_get(s, "m_squared", sel.m_squared);
        maybe_get(s, "v_floor", sel.v_floor);
        config.selectors.emplace_back(sel);
      } else if (type == "fixed_val") {
        FixedValSelector sel;
        sel.window = s.at("window").get<std::size_t>();
        config.selectors.emplace_back(sel);
      } else if (type == "fixed_cv") {
        FixedCvSelector sel;
        maybe_get(s, "window", sel.window);
        maybe_get(s, "folds", sel.folds);
        config.selectors.emplace_back(sel);
      } else {
        throw std::runtime_error("config error: unknown selector type '" + type + "'");
      }
    }
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    maybe_get(g, "ridge_alphas", config.grid.ridge_alphas);
    maybe_get(g, "lasso_alphas", config.grid.lasso_alphas);
    maybe_get(g, "enet_alphas", config.grid.enet_alphas);
    maybe_get(g, "enet_ratios", config.grid.enet_ratios);
    maybe_get(g, "forest_trees", config.grid.forest_trees);
    maybe_get(g, "forest_depths", config.grid.forest_depths);
    maybe_get(g, "forest_seed", config.grid.forest_seed);
    maybe_get(g, "window_exponents", config.grid.window_exponents);
  }

  if (j.contains("regimes")) {
    for (const auto& r : j.at("regimes")) {
      RegimeWindow window;
      window.label = r.at("label").get<std::string>();
      window.start = r.at("start").get<int>();
      window.end = r.at("end").get<int>();
      config.regimes.push_back(std::move(window));
    }
  }

  if (config.selectors.empty())
    throw std::runtime_error("config error: at least one selector is required");
  if (config.warmup < 1) throw std::runtime_error("config error: warmup must be >= 1");
  if (config.seeds.empty()) throw std::runtime_error("config error: seeds must be nonempty");
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

std::uint64_t selector_period_seed(std::uint64_t run_seed, std::size_t selector_index, int t) {
  return substream_seed(substream_seed(run_seed, kSelectorTag + selector_index),
                        static_cast<std::uint64_t>(t));
}

namespace {

struct SeedOutput {
  std::vector<PredictionLog> logs; // one per selector
  std::vector<SelectionRecord> selections;
};

std::string hyperparameter_string(const ModelSpec& spec) {
  const std::string full = spec.describe();
  const auto open = full.find('(');
  if (open == std::string::npos) return "";
  return full.substr(open + 1, full.size() - open - 2);
}

SelectionRecord make_record(std::uint64_t seed, int t, const std::string& selector,
                            const ModelSpec& spec, std::size_t duel_count,
                            std::size_t final_window, int window_exponent) {
  SelectionRecord rec;
  rec.seed = seed;
  rec.period = t;
  rec.selector = selector;
  rec.family = family_name(spec.family());
  rec.hyperparameters = hyperparameter_string(spec);
  rec.window_exponent = window_exponent;
  rec.duel_count = duel_count;
  rec.final_window = final_window;
  return rec;
}

SeedOutput simulate_seed(const RunConfig& config, const Panel& panel, std::uint64_t seed) {
  const int total_periods = panel.period_count();
  SeedOutput out;
  out.logs.resize(config.selectors.size());
  for (std::size_t s = 0; s < config.selectors.size(); ++s)
    out.logs[s].algorithm = selector_name(config.selectors[s]);

  SplitPanel splits;
  if (!config.resplit_each_period) splits = split(panel, config.train_fraction, seed);

  const bool needs_r2_moments =
      std::any_of(config.selectors.begin(), config.selectors.end(), [](const auto& s) {
        return std::holds_alternative<AtomsR2Selector>(s);
      });

  for (int t = config.warmup + 1; t <= total_periods; ++t) {
    if (config.resplit_each_period)
      splits = split(panel, config.train_fraction,
                     substream_seed(seed, kResplitTag + static_cast<std::uint64_t>(t)));

    const std::vector<FittedModel> grid = build_candidate_grid(t, splits, config.grid);
    std::vector<double> moments;
    if (needs_r2_moments) moments = validation_second_moments(splits, t);

    for (std::size_t s = 0; s < config.selectors.size(); ++s) {
      const std::string name = selector_name(config.selectors[s]);
      const std::uint64_t period_stream = selector_period_seed(seed, s, t);

      const FittedModel* chosen = nullptr;
      FittedModel cv_model; // keeps the refit alive for prediction
      try {
        if (const auto* atoms_mse = std::get_if<AtomsMseSelector>(&config.selectors[s])) {
          ComparisonConfig cmp;
          cmp.delta_prime = atoms_mse->delta_prime;
          cmp.m_squared = atoms_mse->m_squared;
          cmp.max_lookback = config.max_lookback;
          const DuelFn duel = [&](std::size_t pivot, std::size_t challenger) {
            return duel_mse(grid[pivot], grid[challenger], splits, t, cmp, pivot, challenger,
                            /*keep_scan=*/false);
          };
          const SelectionTrace trace = tournament_select(grid.size(), duel, period_stream);
          chosen = &grid[trace.winner];
          const std::size_t final_window =
              trace.rounds.empty() || trace.rounds.back().duels.empty()
                  ? 0
                  : trace.rounds.back().duels.back().chosen_window;
          out.selections.push_back(make_record(seed, t, name, chosen->spec,
                                               trace.total_comparisons, final_window,
                                               chosen->spec.window_exponent));
        } else if (const auto* atoms_r2 = std::get_if<AtomsR2Selector>(&config.selectors[s])) {
          ComparisonConfig cmp;
          cmp.delta_prime = atoms_r2->delta_prime;
          cmp.m_squared = atoms_r2->m_squared;
          cmp.v_floor = atoms_r2->v_floor;
          cmp.max_lookback = config.max_lookback;
          const DuelFn duel = [&](std::size_t pivot, std::size_t challenger) {
            return duel_r2(grid[pivot], grid[challenger], splits, moments, t, cmp, pivot,
                           challenger, /*keep_scan=*/false);
          };
          const SelectionTrace trace = tournament_select(grid.size(), duel, period_stream);
          chosen = &grid[trace.winner];
          const std::size_t final_window =
              trace.rounds.empty() || trace.rounds.back().duels.empty()
                  ? 0
                  : trace.rounds.back().duels.back().chosen_window;
          out.selections.push_back(make_record(seed, t, name, chosen->spec,
                                               trace.total_comparisons, final_window,
                                               chosen->spec.window_exponent));
        } else if (const auto* fixed = std::get_if<FixedValSelector>(&config.selectors[s])) {
          const BaselineChoice choice = fixed_val(grid, splits, t, fixed->window);
          chosen = &grid[choice.chosen];
          out.selections.push_back(make_record(seed, t, name, chosen->spec, 0,
                                               choice.window_used,
                                               chosen->spec.window_exponent));
        } else {
          const auto& cv = std::get<FixedCvSelector>(config.selectors[s]);
          FixedCvResult result =
              fixed_cv(panel, t, config.grid, cv.folds, period_stream, cv.window);
          cv_model = std::move(result.model);
          chosen = &cv_model;
          out.selections.push_back(make_record(seed, t, name, chosen->spec, 0,
                                               result.choice.window_used, -1));
        }
      } catch (const std::exception& e) {
        throw std::runtime_error("selector '" + name + "' failed at seed " +
                                 std::to_string(seed) + ", period " + std::to_string(t) + ": " +
                                 e.what());
      }

      // Score on the full, untouched period-t sample.
      PeriodPredictions preds;
      preds.period = t;
      const auto& obs = panel.periods[static_cast<std::size_t>(t - 1)].observations;
      preds.y_hat.reserve(obs.size());
      preds.y.reserve(obs.size());
      for (const auto& o : obs) {
        preds.y_hat.push_back(chosen->predict(o.x));
        preds.y.push_back(o.y);
      }
      out.logs[s].periods.push_back(std::move(preds));
    }
  }
  return out;
}

MetricSummary summarize(const std::vector<double>& per_seed) {
  MetricSummary summary;
  summary.per_seed = per_seed;
  double sum = 0.0;
  std::size_t count = 0;
  for (const double v : per_seed) {
    if (std::isnan(v)) continue;
    sum += v;
    ++count;
  }
  summary.mean = count > 0 ? sum / static_cast<double>(count)
                           : std::numeric_limits<double>::quiet_NaN();
  return summary;
}

} // namespace

BacktestReport run_backtest(const RunConfig& config) {
  if (config.csv) {
    const Panel panel = load_csv(config.csv->path, config.csv->schema);
    return run_backtest(config, panel);
  }
  if (config.synth_env) {
    const Panel panel = synth::generate(config.synth_env->env, config.synth_env->periods);
    return run_backtest(config, panel);
  }
  throw std::runtime_error("config error: no data source");
}

BacktestReport run_backtest(const RunConfig& config, const Panel& panel) {
  const auto start_time = std::chrono::steady_clock::now();
  if (config.selectors.empty()) throw std::runtime_error("at least one selector is required");
  if (config.warmup + 1 > panel.period_count())
    throw std::runtime_error("panel too short: warmup " + std::to_string(config.warmup) +
                             " leaves no periods to predict");

  BacktestReport report;
  report.seeds = config.seeds;
  report.first_prediction_period = config.warmup + 1;
  report.last_period = panel.period_count();
  report.panel_labels = panel.labels;

  std::vector<SeedOutput> outputs(config.seeds.size());
  parallel_for(config.seeds.size(), [&](std::size_t i) {
    outputs[i] = simulate_seed(config, panel, config.seeds[i]);
  });

  report.selectors.resize(config.selectors.size());
  for (std::size_t s = 0; s < config.selectors.size(); ++s) {
    SelectorReport& sel = report.selectors[s];
    sel.name = selector_name(config.selectors[s]);
    for (auto& out : outputs) sel.per_seed_logs.push_back(std::move(out.logs[s]));
  }
  for (auto& out : outputs)
    report.selections.insert(report.selections.end(), out.selections.begin(),
                             out.selections.end());

  const RegimeWindow full{"full", report.first_prediction_period, report.last_period};
  for (auto& sel : report.selectors) {
    std::vector<double> r2z, r2s, wealth_final;
    for (const auto& log : sel.per_seed_logs) {
      r2z.push_back(r2_zero(log, full));
      try {
        r2s.push_back(r2_standard(log, full));
      } catch (const std::exception&) {
        r2s.push_back(std::numeric_limits<double>::quiet_NaN());
      }
      try {
        sel.per_seed_wealth.push_back(wealth_curve(log));
        wealth_final.push_back(sel.per_seed_wealth.back().back());
      } catch (const std::exception&) {
        sel.per_seed_wealth.emplace_back();
        wealth_final.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    sel.r2_zero = summarize(r2z);
    sel.r2_standard = summarize(r2s);
    sel.final_wealth = summarize(wealth_final);

    for (const R2Kind kind : {R2Kind::ZeroBenchmark, R2Kind::Standard}) {
      // Year keys are identical across seeds (same periods); align by index.
      const auto first_entries = annual_r2(sel.per_seed_logs.front(), report.panel_labels, kind);
      std::vector<std::vector<double>> per_year(first_entries.size());
      for (const auto& log : sel.per_seed_logs) {
        const auto entries = annual_r2(log, report.panel_labels, kind);
        for (std::size_t y = 0; y < entries.size(); ++y)
          per_year[y].push_back(entries[y].value ? *entries[y].value
                                                 : std::numeric_limits<double>::quiet_NaN());
      }
      auto& target = kind == R2Kind::ZeroBenchmark ? sel.annual_r2_zero : sel.annual_r2_standard;
      for (std::size_t y = 0; y < first_entries.size(); ++y) {
        const MetricSummary summary = summarize(per_year[y]);
        target.emplace_back(first_entries[y].year,
                            std::isnan(summary.mean) ? std::nullopt
                                                     : std::optional<MetricSummary>(summary));
      }
    }

    for (const auto& regime : config.regimes) {
      std::vector<double> values;
      for (const auto& log : sel.per_seed_logs) {
        try {
          values.push_back(r2_zero(log, regime));
        } catch (const std::exception&) {
          values.push_back(std::numeric_limits<double>::quiet_NaN());
        }
      }
      const MetricSummary summary = summarize(values);
      sel.regime_r2_zero.emplace_back(regime.label,
                                      std::isnan(summary.mean)
                                          ? std::nullopt
                                          : std::optional<MetricSummary>(summary));
    }
  }

  for (std::size_t a = 0; a < config.selectors.size(); ++a) {
    if (!is_adaptive(config.selectors[a])) continue;
    for (std::size_t b = 0; b < config.selectors.size(); ++b) {
      if (is_adaptive(config.selectors[b])) continue;
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        const double wa = report.selectors[a].final_wealth.per_seed[i];
        const double wb = report.selectors[b].final_wealth.per_seed[i];
        if (std::isnan(wa) || std::isnan(wb) || wb <= 0.0) continue;
        sum += excess_ratio(wa, wb);
        ++count;
      }
      report.excess_ratios[report.selectors[a].name][report.selectors[b].name] =
          count > 0 ? sum / static_cast<double>(count)
                    : std::numeric_limits<double>::quiet_NaN();
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return report;
}

namespace {

nlohmann::json summary_to_json(const MetricSummary& summary) {
  nlohmann::json j;
  j["mean"] = summary.mean;
  j["per_seed"] = summary.per_seed;
  return j;
}

nlohmann::json named_summaries_to_json(
    const std::vector<std::pair<std::string, std::optional<MetricSummary>>>& entries) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, summary] : entries)
    j[name] = summary ? summary_to_json(*summary) : nlohmann::json();
  return j;
}

} // namespace

nlohmann::json report_to_json(const BacktestReport& report) {
  nlohmann::json j;
  j["seeds"] = report.seeds;
  j["first_prediction_period"] = report.first_prediction_period;
  j["last_period"] = report.last_period;

  nlohmann::json selectors = nlohmann::json::object();
  for (const auto& sel : report.selectors) {
    nlohmann::json s;
    s["r2_zero"] = summary_to_json(sel.r2_zero);
    s["r2_standard"] = summary_to_json(sel.r2_standard);
    s["final_wealth"] = summary_to_json(sel.final_wealth);
    s["annual_r2_zero"] = named_summaries_to_json(sel.annual_r2_zero);
    s["annual_r2_standard"] = named_summaries_to_json(sel.annual_r2_standard);
    s["regime_r2_zero"] = named_summaries_to_json(sel.regime_r2_zero);
    selectors[sel.name] = std::move(s);
  }
  j["selectors"] = std::move(selectors);
  j["excess_ratios"] = report.excess_ratios;
  return j;
}

void emit(const BacktestReport& report, const std::string& outdir) {
  if (report.selectors.empty()) throw std::runtime_error("report has no selectors");
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + outdir);

  {
    std::ofstream out(outdir + "/metrics.json");
    if (!out) throw std::runtime_error("cannot write metrics.json in " + outdir);
    out << report_to_json(report).dump(2) << '\n';
  }
  {
    std::ofstream out(outdir + "/timing.json");
    if (!out) throw std::runtime_error("cannot write timing.json in " + outdir);
    nlohmann::json j;
    j["wall_seconds"] = report.wall_seconds;
    out << j.dump(2) << '\n';
  }
  {
    std::ofstream out(outdir + "/predictions.csv");
    if (!out) throw std::runtime_error("cannot write predictions.csv in " + outdir);
    out << "seed,period,selector,obs_index,y_hat,y\n";
    for (std::size_t i = 0; i < report.seeds.size(); ++i) {
      for (const auto& sel : report.selectors) {
        const auto& log = sel.per_seed_logs[i];
        for (const auto& p : log.periods)
          for (std::size_t k = 0; k < p.y.size(); ++k)
            out << report.seeds[i] << ',' << p.period << ',' << sel.name << ',' << k << ','
                << format_double(p.y_hat[k]) << ',' << format_double(p.y[k]) << '\n';
      }
    }
  }
  {
    std::ofstream out(outdir + "/selections.csv");
    if (!out) throw std::runtime_error("cannot write selections.csv in " + outdir);
    out << "seed,period,selector,family,hyperparameters,window_k,duel_count,final_window\n";
    for (const auto& rec : report.selections)
      out << rec.seed << ',' << rec.period << ',' << rec.selector << ',' << rec.family << ",\""
          << rec.hyperparameters << "\"," << rec.window_exponent << ',' << rec.duel_count << ','
          << rec.final_window << '\n';
  }
  {
    std::ofstream out(outdir + "/wealth.csv");
    if (!out) throw std::runtime_error("cannot write wealth.csv in " + outdir);
    out << "seed,selector,period,wealth\n";
    for (std::size_t i = 0; i < report.seeds.size(); ++i)
      for (const auto& sel : report.selectors) {
        const auto& curve = sel.per_seed_wealth[i];
        for (std::size_t k = 0; k < curve.size(); ++k)
          out << report.seeds[i] << ',' << sel.name << ','
              << report.first_prediction_period + static_cast<int>(k) << ','
              << format_double(curve[k]) << '\n';
      }
  }

  // Charts are best effort.
  try {
    std::vector<Series> wealth_series;
    for (const auto& sel : report.selectors) {
      Series series;
      series.name = sel.name;
      for (int t = report.first_prediction_period; t <= report.last_period; ++t) {
        const std::size_t k = static_cast<std::size_t>(t - report.first_prediction_period);
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& curve : sel.per_seed_wealth)
          if (k < curve.size()) {
            sum += std::log(curve[k]);
            ++count;
          }
        series.x.push_back(t);
        series.y.push_back(count > 0 ? std::optional<double>(sum / static_cast<double>(count))
                                     : std::nullopt);
      }
      wealth_series.push_back(std::move(series));
    }
    write_line_chart(outdir + "/wealth.svg", "Mean log cumulative wealth", "period",
                     "log wealth", wealth_series);
  } catch (const std::exception& e) {
    std::cerr << "warning: wealth chart skipped: " << e.what() << '\n';
  }

  try {
    std::vector<Series> annual_series;
    for (const auto& sel : report.selectors) {
      Series series;
      series.name = sel.name;
      double x = 1.0;
      for (const auto& [year, summary] : sel.annual_r2_zero) {
        series.x.push_back(x++);
        series.y.push_back(summary ? std::optional<double>(summary->mean) : std::nullopt);
      }
      annual_series.push_back(std::move(series));
    }
    write_line_chart(outdir + "/r2_annual.svg", "Annual out-of-sample R2 (zero benchmark)",
                     "year index", "R2", annual_series);
  } catch (const std::exception& e) {
    std::cerr << "warning: annual R2 chart skipped: " << e.what() << '\n';
  }

  try {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> samples;
    for (const auto& sel : report.selectors) {
      labels.push_back(sel.name);
      std::vector<double> values;
      for (const auto& [year, summary] : sel.annual_r2_zero)
        if (summary)
          for (const double v : summary->per_seed)
            if (!std::isnan(v)) values.push_back(v);
      samples.push_back(std::move(values));
    }
    write_box_plot(outdir + "/r2_box.svg", "Annual R2 distribution (zero benchmark)", "R2",
                   labels, samples);
  } catch (const std::exception& e) {
    std::cerr << "warning: R2 box plot skipped: " << e.what() << '\n';
  }
}

} // namespace atomslab
