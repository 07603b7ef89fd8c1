#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace atomslab {

// One covariate/response pair. The covariate dimension is fixed across a
// panel; the response is a scalar (e.g. a daily excess return).
struct Observation {
  Eigen::VectorXd x;
  double y = 0.0;
};

// All samples collected in one period, assumed i.i.d. within the period.
struct PeriodBatch {
  int period = 0; // ordinal, 1-based, contiguous
  std::vector<Observation> observations;

  std::size_t size() const { return observations.size(); }
};

// Period-indexed dataset. Periods are re-indexed to 1..T on ingestion; the
// label map keeps the original period values (e.g. "1990-06").
struct Panel {
  Eigen::Index dimension = 0;
  std::vector<PeriodBatch> periods;
  std::vector<std::string> labels;             // per period; empty if ordinal
  std::vector<std::string> feature_names;      // column names, if known
  std::string period_name = "period";
  std::string target_name = "target";

  int period_count() const { return static_cast<int>(periods.size()); }
  const PeriodBatch& batch(int period) const { return periods.at(period - 1); }
};

// Column roles for CSV ingestion: one period column, one target column,
// everything else is a feature in header order.
struct CsvSchema {
  std::string period_column;
  std::string target_column;
};

// Per-period train/validation partition of a Panel.
//
// The split of period j is drawn from SplitMix64(substream_seed(seed, j)):
// a partial Fisher-Yates shuffle of the indices 0..B_j-1 takes
//   m_j = min(ceil(train_fraction * B_j), B_j - 1)
// draws without replacement (at step i, swap position i with
// i + next_below(B_j - i)); the first m_j indices are the training rows,
// the remainder the validation rows, each side restored to file order.
// Every period keeps at least one validation observation.
struct SplitPanel {
  std::vector<std::vector<Observation>> train;      // index 0 = period 1
  std::vector<std::vector<Observation>> validation; // index 0 = period 1
  std::uint64_t seed = 0;
  double train_fraction = 0.0;

  int period_count() const { return static_cast<int>(train.size()); }
  std::size_t train_count(int period) const { return train.at(period - 1).size(); }
  std::size_t validation_count(int period) const { return validation.at(period - 1).size(); }
};

// Reads a UTF-8, comma-separated file with a header row. Rows are grouped by
// the period column, groups ordered ascending (numerically when every period
// value parses as a number, lexicographically otherwise) and re-indexed to
// 1..T. Scientific notation is accepted; missing or non-numeric cells are
// rejected with the offending row number.
Panel load_csv(const std::string& path, const CsvSchema& schema);

// Inverse of load_csv up to floating-point round-trip: values are written in
// shortest round-trip decimal form.
void save_csv(const Panel& panel, const std::string& path);

// Seeded per-period split; see SplitPanel for the exact draw algorithm.
SplitPanel split(const Panel& panel, double train_fraction, std::uint64_t seed);

// Copies a span of observations into dense X (n x d) / y (n) form with no
// intercept column appended.
void to_matrix(std::span<const Observation> data, Eigen::MatrixXd& x, Eigen::VectorXd& y);

} // namespace atomslab
