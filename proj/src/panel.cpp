#include "atomslab/panel.hpp"
#include "atomslab/num_format.hpp"
#include "atomslab/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace atomslab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

} // namespace

Panel load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("no data rows: " + path);
  const auto header = split_line(line);

  int period_col = -1, target_col = -1;
  std::vector<int> feature_cols;
  std::vector<std::string> feature_names;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string name = trim(header[c]);
    if (name == schema.period_column) {
      period_col = c;
    } else if (name == schema.target_column) {
      target_col = c;
    } else {
      feature_cols.push_back(c);
      feature_names.push_back(name);
    }
  }
  if (period_col < 0)
    throw std::runtime_error("schema error: missing column '" + schema.period_column + "'");
  if (target_col < 0)
    throw std::runtime_error("schema error: missing column '" + schema.target_column + "'");

  struct Row {
    std::string period;
    Observation obs;
  };
  std::vector<Row> rows;
  const Eigen::Index d = static_cast<Eigen::Index>(feature_cols.size());
  std::size_t row_number = 1; // header was row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("parse error at row " + std::to_string(row_number) +
                               ": expected " + std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    Row row;
    row.period = trim(cells[period_col]);
    if (row.period.empty())
      throw std::runtime_error("parse error at row " + std::to_string(row_number) +
                               ": empty period value");
    row.obs.x.resize(d);
    for (Eigen::Index f = 0; f < d; ++f) {
      if (!parse_double(cells[feature_cols[f]], row.obs.x[f]))
        throw std::runtime_error("parse error at row " + std::to_string(row_number) +
                                 ": non-numeric value '" + trim(cells[feature_cols[f]]) +
                                 "' in column '" + feature_names[f] + "'");
    }
    if (!parse_double(cells[target_col], row.obs.y))
      throw std::runtime_error("parse error at row " + std::to_string(row_number) +
                               ": non-numeric value '" + trim(cells[target_col]) +
                               "' in column '" + schema.target_column + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows: " + path);

  // Order period groups ascending, numerically when possible.
  bool all_numeric = true;
  for (const auto& r : rows) {
    double v;
    if (!parse_double(r.period, v)) {
      all_numeric = false;
      break;
    }
  }
  std::vector<std::string> keys;
  for (const auto& r : rows)
    if (std::find(keys.begin(), keys.end(), r.period) == keys.end()) keys.push_back(r.period);
  std::sort(keys.begin(), keys.end(), [&](const std::string& a, const std::string& b) {
    if (all_numeric) {
      double va, vb;
      parse_double(a, va);
      parse_double(b, vb);
      if (va != vb) return va < vb;
    }
    return a < b;
  });

  Panel panel;
  panel.dimension = d;
  panel.feature_names = feature_names;
  panel.period_name = schema.period_column;
  panel.target_name = schema.target_column;
  panel.periods.resize(keys.size());
  panel.labels = keys;
  for (std::size_t k = 0; k < keys.size(); ++k) panel.periods[k].period = static_cast<int>(k + 1);
  for (auto& r : rows) {
    const auto it = std::find(keys.begin(), keys.end(), r.period);
    panel.periods[static_cast<std::size_t>(it - keys.begin())].observations.push_back(
        std::move(r.obs));
  }
  return panel;
}

void save_csv(const Panel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);

  out << panel.period_name;
  for (Eigen::Index f = 0; f < panel.dimension; ++f) {
    if (f < static_cast<Eigen::Index>(panel.feature_names.size()))
      out << ',' << panel.feature_names[f];
    else
      out << ",x" << (f + 1);
  }
  out << ',' << panel.target_name << '\n';

  for (std::size_t p = 0; p < panel.periods.size(); ++p) {
    const std::string label =
        p < panel.labels.size() ? panel.labels[p] : std::to_string(panel.periods[p].period);
    for (const auto& obs : panel.periods[p].observations) {
      out << label;
      for (Eigen::Index f = 0; f < panel.dimension; ++f) out << ',' << format_double(obs.x[f]);
      out << ',' << format_double(obs.y) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

SplitPanel split(const Panel& panel, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");

  SplitPanel out;
  out.seed = seed;
  out.train_fraction = train_fraction;
  out.train.resize(panel.periods.size());
  out.validation.resize(panel.periods.size());

  for (std::size_t p = 0; p < panel.periods.size(); ++p) {
    const auto& obs = panel.periods[p].observations;
    const std::size_t b = obs.size();
    if (b < 2)
      throw std::runtime_error("cannot guarantee nonempty validation: period " +
                               std::to_string(p + 1) + " has " + std::to_string(b) +
                               " observation(s)");
    std::size_t m = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(b)));
    m = std::min(m, b - 1);

    SplitMix64 gen(substream_seed(seed, p + 1));
    std::vector<std::size_t> idx(b);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + gen.next_below(b - i);
      std::swap(idx[i], idx[j]);
    }
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<std::size_t> val_idx(idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());

    out.train[p].reserve(m);
    out.validation[p].reserve(b - m);
    for (const auto i : train_idx) out.train[p].push_back(obs[i]);
    for (const auto i : val_idx) out.validation[p].push_back(obs[i]);
  }
  return out;
}

void to_matrix(std::span<const Observation> data, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index d = n > 0 ? data[0].x.size() : 0;
  x.resize(n, d);
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = data[static_cast<std::size_t>(i)].x;
    y[i] = data[static_cast<std::size_t>(i)].y;
  }
}

} // namespace atomslab
