#include "atomslab/panel.hpp"
#include "atomslab/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

using namespace atomslab;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("atomslab_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

Panel small_panel(int periods, int per_period, Eigen::Index d, std::uint64_t seed) {
  Panel panel;
  panel.dimension = d;
  SplitMix64 gen(seed);
  for (int t = 1; t <= periods; ++t) {
    PeriodBatch batch;
    batch.period = t;
    for (int i = 0; i < per_period; ++i) {
      Observation obs;
      obs.x.resize(d);
      for (Eigen::Index f = 0; f < d; ++f) obs.x[f] = gen.next_unit();
      obs.y = gen.next_normal();
      batch.observations.push_back(std::move(obs));
    }
    panel.periods.push_back(std::move(batch));
  }
  return panel;
}

} // namespace

TEST_SUITE("panel") {

TEST_CASE("load_csv groups and relabels periods in ascending order") {
  TempFile file("relabel.csv", "month,f1,ret\n"
                              "7,0.5,1.0\n"
                              "3,0.25,-1.0\n"
                              "3,0.75,2.0\n"
                              "7,0.1,0.5\n");
  const Panel panel = load_csv(file.path, {"month", "ret"});
  REQUIRE(panel.period_count() == 2);
  CHECK(panel.dimension == 1);
  CHECK(panel.labels[0] == "3");
  CHECK(panel.labels[1] == "7");
  CHECK(panel.periods[0].size() == 2);
  CHECK(panel.periods[1].size() == 2);
  // rows keep file order within a period
  CHECK(panel.periods[0].observations[0].y == -1.0);
  CHECK(panel.periods[1].observations[0].y == 1.0);
}

TEST_CASE("load_csv: header only is an error") {
  TempFile file("empty.csv", "month,f1,ret\n");
  CHECK_THROWS_WITH_AS(load_csv(file.path, {"month", "ret"}),
                       doctest::Contains("no data rows"), std::runtime_error);
}

TEST_CASE("load_csv: hand fixture, field by field") {
  TempFile file("fixture.csv", "p,a,b,y\n"
                              "1,0.1,0.2,1.5\n"
                              "1,0.3,0.4,2.5\n"
                              "1,0.5,0.6,3.5\n"
                              "2,0.7,0.8,4.5\n"
                              "2,0.9,1.0,5.5\n"
                              "2,1.1,1.2,6.5\n");
  const Panel panel = load_csv(file.path, {"p", "y"});
  REQUIRE(panel.period_count() == 2);
  REQUIRE(panel.dimension == 2);
  const double xs[2][3][2] = {{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}},
                              {{0.7, 0.8}, {0.9, 1.0}, {1.1, 1.2}}};
  const double ys[2][3] = {{1.5, 2.5, 3.5}, {4.5, 5.5, 6.5}};
  for (int t = 0; t < 2; ++t) {
    REQUIRE(panel.periods[t].size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(panel.periods[t].observations[i].x[0] == xs[t][i][0]);
      CHECK(panel.periods[t].observations[i].x[1] == xs[t][i][1]);
      CHECK(panel.periods[t].observations[i].y == ys[t][i]);
    }
  }
}

TEST_CASE("load_csv: schema and parse errors") {
  TempFile file("bad.csv", "p,a,y\n1,0.1,2\n1,zzz,3\n");
  CHECK_THROWS_WITH_AS(load_csv(file.path, {"month", "y"}),
                       doctest::Contains("missing column 'month'"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_csv(file.path, {"p", "y"}), doctest::Contains("row 3"),
                       std::runtime_error);
  TempFile missing("missing.csv", "p,a,y\n1,,2\n1,1,3\n");
  CHECK_THROWS(load_csv(missing.path, {"p", "y"}));
}

TEST_CASE("save then load is the identity on the panel") {
  const Panel panel = small_panel(3, 4, 2, 99);
  TempFile file("roundtrip.csv", "");
  save_csv(panel, file.path);
  const Panel back = load_csv(file.path, {"period", "target"});
  REQUIRE(back.period_count() == panel.period_count());
  REQUIRE(back.dimension == panel.dimension);
  for (int t = 0; t < 3; ++t) {
    REQUIRE(back.periods[t].size() == panel.periods[t].size());
    for (std::size_t i = 0; i < panel.periods[t].size(); ++i) {
      CHECK(back.periods[t].observations[i].y == panel.periods[t].observations[i].y);
      CHECK(back.periods[t].observations[i].x == panel.periods[t].observations[i].x);
    }
  }
}

TEST_CASE("split: 4/5 fraction leaves one validation row of five") {
  const Panel panel = small_panel(4, 5, 1, 7);
  const SplitPanel s = split(panel, 0.8, 42);
  for (int j = 1; j <= 4; ++j) {
    CHECK(s.train_count(j) == 4);
    CHECK(s.validation_count(j) == 1);
  }
}

TEST_CASE("split: deterministic for a fixed seed") {
  const Panel panel = small_panel(3, 6, 2, 5);
  const SplitPanel a = split(panel, 0.5, 123);
  const SplitPanel b = split(panel, 0.5, 123);
  for (int j = 0; j < 3; ++j) {
    REQUIRE(a.train[j].size() == b.train[j].size());
    for (std::size_t i = 0; i < a.train[j].size(); ++i)
      CHECK(a.train[j][i].y == b.train[j][i].y);
  }
}

TEST_CASE("split: matches the documented generator algorithm") {
  const Panel panel = small_panel(2, 10, 1, 11);
  const std::uint64_t seed = 77;
  const SplitPanel s = split(panel, 0.5, seed);

  for (int period = 1; period <= 2; ++period) {
    // independent re-derivation of the partial Fisher-Yates draw
    const std::size_t b = 10;
    std::size_t m = static_cast<std::size_t>(std::ceil(0.5 * 10.0));
    m = std::min(m, b - 1);
    SplitMix64 gen(substream_seed(seed, static_cast<std::uint64_t>(period)));
    std::vector<std::size_t> idx(b);
    for (std::size_t i = 0; i < b; ++i) idx[i] = i;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + gen.next_below(b - i);
      std::swap(idx[i], idx[j]);
    }
    std::vector<std::size_t> expect_train(idx.begin(), idx.begin() + m);
    std::sort(expect_train.begin(), expect_train.end());

    const auto& obs = panel.periods[period - 1].observations;
    REQUIRE(s.train[period - 1].size() == m);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(s.train[period - 1][i].y == obs[expect_train[i]].y);
  }
}

TEST_CASE("split: period with one observation is rejected") {
  Panel panel = small_panel(2, 3, 1, 3);
  panel.periods[1].observations.resize(1);
  CHECK_THROWS_WITH_AS(split(panel, 0.8, 1), doctest::Contains("nonempty validation"),
                       std::runtime_error);
}

TEST_CASE("split partitions every period (property)") {
  SplitMix64 gen(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int periods = 1 + static_cast<int>(gen.next_below(5));
    const int per_period = 2 + static_cast<int>(gen.next_below(9));
    const double fraction = 0.1 + 0.8 * gen.next_unit();
    const Panel panel = small_panel(periods, per_period, 1, gen.next());
    const SplitPanel s = split(panel, fraction, gen.next());
    for (int j = 0; j < periods; ++j) {
      CHECK(s.validation[j].size() >= 1);
      CHECK(s.train[j].size() + s.validation[j].size() == panel.periods[j].size());
      // multiset equality via sorted y values (all y are distinct a.s.)
      std::multiset<double> original, recombined;
      for (const auto& o : panel.periods[j].observations) original.insert(o.y);
      for (const auto& o : s.train[j]) recombined.insert(o.y);
      for (const auto& o : s.validation[j]) recombined.insert(o.y);
      CHECK(original == recombined);
    }
  }
}

} // TEST_SUITE
