#include "atomslab/synth.hpp"
#include "atomslab/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace atomslab;
using namespace atomslab::synth;

TEST_SUITE("synth") {

TEST_CASE("eta = 0 keeps the slope constant") {
  DriftEnv env;
  env.kind = DriftKind::ZigzagLinearSine;
  env.eta = 0.0;
  const auto path = slope_path(env, 30);
  for (const double c : path) CHECK(c == 0.0);
}

TEST_CASE("zigzag path matches the recurrence oracle") {
  DriftEnv env;
  env.kind = DriftKind::ZigzagLinearSine;
  env.eta = 0.1;
  const auto path = slope_path(env, 25);

  // three-line oracle: step, flip at the walls
  std::vector<double> expect;
  double c = 0.0, dir = 1.0;
  for (int t = 0; t < 25; ++t) {
    expect.push_back(c);
    if (c + dir * env.eta > 1.0 + 1e-12 || c + dir * env.eta < -1e-12) dir = -dir;
    c += dir * env.eta;
  }
  REQUIRE(path.size() == expect.size());
  for (std::size_t i = 0; i < path.size(); ++i)
    CHECK(path[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  // the peak sits at period 11 (0-based index 10): 0, .1, ..., 1.0, .9, ...
  CHECK(path[10] == doctest::Approx(1.0));
  CHECK(path[11] == doctest::Approx(0.9));
  // exact step size everywhere
  for (std::size_t i = 1; i < path.size(); ++i)
    CHECK(std::abs(path[i] - path[i - 1]) == doctest::Approx(env.eta).epsilon(1e-12));
}

TEST_CASE("eta above one is rejected") {
  DriftEnv env;
  env.eta = 1.5;
  CHECK_THROWS_AS(slope_path(env, 5), std::invalid_argument);
  CHECK_THROWS_AS(generate(env, 5), std::invalid_argument);
}

TEST_CASE("noiseless, gamma = 0: y is exactly linear in x") {
  DriftEnv env;
  env.kind = DriftKind::ZigzagLinearSine;
  env.eta = 0.25;
  env.gamma = 0.0;
  env.noise_sd = 0.0;
  env.samples_per_period = 7;
  env.seed = 5;
  const Panel panel = generate(env, 9);
  const auto path = slope_path(env, 9);
  for (int t = 1; t <= 9; ++t)
    for (const auto& obs : panel.periods[static_cast<std::size_t>(t - 1)].observations)
      CHECK(obs.y == doctest::Approx(path[static_cast<std::size_t>(t - 1)] * obs.x[0])
                         .epsilon(1e-12));
}

TEST_CASE("piecewise regime jumps by exactly eta at the change points") {
  DriftEnv env;
  env.kind = DriftKind::PiecewiseRegime;
  env.eta = 0.4;
  env.seed = 11;
  env.change_points = {5, 9};
  const auto path = slope_path(env, 12);
  for (int t = 1; t < 12; ++t) {
    const double step = std::abs(path[static_cast<std::size_t>(t)] -
                                 path[static_cast<std::size_t>(t - 1)]);
    if (t + 1 == 5 || t + 1 == 9)
      CHECK(step == doctest::Approx(env.eta).epsilon(1e-12));
    else
      CHECK(step == 0.0);
  }
  for (const double c : path) {
    CHECK(c >= -1e-12);
    CHECK(c <= 1.0 + 1e-12);
  }
}

TEST_CASE("generation is pure; disjoint seeds differ") {
  DriftEnv env;
  env.kind = DriftKind::ZigzagLinearSine;
  env.eta = 0.05;
  env.gamma = 0.3;
  env.noise_sd = 1.0;
  env.samples_per_period = 4;
  env.seed = 21;
  const Panel a = generate(env, 6);
  const Panel b = generate(env, 6);
  for (int t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < a.periods[t].size(); ++i) {
      CHECK(a.periods[t].observations[i].y == b.periods[t].observations[i].y);
      CHECK(a.periods[t].observations[i].x == b.periods[t].observations[i].x);
    }

  env.seed = 22;
  const Panel c = generate(env, 6);
  bool any_different = false;
  for (int t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < a.periods[t].size(); ++i)
      any_different = any_different ||
                      a.periods[t].observations[i].y != c.periods[t].observations[i].y;
  CHECK(any_different);
}

TEST_CASE("true_risk of the exact model is the noise variance") {
  DriftEnv env;
  env.kind = DriftKind::ZigzagLinearSine;
  env.eta = 0.1;
  env.gamma = 0.5;
  env.noise_sd = 1.0;
  env.samples_per_period = 3;
  env.seed = 9;

  // the Bayes model at t: slope c_t with the sine term; emulate via a dense
  // lookup is unnecessary -- use gamma = 0 so the truth is linear
  env.gamma = 0.0;
  const auto path = slope_path(env, 14);
  FittedModel bayes;
  bayes.state = LinearState{(Eigen::VectorXd(2) << path[13], 0.0).finished()};

  const std::size_t mc = 20000;
  const double risk = true_risk(env, 14, bayes, mc, 77);
  CHECK(std::abs(risk - 1.0) <= 3.0 * std::sqrt(2.0 / static_cast<double>(mc)));

  env.noise_sd = 0.0;
  CHECK(true_risk(env, 14, bayes, 500, 78) == 0.0);
  CHECK(true_excess_risk(env, 14, bayes, 500, 79) == 0.0);
}

TEST_CASE("constant-zero model against slope one: risk is E[x^2] = 1/3") {
  DriftEnv env;
  env.kind = DriftKind::ZigzagLinearSine;
  env.eta = 1.0; // c_2 = 1
  env.gamma = 0.0;
  env.noise_sd = 0.0;
  env.samples_per_period = 1;
  FittedModel zero;
  zero.state = LinearState{(Eigen::VectorXd(2) << 0.0, 0.0).finished()};
  const std::size_t mc = 40000;
  const double risk = true_risk(env, 2, zero, mc, 5);
  // Var(x^2) for x ~ U[0,1] is 4/45; allow 4 standard errors
  CHECK(std::abs(risk - 1.0 / 3.0) <= 4.0 * std::sqrt(4.0 / 45.0 / static_cast<double>(mc)));
  CHECK(true_excess_risk(env, 2, zero, mc, 5) == doctest::Approx(risk));
}

} // TEST_SUITE
