#include "atomslab/synth.hpp"
#include "atomslab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atomslab {
namespace synth {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
constexpr double kBounceTolerance = 1e-12;

void validate(const DriftEnv& env) {
  if (env.eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
  if (env.eta > 1.0) throw std::invalid_argument("eta > 1 leaves no room to zigzag in [0,1]");
  if (env.samples_per_period < 1)
    throw std::invalid_argument("samples_per_period must be >= 1");
  if (!(env.noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be nonnegative");
}

} // namespace

std::vector<double> slope_path(const DriftEnv& env, int periods) {
  validate(env);
  if (periods < 1) throw std::invalid_argument("periods must be >= 1");

  std::vector<double> path(static_cast<std::size_t>(periods), 0.0);
  switch (env.kind) {
    case DriftKind::Stationary:
      break;
    case DriftKind::ZigzagLinearSine: {
      double c = 0.0;
      double dir = 1.0;
      for (int t = 1; t < periods; ++t) {
        double next = c + dir * env.eta;
        if (next > 1.0 + kBounceTolerance || next < -kBounceTolerance) {
          dir = -dir;
          next = c + dir * env.eta;
        }
        c = next;
        path[static_cast<std::size_t>(t)] = c;
      }
      break;
    }
    case DriftKind::PiecewiseRegime: {
      SplitMix64 gen(substream_seed(env.seed, 0xC0FFEEULL));
      double c = 0.0;
      for (int t = 1; t <= periods; ++t) {
        if (std::find(env.change_points.begin(), env.change_points.end(), t) !=
            env.change_points.end()) {
          const bool up_ok = c + env.eta <= 1.0 + kBounceTolerance;
          const bool down_ok = c - env.eta >= -kBounceTolerance;
          double dir;
          if (up_ok && down_ok)
            dir = gen.next_below(2) == 0 ? 1.0 : -1.0;
          else if (up_ok)
            dir = 1.0;
          else if (down_ok)
            dir = -1.0;
          else
            throw std::runtime_error("regime jump of size eta infeasible from current slope");
          c += dir * env.eta;
        }
        path[static_cast<std::size_t>(t - 1)] = c;
      }
      break;
    }
  }
  return path;
}

double truth(const DriftEnv& env, double slope, double x) {
  return slope * x + env.gamma * std::sin(kTwoPi * x);
}

Panel generate(const DriftEnv& env, int periods) {
  const std::vector<double> slopes = slope_path(env, periods);

  Panel panel;
  panel.dimension = 1;
  panel.periods.resize(static_cast<std::size_t>(periods));
  for (int t = 1; t <= periods; ++t) {
    auto& batch = panel.periods[static_cast<std::size_t>(t - 1)];
    batch.period = t;
    batch.observations.resize(static_cast<std::size_t>(env.samples_per_period));
    SplitMix64 gen(substream_seed(env.seed, static_cast<std::uint64_t>(t)));
    for (auto& obs : batch.observations) {
      const double x = gen.next_unit();
      const double noise = env.noise_sd > 0.0 ? env.noise_sd * gen.next_normal() : 0.0;
      obs.x = Eigen::VectorXd::Constant(1, x);
      obs.y = truth(env, slopes[static_cast<std::size_t>(t - 1)], x) + noise;
    }
  }
  return panel;
}

double true_risk(const DriftEnv& env, int t, const FittedModel& model, std::size_t mc_samples,
                 std::uint64_t seed) {
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
  const std::vector<double> slopes = slope_path(env, t);
  const double slope = slopes.back();

  SplitMix64 gen(substream_seed(seed, static_cast<std::uint64_t>(t)));
  Eigen::VectorXd x(1);
  double sum = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    x[0] = gen.next_unit();
    const double noise = env.noise_sd > 0.0 ? env.noise_sd * gen.next_normal() : 0.0;
    const double y = truth(env, slope, x[0]) + noise;
    const double e = model.predict(x) - y;
    sum += e * e;
  }
  return sum / static_cast<double>(mc_samples);
}

double true_excess_risk(const DriftEnv& env, int t, const FittedModel& model,
                        std::size_t mc_samples, std::uint64_t seed) {
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
  const std::vector<double> slopes = slope_path(env, t);
  const double slope = slopes.back();

  SplitMix64 gen(substream_seed(seed, static_cast<std::uint64_t>(t)));
  Eigen::VectorXd x(1);
  double sum = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    x[0] = gen.next_unit();
    const double e = model.predict(x) - truth(env, slope, x[0]);
    sum += e * e;
  }
  return sum / static_cast<double>(mc_samples);
}

} // namespace synth
} // namespace atomslab
