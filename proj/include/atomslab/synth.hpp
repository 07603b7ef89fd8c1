#pragma once

#include "atomslab/model_zoo.hpp"
#include "atomslab/panel.hpp"

#include <cstdint>
#include <vector>

namespace atomslab {
namespace synth {

enum class DriftKind { ZigzagLinearSine, PiecewiseRegime, Stationary };

// Seeded one-dimensional drift environment. All kinds share the conditional
// mean f*_t(x) = c_t x + gamma sin(2 pi x) with x ~ Uniform[0,1] and additive
// N(0, noise_sd^2) noise; they differ in the slope path c_t:
//
//   ZigzagLinearSine  c_1 = 0, steps of exactly eta, direction flipping
//                     whenever the next step would leave [0,1]
//   PiecewiseRegime   c_1 = 0; at each configured change point the slope
//                     jumps by exactly eta in a seeded random direction
//                     (the feasible one when only one keeps c in [0,1]);
//                     constant between change points
//   Stationary        c_t = 0 for all t (the eta = 0 special case)
struct DriftEnv {
  DriftKind kind = DriftKind::ZigzagLinearSine;
  double eta = 0.0;      // drift step / regime jump magnitude
  double gamma = 0.0;    // misspecification amplitude of the sine term
  double noise_sd = 1.0;
  int samples_per_period = 1;
  std::uint64_t seed = 0;
  std::vector<int> change_points; // PiecewiseRegime only; 1-based period ordinals
};

// The slope path c_1..c_T (exact recurrence; exposed for oracles).
std::vector<double> slope_path(const DriftEnv& env, int periods);

// Bayes-optimal conditional mean at period t.
double truth(const DriftEnv& env, double slope, double x);

// Draws the panel: period t uses SplitMix64(substream_seed(seed, t)), one
// (uniform x, normal noise) pair per observation in order.
Panel generate(const DriftEnv& env, int periods);

// Monte Carlo estimate of the period-t MSE of a model on a fresh sample of
// mc_samples observations drawn from substream (seed, t).
double true_risk(const DriftEnv& env, int t, const FittedModel& model, std::size_t mc_samples,
                 std::uint64_t seed);

// Monte Carlo estimate of the excess risk L_t(f) - L_t(f*_t) = E[(f - f*_t)^2],
// integrating over x only (the noise cancels exactly).
double true_excess_risk(const DriftEnv& env, int t, const FittedModel& model,
                        std::size_t mc_samples, std::uint64_t seed);

} // namespace synth
} // namespace atomslab
