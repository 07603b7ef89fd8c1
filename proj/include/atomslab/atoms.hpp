#pragma once

#include "atomslab/duel.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace atomslab {

// One elimination round: the pivot duels every other remaining candidate
// (challengers in ascending candidate order, pivot always passed as f1).
struct TournamentRound {
  std::size_t pivot = 0;
  std::vector<std::size_t> challengers;
  std::vector<DuelOutcome> duels;
};

// Full audit of one tournament run. Candidate identity is the stable index
// into the input list.
struct SelectionTrace {
  std::vector<TournamentRound> rounds;
  std::size_t winner = 0;
  std::size_t total_comparisons = 0;
  std::uint64_t rng_seed = 0;
};

using DuelFn = std::function<DuelOutcome(std::size_t pivot, std::size_t challenger)>;

// Sequential elimination tournament over candidates 0..candidate_count-1:
// pick a pivot uniformly at random from the survivors (seeded, own stream),
// duel it against every other survivor; if nobody beats the pivot it wins,
// otherwise the winners advance and the pivot is eliminated. Repeats until a
// single candidate remains.
SelectionTrace tournament_select(std::size_t candidate_count, const DuelFn& duel,
                                 std::uint64_t seed);

// Mean number of comparisons over `trials` runs with a noiseless total-order
// duel (lower index wins), trial seeds derived from `seed`.
double measure_tournament_complexity(std::size_t candidate_count, std::size_t trials,
                                     std::uint64_t seed);

} // namespace atomslab
