#include "atomslab/atoms.hpp"
#include "atomslab/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace atomslab {

SelectionTrace tournament_select(std::size_t candidate_count, const DuelFn& duel,
                                 std::uint64_t seed) {
  if (candidate_count == 0) throw std::invalid_argument("tournament requires candidates");

  SelectionTrace trace;
  trace.rng_seed = seed;
  SplitMix64 gen(seed);

  std::vector<std::size_t> survivors(candidate_count);
  std::iota(survivors.begin(), survivors.end(), std::size_t{0});

  while (survivors.size() > 1) {
    const std::size_t pivot = survivors[gen.next_below(survivors.size())];

    TournamentRound round;
    round.pivot = pivot;
    std::vector<std::size_t> winners;
    for (const std::size_t challenger : survivors) {
      if (challenger == pivot) continue;
      round.challengers.push_back(challenger);
      DuelOutcome outcome = duel(pivot, challenger);
      if (outcome.winner == challenger) winners.push_back(challenger);
      round.duels.push_back(std::move(outcome));
      ++trace.total_comparisons;
    }
    trace.rounds.push_back(std::move(round));

    if (winners.empty()) {
      trace.winner = pivot;
      return trace;
    }
    survivors = std::move(winners); // the pivot never advances
  }

  trace.winner = survivors.front();
  return trace;
}

double measure_tournament_complexity(std::size_t candidate_count, std::size_t trials,
                                     std::uint64_t seed) {
  if (candidate_count < 1) throw std::invalid_argument("candidate_count must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  const DuelFn order_duel = [](std::size_t pivot, std::size_t challenger) {
    DuelOutcome outcome;
    outcome.winner = std::min(pivot, challenger);
    outcome.loser = std::max(pivot, challenger);
    return outcome;
  };

  std::size_t total = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const SelectionTrace trace =
        tournament_select(candidate_count, order_duel, substream_seed(seed, trial));
    total += trace.total_comparisons;
  }
  return static_cast<double>(total) / static_cast<double>(trials);
}

} // namespace atomslab
