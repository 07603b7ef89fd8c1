#include "atomslab/atoms.hpp"
#include "atomslab/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

using namespace atomslab;

namespace {

// Noiseless duel induced by a loss ranking: the candidate with the smaller
// loss wins every comparison.
DuelFn ranked_duel(std::vector<double> losses) {
  return [losses = std::move(losses)](std::size_t pivot, std::size_t challenger) {
    DuelOutcome outcome;
    const bool pivot_wins = losses[pivot] <= losses[challenger];
    outcome.winner = pivot_wins ? pivot : challenger;
    outcome.loser = pivot_wins ? challenger : pivot;
    return outcome;
  };
}

} // namespace

TEST_SUITE("atoms") {

TEST_CASE("a single candidate wins with zero comparisons") {
  const SelectionTrace trace = tournament_select(1, ranked_duel({1.0}), 5);
  CHECK(trace.winner == 0);
  CHECK(trace.total_comparisons == 0);
  CHECK(trace.rounds.empty());
}

TEST_CASE("two candidates: exactly one duel, pivot passed as f1") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SelectionTrace trace = tournament_select(2, ranked_duel({2.0, 1.0}), seed);
    CHECK(trace.total_comparisons == 1);
    CHECK(trace.winner == 1);
    REQUIRE(trace.rounds.size() >= 1);
    const auto& round = trace.rounds.front();
    REQUIRE(round.challengers.size() == 1);
    CHECK(round.challengers[0] != round.pivot);
  }
}

TEST_CASE("noiseless total order over losses {3,1,2}: loss-1 wins for every seed") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SelectionTrace trace = tournament_select(3, ranked_duel({3.0, 1.0, 2.0}), seed);
    CHECK(trace.winner == 1);
  }
}

TEST_CASE("strict total order: the top candidate wins for every seed and size") {
  SplitMix64 gen(88);
  for (const std::size_t lambda : {3u, 10u, 50u}) {
    for (int trial = 0; trial < 50; ++trial) {
      // random distinct losses
      std::vector<double> losses(lambda);
      for (auto& l : losses) l = gen.next_unit();
      const std::size_t best = static_cast<std::size_t>(
          std::min_element(losses.begin(), losses.end()) - losses.begin());
      const SelectionTrace trace = tournament_select(lambda, ranked_duel(losses), gen.next());
      CHECK(trace.winner == best);
    }
  }
}

TEST_CASE("every eliminated candidate lost a duel or was a defeated pivot") {
  SplitMix64 gen(31);
  std::vector<double> losses(12);
  for (auto& l : losses) l = gen.next_unit();
  const SelectionTrace trace = tournament_select(12, ranked_duel(losses), 7);

  std::set<std::size_t> accounted;
  accounted.insert(trace.winner);
  for (const auto& round : trace.rounds) {
    bool pivot_defeated = false;
    for (const auto& duel : round.duels) {
      if (duel.winner != round.pivot) pivot_defeated = true;
      accounted.insert(duel.loser);
    }
    if (pivot_defeated) accounted.insert(round.pivot);
    // challengers that neither won nor advanced are losers of recorded duels
  }
  for (std::size_t c = 0; c < 12; ++c) CHECK(accounted.count(c) == 1);
  CHECK(trace.total_comparisons ==
        [&] {
          std::size_t n = 0;
          for (const auto& round : trace.rounds) n += round.duels.size();
          return n;
        }());
}

TEST_CASE("reproducibility: fixed inputs give an identical trace") {
  std::vector<double> losses = {0.4, 0.2, 0.9, 0.1, 0.5};
  const SelectionTrace a = tournament_select(5, ranked_duel(losses), 99);
  const SelectionTrace b = tournament_select(5, ranked_duel(losses), 99);
  CHECK(a.winner == b.winner);
  CHECK(a.total_comparisons == b.total_comparisons);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    CHECK(a.rounds[r].pivot == b.rounds[r].pivot);
    CHECK(a.rounds[r].challengers == b.rounds[r].challengers);
  }
}

TEST_CASE("complexity measurement: exact small cases") {
  CHECK(measure_tournament_complexity(1, 50, 0) == 0.0);
  CHECK(measure_tournament_complexity(2, 50, 0) == 1.0);
}

TEST_CASE("complexity grows linearly in the candidate count") {
  const double mean_32 = measure_tournament_complexity(32, 200, 11);
  const double mean_128 = measure_tournament_complexity(128, 200, 13);
  CHECK(mean_128 / mean_32 <= 6.0);
  CHECK(mean_128 / mean_32 >= 2.0); // sanity: it does grow
}

} // TEST_SUITE
