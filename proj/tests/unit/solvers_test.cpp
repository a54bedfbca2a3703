// Copyright 2026 The decdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace decdial {
namespace {

Matrix random_table(Rng& rng, int k) {
  Matrix t(k, std::vector<double>(k));
  for (auto& row : t) {
    for (double& c : row) c = rng.uniform(0.0, 100.0);
  }
  return t;
}

TEST(BestMatching, EqualsEnumerationOnRandomTables) {
  Rng rng(2026);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix t = random_table(rng, 8);
    const auto got = best_matching(t);
    EXPECT_EQ(got.value, testing::enumerate_permutations(t).best);
    check_permutation(got.decision, 8);
    EXPECT_EQ(matching_value(t, got.decision), got.value);
  }
}

TEST(BestMatching, IdentityTable) {
  Matrix t(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) t[i][i] = 1.0;
  const auto got = best_matching(t);
  EXPECT_EQ(got.decision.assignment, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(got.value, 4.0);
}

TEST(BestMatching, TiesBreakLexicographically) {
  const Matrix t(3, std::vector<double>(3, 5.0));
  EXPECT_EQ(best_matching(t).decision.assignment, (std::vector<int>{0, 1, 2}));
}

TEST(BestMatching, RejectsNonSquareTables) {
  EXPECT_THROW(best_matching(Matrix{{1.0, 2.0}}), Error);
}

TEST(Imputation, PooledUsesEitherObservationAndPriorElsewhere) {
  const auto w = std::get<OptimizationWorld>(generate(TaskId::optimization, 4));
  const auto t = impute_pooled(w);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const bool seen = w.masks[0][i][j] || w.masks[1][i][j];
      EXPECT_EQ(t.values[i][j], seen ? w.table[i][j] : 50.0);
    }
  }
}

TEST(ItinerarySearch, MatchesNestedLoopsForShortItineraries) {
  for (int k = 1; k <= 2; ++k) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto w = std::get<PlanningWorld>(generate(TaskId::planning, seed, {{"k", k}}));
      const auto [best, worst] = best_worst_itinerary(w);
      const auto oracle = testing::brute_itinerary_extremes(w);
      EXPECT_NEAR(best.value, oracle.best, 1e-9);
      EXPECT_NEAR(worst.value, oracle.worst, 1e-9);
      EXPECT_NEAR(itinerary_reward(w, best.decision), best.value, 1e-9);
    }
  }
}

TEST(ItinerarySearch, RefusesLongItineraries) {
  const auto w = std::get<PlanningWorld>(generate(TaskId::planning, 0, {{"k", 4}}));
  EXPECT_THROW(best_worst_itinerary(w), CapabilityError);
}

TEST(ItineraryReward, BreakdownAgreesWithIndependentRecount) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = std::get<PlanningWorld>(generate(TaskId::planning, seed));
    const std::vector<int> t{static_cast<int>(seed % 39), static_cast<int>((seed + 7) % 39),
                             static_cast<int>((seed + 19) % 39)};
    EXPECT_NEAR(itinerary_reward(w, to_itinerary(t)), testing::brute_itinerary_value(w, t), 1e-9);
  }
}

TEST(FlightPairSearch, MatchesAllPairs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto w = std::get<MediationWorld>(generate(TaskId::mediation, seed));
    const auto [best, worst] = best_worst_flightpair(w);
    const auto oracle = testing::all_flight_pairs(w);
    ASSERT_EQ(oracle.values.size(), 900u);
    EXPECT_NEAR(best.value, oracle.best, 1e-9);
    EXPECT_NEAR(worst.value, oracle.worst, 1e-9);
    const auto& f = best.decision.flights;
    EXPECT_NEAR(testing::brute_flight_value(w, *f[0], *f[1]), oracle.best, 1e-9);
  }
}

TEST(FlightReward, IsTheSumOfBothScorecards) {
  const auto w = std::get<MediationWorld>(generate(TaskId::mediation, 9));
  for (int a : {0, 7, 29}) {
    for (int b : {3, 12}) {
      const auto s = score_flights(w, FlightChoice{{a, b}});
      EXPECT_NEAR(s.per_user[0].total + s.per_user[1].total, s.raw, 1e-9);
      EXPECT_NEAR(s.raw, testing::brute_flight_value(w, a, b), 1e-9);
    }
  }
}

}  // namespace
}  // namespace decdial
