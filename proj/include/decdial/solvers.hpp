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

// Exact decision oracles. Ties always resolve to the lexicographically
// smallest decision so that replays are reproducible.

#ifndef DECDIAL_SOLVERS_HPP_
#define DECDIAL_SOLVERS_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "decdial/decisions.hpp"
#include "decdial/reward.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

namespace detail {

// Maximum-weight perfect assignment (Kuhn-Munkres with potentials).
// Returns the column for each row.
inline std::vector<int> hungarian_max(const Matrix& a) {
  const int n = static_cast<int>(a.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col_of_row(n, 0);
  for (int j = 1; j <= n; ++j) col_of_row[p[j] - 1] = j - 1;
  return col_of_row;
}

inline double assignment_total(const Matrix& a, const std::vector<int>& cols) {
  double s = 0.0;
  for (std::size_t i = 0; i < cols.size(); ++i) s += a[i][cols[i]];
  return s;
}

inline double optimum(const Matrix& a) {
  if (a.empty()) return 0.0;
  return assignment_total(a, hungarian_max(a));
}

}  // namespace detail

inline void check_square(const Matrix& table) {
  for (const auto& row : table) {
    if (row.size() != table.size()) throw DomainError("table must be square");
    for (double x : row) {
      if (!std::isfinite(x)) throw DomainError("table entries must be finite");
    }
  }
}

namespace detail {

inline constexpr int kSubsetDpLimit = 16;

// Lexicographically smallest optimal matching by dynamic programming over
// used-column subsets. g[mask] is the best completion for the remaining rows.
inline Matching best_matching_subset_dp(const Matrix& table) {
  const int n = static_cast<int>(table.size());
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> g(full + 1, 0.0);
  for (std::size_t mask = full; mask-- > 0;) {
    const int r = std::popcount(mask);
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      if (mask & (std::size_t{1} << c)) continue;
      best = std::max(best, table[r][c] + g[mask | (std::size_t{1} << c)]);
    }
    g[mask] = best;
  }
  const double eps = 1e-9 * std::max(1.0, std::fabs(g[0]));
  Matching m;
  std::size_t mask = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t bit = std::size_t{1} << c;
      if (mask & bit) continue;
      if (table[r][c] + g[mask | bit] >= g[mask] - eps) {
        m.assignment.push_back(c);
        mask |= bit;
        break;
      }
    }
  }
  return m;
}

// Hungarian optimum, then rows are fixed one at a time to the smallest
// column that still admits an optimal completion.
inline Matching best_matching_hungarian(const Matrix& table) {
  const int n = static_cast<int>(table.size());
  const double opt = optimum(table);
  const double eps = 1e-9 * std::max(1.0, std::fabs(opt));
  Matching m;
  m.assignment.assign(n, -1);
  std::vector<bool> used(n, false);
  double fixed = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      Matrix rest;
      for (int r = i + 1; r < n; ++r) {
        std::vector<double> row;
        for (int cc = 0; cc < n; ++cc) {
          if (!used[cc] && cc != c) row.push_back(table[r][cc]);
        }
        rest.push_back(std::move(row));
      }
      if (fixed + table[i][c] + optimum(rest) >= opt - eps) {
        m.assignment[i] = c;
        used[c] = true;
        fixed += table[i][c];
        break;
      }
    }
  }
  return m;
}

}  // namespace detail

// Maximum-total-weight perfect matching, ties broken toward the
// lexicographically smallest assignment.
inline DecisionValue<Matching> best_matching(const Matrix& table) {
  check_square(table);
  const Matching m = table.size() <= detail::kSubsetDpLimit
                         ? detail::best_matching_subset_dp(table)
                         : detail::best_matching_hungarian(table);
  return {m, matching_value(table, m)};
}

// Solo-optimal plan under the player's own beliefs, scored on the pooled
// table: what that player would actually achieve alone.
inline double solo_plan_value(const OptimizationWorld& w, int player) {
  const Matching solo = best_matching(impute_solo(w, player)).decision;
  return matching_value(impute_pooled(w).values, solo);
}

inline double pooled_best_value(const OptimizationWorld& w) {
  return best_matching(impute_pooled(w).values).value;
}

// True when the pooled optimum is at least `ratio` times what each player
// achieves alone. Rejects as soon as one player fails.
inline bool pooling_pays_off(const OptimizationWorld& w, double ratio) {
  const Matrix pooled = impute_pooled(w).values;
  const double best = best_matching(pooled).value;
  for (int player = 0; player < 2; ++player) {
    const Matching solo = best_matching(impute_solo(w, player)).decision;
    if (best < ratio * matching_value(pooled, solo)) return false;
  }
  return true;
}

// pooled optimum / best solo achievement; generation requires >= 1.25.
inline double communication_ratio(const OptimizationWorld& w) {
  const double solo = std::max(solo_plan_value(w, 0), solo_plan_value(w, 1));
  const double pooled = pooled_best_value(w);
  if (solo <= 0.0) return pooled > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  return pooled / solo;
}

// ---------------------------------------------------------------------------
// Planning

inline constexpr int kMaxExhaustiveSlots = 3;

// Fast full-itinerary evaluator with all per-site and per-leg terms
// precomputed. Used for search; reported values come from the breakdown.
class ItineraryEvaluator {
 public:
  explicit ItineraryEvaluator(const PlanningWorld& w) : n_(static_cast<int>(w.sites.size())) {
    site_.resize(n_);
    price_.resize(n_);
    leg_.assign(n_, std::vector<double>(n_, 0.0));
    const double theta = distance_weight(w);
    for (int i = 0; i < n_; ++i) {
      site_[i] = site_score(w, i);
      price_[i] = w.sites[i].price;
      for (int j = 0; j < n_; ++j) leg_[i][j] = -theta * w.miles(i, j);
    }
    for (const auto& p : w.preferences) {
      if (p.type == PreferenceType::budget) {
        budget_.push_back({p.budget, p.weight});
      } else if (p.type == PreferenceType::want_to_go) {
        want_.push_back({p.site, p.weight});
      } else if (p.type == PreferenceType::at_least_one) {
        std::vector<bool> member(n_, false);
        for (int i = 0; i < n_; ++i) member[i] = w.sites[i].category == p.category;
        category_.push_back({std::move(member), p.weight});
      }
    }
  }

  double operator()(const std::vector<int>& t) const {
    double s = 0.0;
    int price = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      s += site_[t[i]];
      price += price_[t[i]];
      if (i + 1 < t.size()) s += leg_[t[i]][t[i + 1]];
    }
    for (const auto& [limit, weight] : budget_) {
      if (price > limit) s -= weight;
    }
    for (const auto& [site, weight] : want_) {
      const bool hit = std::find(t.begin(), t.end(), site) != t.end();
      s += hit ? weight : -weight;
    }
    for (const auto& [member, weight] : category_) {
      bool hit = false;
      for (int x : t) hit = hit || member[x];
      s += hit ? weight : -weight;
    }
    return s;
  }

  int size() const { return n_; }

 private:
  int n_;
  std::vector<double> site_;
  std::vector<int> price_;
  std::vector<std::vector<double>> leg_;
  std::vector<std::pair<int, double>> budget_;
  std::vector<std::pair<int, double>> want_;
  std::vector<std::pair<std::vector<bool>, double>> category_;
};

// Visits every ordered tuple of k distinct sites in lexicographic order.
template <typename Fn>
void for_each_ordered_tuple(int n, int k, Fn&& fn) {
  std::vector<int> t(k, 0);
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      fn(static_cast<const std::vector<int>&>(t));
      return;
    }
    for (int s = 0; s < n; ++s) {
      if (used[s]) continue;
      used[s] = true;
      t[depth] = s;
      self(self, depth + 1);
      used[s] = false;
    }
  };
  rec(rec, 0);
}

inline Itinerary to_itinerary(const std::vector<int>& t) {
  Itinerary it;
  for (int s : t) it.slots.emplace_back(s);
  return it;
}

// Exact best and worst full itineraries.
inline std::pair<DecisionValue<Itinerary>, DecisionValue<Itinerary>>
best_worst_itinerary(const PlanningWorld& w) {
  const int k = w.k();
  const int n = static_cast<int>(w.sites.size());
  if (k < 1 || k > n) throw DomainError("itinerary length must be in [1, site count]");
  if (k > kMaxExhaustiveSlots) {
    throw CapabilityError("exhaustive itinerary search supports at most " +
                          std::to_string(kMaxExhaustiveSlots) + " slots");
  }
  const ItineraryEvaluator eval(w);
  std::vector<int> best_t, worst_t;
  double best = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for_each_ordered_tuple(n, k, [&](const std::vector<int>& t) {
    const double v = eval(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
    if (v < worst) {
      worst = v;
      worst_t = t;
    }
  });
  const Itinerary bi = to_itinerary(best_t);
  const Itinerary wi = to_itinerary(worst_t);
  return {{bi, itinerary_reward(w, bi)}, {wi, itinerary_reward(w, wi)}};
}

// ---------------------------------------------------------------------------
// Mediation

inline std::pair<DecisionValue<FlightChoice>, DecisionValue<FlightChoice>>
best_worst_flightpair(const MediationWorld& w) {
  const int n0 = static_cast<int>(w.users[0].flights.size());
  const int n1 = static_cast<int>(w.users[1].flights.size());
  if (n0 == 0 || n1 == 0) throw DomainError("both users need at least one flight");
  std::vector<double> solo0(n0), solo1(n1);
  for (int i = 0; i < n0; ++i) {
    const Flight& f = w.users[0].flights[i];
    solo0[i] = meetings_component(w, 0, f) + price_component(w, 0, f);
  }
  for (int j = 0; j < n1; ++j) {
    const Flight& f = w.users[1].flights[j];
    solo1[j] = meetings_component(w, 1, f) + price_component(w, 1, f);
  }
  int bi = 0, bj = 0, wi = 0, wj = 0;
  double best = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const double v = solo0[i] + solo1[j] +
                       closeness_penalty(w, w.users[0].flights[i], w.users[1].flights[j]);
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
      if (v < worst) {
        worst = v;
        wi = i;
        wj = j;
      }
    }
  }
  return {{FlightChoice{{bi, bj}}, flights_reward(w, bi, bj)},
          {FlightChoice{{wi, wj}}, flights_reward(w, wi, wj)}};
}

}  // namespace decdial

#endif  // DECDIAL_SOLVERS_HPP_
