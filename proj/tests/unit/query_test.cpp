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

std::vector<std::string> names(const ResultTable& t) {
  std::vector<std::string> out;
  for (const auto& row : t.rows) out.push_back(row.at(0));
  return out;
}

class ReferenceQueries : public ::testing::Test {
 protected:
  ResultTable run(const std::string& q) { return execute(parse_query(q), db_); }
  QueryDatabase db_ = testing::reference_database();
};

TEST_F(ReferenceQueries, CategoryFilter) {
  const auto t = run("Search(fields=[name], filters=[category == landmark])");
  EXPECT_EQ(names(t), (std::vector<std::string>{"Hindenberg Memorial", "The Tower",
                                                "Liberty Memorial", "Einstein's summer house"}));
  EXPECT_EQ(render_results(t),
            "Search Results (4):\nname\nHindenberg Memorial\nThe Tower\nLiberty Memorial\n"
            "Einstein's summer house\n");
}

TEST_F(ReferenceQueries, NoResults) {
  EXPECT_EQ(run_search("Search(fields=[name], filters=[category == concert])", db_),
            "Search Results: No results\n");
}

TEST_F(ReferenceQueries, TextQuery) {
  EXPECT_EQ(names(run("Search(fields=[name], text_query=live music)")),
            (std::vector<std::string>{"Bards n Brews", "Kozy Kar", "Saul's", "A-Trane",
                                      "The Jazz Spot", "The Dockside Grill"}));
}

TEST_F(ReferenceQueries, TextQueryWithPriceFilter) {
  const auto t =
      run("Search(fields=[name, price], text_query=live music, filters=[price <= 40])");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"name", "price"}));
  EXPECT_EQ(t.rows, (std::vector<std::vector<std::string>>{
                        {"Bards n Brews", "20"}, {"Kozy Kar", "30"}, {"The Jazz Spot", "40"}}));
}

TEST_F(ReferenceQueries, SortAddsADistanceColumn) {
  const auto t = run(
      "Search(fields=[name, price], filters=[category == restaurant, price <= 10], "
      "sort_by=[distance_to(The Mall)])");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "El Toro Steakhouse");
  EXPECT_EQ(t.columns.back(), "distance_to(The Mall)");
}

TEST_F(ReferenceQueries, LastSortKeyIsPrimary) {
  const auto t = run(
      "Search(fields=[name, price, distance], filters=[category == restaurant], "
      "sort_by=[distance_to(The Mall), price])");
  EXPECT_EQ(names(t), (std::vector<std::string>{
                          "El Toro Steakhouse", "Taqueria y Mas", "Lucia's", "Cookies Cream",
                          "Mad Seoul", "The Cakery", "The Dockside Grill", "Saul's", "Earthbar",
                          "Caribbean Corner"}));
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LE(std::stoi(t.rows[i - 1][1]), std::stoi(t.rows[i][1]));
  }
}

TEST_F(ReferenceQueries, QuotedTextQueryWithFilterAndSort) {
  EXPECT_EQ(names(run("Search(fields=[name], text_query=\"good for kids\", "
                      "filters=[category == park], sort_by=[distance_to(Saul's)])")),
            (std::vector<std::string>{"Lincoln Park", "Riverside Trail"}));
}

TEST_F(ReferenceQueries, FeatureFiltersAreRefused) {
  EXPECT_EQ(run_search("Search(fields=[name], filters=[vegan == true])", db_),
            "You cannot filter by vegan. Try searching with a text query instead.\n");
  EXPECT_THROW(run("Search(fields=[name], filters=[vegan == true])"), QueryError);
}

TEST_F(ReferenceQueries, LimitAndSelfDistance) {
  const auto t = run("Search(fields=[name], sort_by=[distance_to(Mad Seoul)], limit=2)");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"Mad Seoul", "0.0"}));
}

TEST_F(ReferenceQueries, DistancesAreNonDecreasingAlongTheSortKey) {
  const auto t = run("Search(fields=[name], sort_by=[distance_to(Atlas Park)])");
  ASSERT_EQ(t.rows.size(), db_.sites.size());
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LE(std::stod(t.rows[i - 1][1]), std::stod(t.rows[i][1]));
  }
}

TEST_F(ReferenceQueries, UnknownAnchor) {
  EXPECT_THROW(run("Search(fields=[name], sort_by=[distance_to(Nowhere)])"), QueryError);
}

TEST(ParseQuery, Components) {
  const Query q = parse_query(
      "Search(fields=[name, category], filters=[good for kids OR viewpoint, price <= 30], "
      "text_query=live music, sort_by=[distance_to(Mad Seoul), price], limit=3)");
  EXPECT_EQ(q.fields, (std::vector<std::string>{"name", "category"}));
  ASSERT_EQ(q.filters.size(), 2u);
  EXPECT_EQ(q.filters[0].size(), 2u);
  EXPECT_EQ(q.filters[1][0].op, Comparator::le);
  EXPECT_EQ(q.text_query, "live music");
  ASSERT_EQ(q.sort_by.size(), 2u);
  EXPECT_EQ(q.sort_by[0].anchor, "Mad Seoul");
  EXPECT_EQ(q.sort_by[1].field, "price");
  EXPECT_EQ(q.limit, 3);
}

TEST(ParseQuery, SyntaxErrorsCarryAPosition) {
  try {
    parse_query("Search(fields=[name");
    FAIL() << "expected a syntax error";
  } catch (const QuerySyntaxError& e) {
    EXPECT_NE(e.column(), kNoPosition);
    EXPECT_EQ(std::string(e.what()).rfind("Syntax error at column ", 0), 0u);
  }
  EXPECT_THROW(parse_query("Find(fields=[name])"), QuerySyntaxError);
  EXPECT_THROW(parse_query("Search(limit=x)"), QueryError);
}

TEST(Results, RenderParseRoundTrip) {
  const auto db = testing::reference_database();
  for (const char* q : {"Search(fields=[name, price, info], filters=[category == restaurant])",
                        "Search(fields=[name, category], sort_by=[distance_to(The Mall)])"}) {
    const auto t = execute(parse_query(q), db);
    EXPECT_EQ(parse_results(render_results(t)), t) << q;
  }
  const auto empty = execute(parse_query("Search(fields=[name], filters=[category == concert])"), db);
  EXPECT_TRUE(parse_results(render_results(empty)).rows.empty());
}

TEST(Results, GeneratedWorldsAnswerEveryCategory) {
  const auto w = std::get<PlanningWorld>(generate(TaskId::planning, 11));
  const auto db = query_database(w);
  std::size_t total = 0;
  for (const auto& c : {"restaurant", "bar", "cafe", "park", "museum", "landmark", "shop"}) {
    total += execute(parse_query(std::string("Search(fields=[name], filters=[category == ") + c +
                                 "])"),
                     db)
                 .rows.size();
  }
  EXPECT_EQ(total, w.sites.size());
}

}  // namespace
}  // namespace decdial
