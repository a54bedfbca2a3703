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

// The planning assistant's Search tool:
//
//   Search(fields=[name, price], filters=[category == bar, price <= 40],
//          text_query=live music, sort_by=[distance_to(Mad Seoul), price],
//          limit=3)
//
// Parsing and execution are deterministic. Errors carry the exact text that
// is handed back to the agent.

#ifndef DECDIAL_QUERY_HPP_
#define DECDIAL_QUERY_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "decdial/common.hpp"
#include "decdial/data.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

// A query the engine refuses; what() is the text shown to the agent.
class QueryError : public ActionError {
 public:
  using ActionError::ActionError;
};

inline constexpr std::size_t kNoPosition = std::string::npos;

// Syntax error with the 1-based column where parsing stopped.
class QuerySyntaxError : public QueryError {
 public:
  QuerySyntaxError(const std::string& what, std::size_t column)
      : QueryError("Syntax error at column " + std::to_string(column) + ": " + what),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

enum class Comparator { truthy, eq, le, ge, lt, gt };

inline std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::truthy: return "";
    case Comparator::eq: return "==";
    case Comparator::le: return "<=";
    case Comparator::ge: return ">=";
    case Comparator::lt: return "<";
    case Comparator::gt: return ">";
  }
  return "";
}

// One predicate. Comparator::truthy is a bare term such as
// "good for kids": the site has that feature and it is not False.
struct Filter {
  std::string field;
  Comparator op = Comparator::truthy;
  std::string literal;
  bool operator==(const Filter&) const = default;
};

// Disjunction of filters; a query holds a conjunction of groups.
using FilterGroup = std::vector<Filter>;

struct SortKey {
  std::string field;            // empty when anchor is set
  std::optional<std::string> anchor;
  bool operator==(const SortKey&) const = default;

  std::string column() const { return anchor ? "distance_to(" + *anchor + ")" : field; }
};

struct Query {
  std::vector<std::string> fields;
  std::vector<FilterGroup> filters;
  std::optional<std::string> text_query;
  std::vector<SortKey> sort_by;
  std::optional<int> limit;
  bool operator==(const Query&) const = default;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool operator==(const ResultTable&) const = default;
};

inline const std::vector<std::string>& filterable_fields() {
  static const std::vector<std::string> f{"name", "category", "price"};
  return f;
}

namespace detail {

inline std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

inline std::string cannot_filter(const std::string& field) {
  return "You cannot filter by " + field + ". Try searching with a text query instead.";
}

// Canonical field name: lowercase, with the database's own column names
// accepted as aliases.
inline std::string canonical_field(const std::string& raw) {
  const std::string f = to_lower(trim(raw));
  if (f == "etype" || f == "type") return "category";
  if (f == "est_price") return "price";
  return f;
}

struct Piece {
  std::string text;
  std::size_t offset = 0;  // 0-based offset of text in the source
};

// Splits on `sep` at bracket depth zero and outside quotes.
inline std::vector<Piece> split_top(const std::string& s, std::size_t base, char sep) {
  std::vector<Piece> out;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"') {
      quote = c;
    } else if (c == '[' || c == '(') {
      ++depth;
    } else if (c == ']' || c == ')') {
      --depth;
    } else if (c == sep && depth == 0) {
      out.push_back({s.substr(start, i - start), base + start});
      start = i + 1;
    }
  }
  out.push_back({s.substr(start), base + start});
  return out;
}

inline bool is_argument_name(const std::string& s) {
  static const std::regex arg(R"(^\s*(fields|filters|text_query|sort_by|limit)\s*=)");
  return std::regex_search(s, arg);
}

// Top-level arguments. A bare text_query may itself contain commas, so a
// comma only separates arguments when a known argument name follows it.
inline std::vector<Piece> split_arguments(const std::string& s, std::size_t base) {
  std::vector<Piece> raw = split_top(s, base, ',');
  std::vector<Piece> out;
  for (auto& p : raw) {
    if (!out.empty() && !is_argument_name(p.text)) {
      out.back().text += "," + p.text;
    } else {
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline std::vector<Piece> parse_list(const Piece& value) {
  const std::string t = trim(value.text);
  const std::size_t lead = value.text.find_first_not_of(" \t");
  const std::size_t at = value.offset + (lead == std::string::npos ? 0 : lead);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw QuerySyntaxError("expected a bracketed list", at + 1);
  }
  std::vector<Piece> items;
  if (trim(t.substr(1, t.size() - 2)).empty()) return items;
  for (auto& p : split_top(t.substr(1, t.size() - 2), at + 1, ',')) {
    if (trim(p.text).empty()) throw QuerySyntaxError("empty list item", p.offset + 1);
    items.push_back(std::move(p));
  }
  return items;
}

inline Filter parse_atom(const std::string& text) {
  static const std::regex cmp(R"(^(.+?)\s*(==|<=|>=|!=|=|<|>)\s*(.+)$)");
  std::smatch m;
  const std::string t = trim(text);
  if (!std::regex_match(t, m, cmp)) {
    return {canonical_field(unquote(t)), Comparator::truthy, ""};
  }
  const std::string field = canonical_field(unquote(m[1]));
  const std::string op = m[2];
  if (std::find(filterable_fields().begin(), filterable_fields().end(), field) ==
      filterable_fields().end()) {
    throw QueryError(cannot_filter(field));
  }
  Comparator c = Comparator::eq;
  if (op == "<=") c = Comparator::le;
  if (op == ">=") c = Comparator::ge;
  if (op == "<") c = Comparator::lt;
  if (op == ">") c = Comparator::gt;
  if (op == "!=") throw QueryError("The != comparison is not supported.");
  const std::string literal = unquote(m[3]);
  if (field == "price") {
    char* end = nullptr;
    std::strtod(literal.c_str(), &end);
    if (literal.empty() || *end != '\0') {
      throw QueryError("price can only be compared with a number, not " + literal + ".");
    }
  } else if (c != Comparator::eq) {
    throw QueryError("Only == can be used with " + field + ".");
  }
  return {field, c, literal};
}

// One bracketed filter item. "a OR b" is a disjunction, "a AND b" two
// separate conjuncts.
inline std::vector<FilterGroup> parse_filter_item(const std::string& text) {
  static const std::regex and_sep(R"(\s+AND\s+)");
  static const std::regex or_sep(R"(\s+OR\s+)");
  std::vector<FilterGroup> groups;
  const std::sregex_token_iterator end;
  for (std::sregex_token_iterator a(text.begin(), text.end(), and_sep, -1); a != end; ++a) {
    const std::string conj = *a;
    FilterGroup g;
    for (std::sregex_token_iterator o(conj.begin(), conj.end(), or_sep, -1); o != end; ++o) {
      g.push_back(parse_atom(*o));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

inline SortKey parse_sort_key(const Piece& p) {
  static const std::regex dist(R"(^distance_to\s*\((.*)\)$)");
  const std::string t = trim(p.text);
  std::smatch m;
  if (std::regex_match(t, m, dist)) {
    const std::string anchor = unquote(m[1]);
    if (anchor.empty()) throw QuerySyntaxError("distance_to needs a site name", p.offset + 1);
    return {"", anchor};
  }
  return {canonical_field(unquote(t)), std::nullopt};
}

}  // namespace detail

inline Query parse_query(const std::string& text) {
  const std::string t = trim(text);
  const std::size_t lead = text.find_first_not_of(" \t\r\n");
  const std::size_t base = lead == std::string::npos ? 0 : lead;
  static const std::regex head(R"(^Search\s*\()");
  std::smatch m;
  if (!std::regex_search(t, m, head)) throw QuerySyntaxError("expected Search(", base + 1);
  if (t.back() != ')') throw QuerySyntaxError("expected a closing parenthesis", base + t.size());
  const std::size_t open = static_cast<std::size_t>(m.length(0));
  const std::string body = t.substr(open, t.size() - open - 1);

  Query q;
  std::set<std::string> seen;
  if (trim(body).empty()) return q;
  for (const auto& arg : detail::split_arguments(body, base + open)) {
    const auto eq = arg.text.find('=');
    if (eq == std::string::npos) {
      throw QuerySyntaxError("expected name=value", arg.offset + 1);
    }
    const std::string name = trim(arg.text.substr(0, eq));
    const detail::Piece value{arg.text.substr(eq + 1), arg.offset + eq + 1};
    if (!seen.insert(name).second) {
      throw QuerySyntaxError("duplicate argument " + name, arg.offset + 1);
    }
    if (name == "fields") {
      for (const auto& item : detail::parse_list(value)) {
        q.fields.push_back(detail::canonical_field(detail::unquote(item.text)));
      }
    } else if (name == "filters") {
      for (const auto& item : detail::parse_list(value)) {
        for (auto& g : detail::parse_filter_item(item.text)) q.filters.push_back(std::move(g));
      }
    } else if (name == "text_query") {
      const std::string tq = detail::unquote(value.text);
      if (!tq.empty()) q.text_query = tq;
    } else if (name == "sort_by") {
      for (const auto& item : detail::parse_list(value)) {
        q.sort_by.push_back(detail::parse_sort_key(item));
      }
    } else if (name == "limit") {
      const std::string v = trim(value.text);
      static const std::regex digits(R"(^-?\d+$)");
      if (!std::regex_match(v, digits)) {
        throw QuerySyntaxError("limit must be an integer", value.offset + 1);
      }
      const long long n = std::stoll(v);
      if (n <= 0) throw QueryError("limit must be a positive integer.");
      q.limit = static_cast<int>(std::min<long long>(n, 1000000));
    } else {
      throw QuerySyntaxError("unknown argument " + name, arg.offset + 1);
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// Execution

struct QueryDatabase {
  std::vector<Site> sites;
  double miles_per_unit = 69.0;

  int find(const std::string& name) const {
    const std::string wanted = to_lower(trim(name));
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (to_lower(sites[i].name) == wanted) return static_cast<int>(i);
    }
    return -1;
  }

  double miles(int a, int b) const {
    const auto& p = sites.at(a).loc;
    const auto& q = sites.at(b).loc;
    return std::hypot(p[0] - q[0], p[1] - q[1]) * miles_per_unit;
  }
};

inline QueryDatabase query_database(const PlanningWorld& w) {
  return {w.sites, w.params.miles_per_unit};
}

// Read-only summary of a site's features: true flags by name, labels bare,
// ratings as "rating: x"; false flags omitted.
inline std::string site_info(const Site& s) {
  std::vector<std::string> parts;
  for (const auto& [name, v] : s.features) {
    if (const bool* b = std::get_if<bool>(&v)) {
      if (*b) parts.push_back(name);
    } else if (const double* d = std::get_if<double>(&v)) {
      parts.push_back(name + ": " + format_number(*d));
    } else {
      parts.push_back(std::get<std::string>(v));
    }
  }
  return join(parts, ", ");
}

namespace detail {

enum class TermKind { feature, category, label, word };

struct Term {
  TermKind kind = TermKind::word;
  std::string value;
};

inline std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : to_lower(text)) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-') {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Phrase dictionary for text queries: feature names, categories, labels,
// and the synonym table, all keyed by their lowercase word sequence.
inline std::map<std::string, Term> phrase_dictionary(const QueryDatabase& db) {
  std::map<std::string, Term> dict;
  const Catalog& cat = catalog();
  auto add = [&dict](const std::string& phrase, Term t) {
    dict.emplace(join(words_of(phrase), " "), std::move(t));
  };
  for (const auto& [phrase, target] : synonyms().phrases) {
    add(phrase, {target.kind == SynonymTarget::Kind::feature ? TermKind::feature
                                                             : TermKind::category,
                 target.name});
  }
  for (const auto& f : cat.features) {
    add(f.name, {TermKind::feature, f.name});
    for (const auto& l : f.labels) add(l, {TermKind::label, l});
  }
  for (const auto& c : cat.categories) add(c, {TermKind::category, c});
  for (const auto& s : db.sites) {
    for (const auto& [name, v] : s.features) {
      add(name, {TermKind::feature, name});
      if (const auto* l = std::get_if<std::string>(&v)) add(*l, {TermKind::label, *l});
    }
    add(s.category, {TermKind::category, s.category});
  }
  return dict;
}

inline std::vector<Term> text_terms(const std::string& query, const QueryDatabase& db) {
  constexpr std::size_t kMaxPhraseWords = 4;
  const auto dict = phrase_dictionary(db);
  const auto words = words_of(query);
  std::vector<Term> terms;
  for (std::size_t i = 0; i < words.size();) {
    bool matched = false;
    for (std::size_t len = std::min(kMaxPhraseWords, words.size() - i); len >= 1; --len) {
      const std::vector<std::string> span(words.begin() + static_cast<std::ptrdiff_t>(i),
                                          words.begin() + static_cast<std::ptrdiff_t>(i + len));
      const auto it = dict.find(join(span, " "));
      if (it != dict.end()) {
        terms.push_back(it->second);
        i += len;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (!synonyms().is_stopword(words[i])) terms.push_back({TermKind::word, words[i]});
    ++i;
  }
  return terms;
}

inline bool term_matches(const Term& t, const Site& s) {
  switch (t.kind) {
    case TermKind::feature: return s.features.count(t.value) > 0;
    case TermKind::category: return s.category == t.value;
    case TermKind::label:
      for (const auto& [name, v] : s.features) {
        const auto* l = std::get_if<std::string>(&v);
        if (l && to_lower(*l) == to_lower(t.value)) return true;
      }
      return false;
    case TermKind::word: {
      std::vector<std::string> pool = words_of(s.name);
      for (const auto& [name, v] : s.features) {
        for (auto& w : words_of(name)) pool.push_back(std::move(w));
        if (const auto* l = std::get_if<std::string>(&v)) {
          for (auto& w : words_of(*l)) pool.push_back(std::move(w));
        }
      }
      return std::find(pool.begin(), pool.end(), t.value) != pool.end();
    }
  }
  return false;
}

inline bool known_feature(const std::string& name, const QueryDatabase& db) {
  if (catalog().find_feature(name)) return true;
  return std::any_of(db.sites.begin(), db.sites.end(),
                     [&](const Site& s) { return s.features.count(name) > 0; });
}

inline bool filter_matches(const Filter& f, const Site& s) {
  if (f.op == Comparator::truthy) {
    if (f.field == s.category) return true;
    const FeatureValue* v = s.find(f.field);
    if (!v) return false;
    if (const bool* b = std::get_if<bool>(v)) return *b;
    return true;
  }
  if (f.field == "price") {
    const double x = s.price;
    const double y = std::strtod(f.literal.c_str(), nullptr);
    switch (f.op) {
      case Comparator::eq: return x == y;
      case Comparator::le: return x <= y;
      case Comparator::ge: return x >= y;
      case Comparator::lt: return x < y;
      case Comparator::gt: return x > y;
      case Comparator::truthy: break;
    }
    return false;
  }
  const std::string& value = f.field == "name" ? s.name : s.category;
  return to_lower(value) == to_lower(f.literal);
}

}  // namespace detail

inline ResultTable execute(const Query& q, const QueryDatabase& db) {
  // Validate references before touching rows.
  std::vector<int> anchors;
  for (const auto& k : q.sort_by) {
    if (k.anchor) {
      const int a = db.find(*k.anchor);
      if (a < 0) throw QueryError("Unknown site: " + *k.anchor + ".");
      anchors.push_back(a);
    } else if (k.field != "name" && k.field != "category" && k.field != "price" &&
               !detail::known_feature(k.field, db)) {
      throw QueryError("You cannot sort by " + k.field + ".");
    }
  }
  for (const auto& g : q.filters) {
    for (const auto& f : g) {
      if (f.op == Comparator::truthy && !catalog().is_category(f.field) &&
          !detail::known_feature(f.field, db)) {
        throw QueryError(detail::cannot_filter(f.field));
      }
    }
  }
  const bool wants_distance =
      std::find(q.fields.begin(), q.fields.end(), "distance") != q.fields.end();
  if (wants_distance && anchors.empty()) {
    throw QueryError("The distance field needs sort_by=[distance_to(<site>)].");
  }
  for (const auto& f : q.fields) {
    if (f != "name" && f != "category" && f != "price" && f != "info" && f != "distance" &&
        !detail::known_feature(f, db)) {
      throw QueryError("Unknown field: " + f + ".");
    }
  }

  std::vector<int> rows;
  const auto terms = q.text_query ? detail::text_terms(*q.text_query, db)
                                  : std::vector<detail::Term>{};
  for (std::size_t i = 0; i < db.sites.size(); ++i) {
    const Site& s = db.sites[i];
    const bool pass_filters = std::all_of(q.filters.begin(), q.filters.end(), [&](const FilterGroup& g) {
      return std::any_of(g.begin(), g.end(), [&](const Filter& f) { return detail::filter_matches(f, s); });
    });
    if (!pass_filters) continue;
    const bool pass_text = std::all_of(terms.begin(), terms.end(), [&](const detail::Term& t) {
      return detail::term_matches(t, s);
    });
    if (pass_text) rows.push_back(static_cast<int>(i));
  }

  if (!q.sort_by.empty()) {
    std::stable_sort(rows.begin(), rows.end(),
                     [&](int a, int b) { return db.sites[a].name < db.sites[b].name; });
    // Stable passes in listed order: the last key ends up primary.
    std::size_t anchor_idx = 0;
    for (const auto& k : q.sort_by) {
      if (k.anchor) {
        const int a = anchors[anchor_idx++];
        std::stable_sort(rows.begin(), rows.end(),
                         [&](int x, int y) { return db.miles(a, x) < db.miles(a, y); });
      } else if (k.field == "price") {
        std::stable_sort(rows.begin(), rows.end(),
                         [&](int x, int y) { return db.sites[x].price < db.sites[y].price; });
      } else if (k.field == "name" || k.field == "category") {
        std::stable_sort(rows.begin(), rows.end(), [&](int x, int y) {
          return k.field == "name" ? db.sites[x].name < db.sites[y].name
                                   : db.sites[x].category < db.sites[y].category;
        });
      } else {
        // Feature sort: sites lacking the feature go last.
        std::stable_sort(rows.begin(), rows.end(), [&](int x, int y) {
          const FeatureValue* vx = db.sites[x].find(k.field);
          const FeatureValue* vy = db.sites[y].find(k.field);
          if (!vx || !vy) return vx && !vy;
          return *vx < *vy;
        });
      }
    }
  }
  if (q.limit && static_cast<int>(rows.size()) > *q.limit) rows.resize(*q.limit);

  ResultTable t;
  struct Column {
    std::string field;
    int anchor = -1;
  };
  std::vector<Column> cols;
  for (const auto& f : q.fields) {
    t.columns.push_back(f);
    cols.push_back({f, f == "distance" ? anchors.front() : -1});
  }
  std::size_t anchor_idx = 0;
  for (const auto& k : q.sort_by) {
    const int a = k.anchor ? anchors[anchor_idx++] : -1;
    if (k.anchor) {
      const bool shown = std::any_of(cols.begin(), cols.end(),
                                     [&](const Column& c) { return c.anchor == a; });
      if (shown) continue;
      t.columns.push_back(k.column());
      cols.push_back({"distance", a});
    } else if (std::find(t.columns.begin(), t.columns.end(), k.field) == t.columns.end()) {
      t.columns.push_back(k.field);
      cols.push_back({k.field, -1});
    }
  }
  for (int r : rows) {
    const Site& s = db.sites[r];
    std::vector<std::string> cells;
    for (const auto& c : cols) {
      if (c.anchor >= 0) {
        cells.push_back(format_tenths(db.miles(c.anchor, r)));
      } else if (c.field == "name") {
        cells.push_back(s.name);
      } else if (c.field == "category") {
        cells.push_back(s.category);
      } else if (c.field == "price") {
        cells.push_back(std::to_string(s.price));
      } else if (c.field == "info") {
        cells.push_back(site_info(s));
      } else {
        const FeatureValue* v = s.find(c.field);
        cells.push_back(v ? feature_value_text(*v) : "");
      }
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline ResultTable execute(const Query& q, const PlanningWorld& w) {
  return execute(q, query_database(w));
}

inline constexpr const char* kNoResults = "Search Results: No results";

inline std::string render_results(const ResultTable& t) {
  if (t.rows.empty()) return std::string(kNoResults) + "\n";
  std::string out = "Search Results (" + std::to_string(t.rows.size()) + "):\n";
  out += join(t.columns, "|") + "\n";
  for (const auto& r : t.rows) out += join(r, "|") + "\n";
  return out;
}

// Inverse of render_results. An empty table has no recoverable columns.
inline ResultTable parse_results(const std::string& text) {
  std::vector<std::string> lines = split(text, "\n");
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw SchemaError("empty search result");
  if (lines[0] == kNoResults) return {};
  static const std::regex head(R"(^Search Results \((\d+)\):$)");
  std::smatch m;
  if (!std::regex_match(lines[0], m, head)) throw SchemaError("bad result header: " + lines[0]);
  const auto n = static_cast<std::size_t>(std::stoul(m[1]));
  if (lines.size() != n + 2) throw SchemaError("row count does not match the header");
  ResultTable t;
  t.columns = split(lines[1], "|");
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto cells = split(lines[i], "|");
    if (cells.size() != t.columns.size()) throw SchemaError("ragged result row: " + lines[i]);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

// Parse, execute and render; refusals become the text shown to the agent.
inline std::string run_search(const std::string& text, const QueryDatabase& db) {
  try {
    return render_results(execute(parse_query(text), db));
  } catch (const QueryError& e) {
    return std::string(e.what()) + "\n";
  }
}

}  // namespace decdial

#endif  // DECDIAL_QUERY_HPP_
