#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "provsparql/rdf.hpp"

namespace provsparql {

/// A query variable, stored without its leading `?`.
struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Variable, RdfTerm>;

class GraphPattern;
class FilterExpr;
using PatternPtr = std::shared_ptr<const GraphPattern>;
using FilterPtr = std::shared_ptr<const FilterExpr>;

namespace pat {
struct Empty {};
struct TriplePattern {
  PatternTerm subj;
  PatternTerm pred;
  PatternTerm obj;
};
struct And { PatternPtr left, right; };
struct Union { PatternPtr left, right; };
struct Minus { PatternPtr left, right; };
/// `filter` is set only for `OPTIONAL { ... FILTER R }`.
struct Optional { PatternPtr left, right; FilterPtr filter; };
struct Filter { PatternPtr inner; FilterPtr expr; };
struct Graph { PatternTerm term; PatternPtr inner; };
}  // namespace pat

class GraphPattern {
public:
  using Node = std::variant<pat::Empty, pat::TriplePattern, pat::And, pat::Union,
                            pat::Minus, pat::Optional, pat::Filter, pat::Graph>;

  explicit GraphPattern(Node node) : node_(std::move(node)) {}
  const Node& node() const { return node_; }

  template <class T>
  const T* as() const { return std::get_if<T>(&node_); }

private:
  Node node_;
};

namespace fx {
struct Eq { PatternTerm left, right; };
struct Neq { PatternTerm left, right; };
struct Bound { Variable var; };
struct Not { FilterPtr inner; };
struct And { FilterPtr left, right; };
struct Or { FilterPtr left, right; };
struct Exists { PatternPtr pattern; };
struct NotExists { PatternPtr pattern; };
struct Const { bool value; };
}  // namespace fx

class FilterExpr {
public:
  using Node = std::variant<fx::Eq, fx::Neq, fx::Bound, fx::Not, fx::And, fx::Or,
                            fx::Exists, fx::NotExists, fx::Const>;

  explicit FilterExpr(Node node) : node_(std::move(node)) {}
  const Node& node() const { return node_; }

  template <class T>
  const T* as() const { return std::get_if<T>(&node_); }

private:
  Node node_;
};

PatternPtr make_empty();
PatternPtr make_triple(PatternTerm s, PatternTerm p, PatternTerm o);
PatternPtr make_and(PatternPtr l, PatternPtr r);
PatternPtr make_union(PatternPtr l, PatternPtr r);
PatternPtr make_minus(PatternPtr l, PatternPtr r);
PatternPtr make_optional(PatternPtr l, PatternPtr r, FilterPtr filter = nullptr);
PatternPtr make_filter(PatternPtr inner, FilterPtr expr);
PatternPtr make_graph(PatternTerm term, PatternPtr inner);

FilterPtr make_eq(PatternTerm l, PatternTerm r);
FilterPtr make_neq(PatternTerm l, PatternTerm r);
FilterPtr make_bound(std::string var);
FilterPtr make_not(FilterPtr e);
FilterPtr make_fand(FilterPtr l, FilterPtr r);
FilterPtr make_for(FilterPtr l, FilterPtr r);
FilterPtr make_exists(PatternPtr p);
FilterPtr make_not_exists(PatternPtr p);
FilterPtr make_const(bool v);

inline PatternTerm var(std::string name) { return Variable{std::move(name)}; }
inline PatternTerm iri(std::string s) { return RdfTerm::iri(std::move(s)); }

/// Deep structural equality.
bool same_pattern(const GraphPattern& a, const GraphPattern& b);
bool same_filter(const FilterExpr& a, const FilterExpr& b);

/// In-scope variables of a pattern, sorted by name: a MINUS contributes only
/// its left side and filter subpatterns are not entered.
std::vector<std::string> var_of(const GraphPattern& p);

/// Every variable occurring anywhere in the pattern, including MINUS right
/// sides and filter expressions (with their EXISTS subpatterns). Sorted.
std::vector<std::string> all_variables(const GraphPattern& p);
std::vector<std::string> filter_variables(const FilterExpr& e);

/// EXISTS / NOT EXISTS subpatterns of a filter expression, left to right.
std::vector<const FilterExpr*> exists_nodes(const FilterExpr& e);

struct Query {
  std::map<std::string, std::string> prefixes;
  /// Empty means `SELECT *`.
  std::optional<std::vector<std::string>> projection;
  PatternPtr pattern;

  /// The projected variables: the explicit list, or var_of(pattern).
  std::vector<std::string> selected() const;
};

/// One element of a `{ ... }` group, in source order. Nested groups are
/// already desugared.
namespace group {
struct Triple { pat::TriplePattern tp; };
struct Optional { PatternPtr inner; };
struct Minus { PatternPtr inner; };
struct Filter { FilterPtr expr; };
struct Sub { PatternPtr inner; };  // nested group or UNION chain
struct Graph { PatternTerm term; PatternPtr inner; };
}  // namespace group

using GroupItem = std::variant<group::Triple, group::Optional, group::Minus,
                               group::Filter, group::Sub, group::Graph>;

/// Folds group items into a pattern. A run of one triple stays bare; a run of
/// n >= 2 triples becomes `(() AND (t1 AND (... AND tn)))`. OPTIONAL and MINUS
/// apply to everything accumulated so far, FILTERs apply to the whole group.
PatternPtr desugar_group(const std::vector<GroupItem>& items);

Query parse_query(std::string_view text);

/// Stable s-expression rendering, one node per line, two-space indent.
std::string print_pattern(const GraphPattern& p);
std::string print_query(const Query& q);
std::string render_pattern_term(const PatternTerm& t);

}  // namespace provsparql
