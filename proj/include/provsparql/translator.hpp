#pragma once

#include <functional>
#include <string>
#include <vector>

#include "provsparql/krel.hpp"
#include "provsparql/sparql.hpp"

namespace provsparql {

/// Attribute name used for a query variable inside relations.
inline std::string var_attr(const std::string& v) { return "?" + v; }

/// Fresh attribute names for one translation. Names never repeat.
class NameSupply {
public:
  std::string fresh_graph() { return "G" + std::to_string(++graphs_); }
  /// `?v'n` / `?v''n` style names for renamed copies of a variable.
  std::string fresh_prime(const std::string& var, int primes) {
    return var_attr(var) + std::string(static_cast<std::size_t>(primes), '\'') +
           std::to_string(++primes_);
  }
  std::string fresh_ex() { return "ex" + std::to_string(++ex_); }

private:
  int graphs_ = 0;
  int primes_ = 0;
  int ex_ = 0;
};

/// Compiles graph patterns into relational algebra. Every pattern translated
/// with graph attribute G has schema [G, ?v...] with variables in name order.
class Translator {
public:
  RAPtr translate(const GraphPattern& p, const std::string& graph_attr);

  RAPtr translate_empty(const std::string& graph_attr);
  RAPtr translate_triple(const pat::TriplePattern& t, const std::string& graph_attr);
  RAPtr translate_graph(const PatternTerm& term, const GraphPattern& inner,
                        const std::string& graph_attr);
  RAPtr translate_union(const GraphPattern& p1, const GraphPattern& p2,
                        const std::string& graph_attr);
  RAPtr translate_and(const GraphPattern& p1, const GraphPattern& p2,
                      const std::string& graph_attr);
  RAPtr translate_minus(const GraphPattern& p1, const GraphPattern& p2,
                        const std::string& graph_attr);
  RAPtr translate_filter(const GraphPattern& p, const FilterExpr& r,
                         const std::string& graph_attr);
  /// `r` may be null (plain OPTIONAL).
  RAPtr translate_optional(const GraphPattern& p1, const GraphPattern& p2, const FilterExpr* r,
                           const std::string& graph_attr);

  NameSupply& names() { return names_; }

private:
  RAPtr translate_cached(const GraphPattern& p, const std::string& graph_attr);
  /// `extra` names attributes after [G, vars] that ride along unchanged.
  RAPtr apply_filter(const RAPtr& inner, const std::vector<std::string>& vars,
                     const FilterExpr& r, const std::string& graph_attr,
                     const std::vector<std::string>& extra = {});

  struct AndParts {
    RAPtr merged;
    /// shared variable -> attribute holding the left operand's own value;
    /// filled only when requested.
    std::vector<std::pair<std::string, std::string>> left_copies;
  };
  AndParts and_of(const RAPtr& l, const std::vector<std::string>& lvars, const RAPtr& r,
                  const std::vector<std::string>& rvars, const std::string& graph_attr,
                  bool keep_left = false);

  NameSupply names_;
  std::vector<std::pair<std::pair<const GraphPattern*, std::string>, RAPtr>> cache_;
};

/// `Π_V[σ_{G'=0}(⟦()⟧^{G'} ⋈ ⟦P⟧^{G'})]` for the selected variables. Throws
/// ProjectionError when a selected variable is not in scope.
RAPtr translate_query(const Query& q);

using QueryTranslator = std::function<RAPtr(const Query&)>;

/// Compiles a filter expression into a selection predicate over relations
/// whose variable attributes are `in_scope`; `ex_attrs` names the attribute
/// carrying each EXISTS/NOT EXISTS result (keyed by expression node).
SelPredicate compile_filter(const FilterExpr& r, const std::vector<std::string>& in_scope,
                            const std::vector<std::pair<const FilterExpr*, std::string>>& ex_attrs);

/// Variables bound in every solution of the pattern.
std::vector<std::string> certainly_bound(const GraphPattern& p);

/// True when every EXISTS / NOT EXISTS in the pattern only shares variables
/// with its context that are certainly bound inside the subpattern and do not
/// occur in its MINUS right sides or filter expressions. For such patterns
/// the join-based EXISTS translation agrees with substitution semantics.
bool exists_substitution_safe(const GraphPattern& p);

}  // namespace provsparql
