#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "provsparql/rdf.hpp"
#include "provsparql/sparql.hpp"

namespace provsparql {

/// Partial map variable -> term. Absence means unbound.
using SolutionMapping = std::map<std::string, RdfTerm>;

/// Multiset of mappings; every stored multiplicity is >= 1.
class SolutionMultiset {
public:
  SolutionMultiset() = default;
  SolutionMultiset(std::initializer_list<std::pair<const SolutionMapping, std::uint64_t>> init);

  void add(const SolutionMapping& mu, std::uint64_t count = 1);
  std::uint64_t count(const SolutionMapping& mu) const;
  /// Total cardinality, counting duplicates.
  std::uint64_t size() const;
  bool empty() const { return elems_.empty(); }
  std::size_t distinct() const { return elems_.size(); }

  const std::map<SolutionMapping, std::uint64_t>& elements() const { return elems_; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  friend bool operator==(const SolutionMultiset&, const SolutionMultiset&) = default;

private:
  std::map<SolutionMapping, std::uint64_t> elems_;
};

bool compatible(const SolutionMapping& a, const SolutionMapping& b);

SolutionMultiset join(const SolutionMultiset& a, const SolutionMultiset& b);
SolutionMultiset multiset_union(const SolutionMultiset& a, const SolutionMultiset& b);
SolutionMultiset minus(const SolutionMultiset& a, const SolutionMultiset& b);

/// Evaluation context: the dataset and the active graph (0 = default).
struct ActiveGraph {
  const Dataset& dataset;
  std::size_t gid = 0;
};

SolutionMultiset diff(const SolutionMultiset& a, const SolutionMultiset& b,
                      const FilterExpr& r, ActiveGraph g);
SolutionMultiset left_join(const SolutionMultiset& a, const SolutionMultiset& b,
                           const FilterExpr& r, ActiveGraph g);

bool satisfies(const SolutionMapping& mu, const FilterExpr& r, ActiveGraph g);

SolutionMultiset eval(const GraphPattern& p, ActiveGraph g);
inline SolutionMultiset eval(const GraphPattern& p, const Dataset& d) {
  return eval(p, ActiveGraph{d, 0});
}

/// Replaces variables bound in `mu` by their terms, throughout the pattern
/// including filter expressions.
PatternPtr substitute(const SolutionMapping& mu, const PatternPtr& p);
FilterPtr substitute(const SolutionMapping& mu, const FilterPtr& e);

/// Evaluates the query pattern and restricts every mapping to the selected
/// variables (bag projection).
SolutionMultiset eval_query(const Query& q, const Dataset& d);

std::string render_mapping(const SolutionMapping& mu);

}  // namespace provsparql
