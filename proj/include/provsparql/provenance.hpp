#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "provsparql/krel.hpp"
#include "provsparql/msemiring.hpp"
#include "provsparql/ref_eval.hpp"
#include "provsparql/translator.hpp"

namespace provsparql {

/// One projected row: encoded term per column, nullopt when unbound.
using RowValues = std::vector<std::optional<std::string>>;

struct AnnotatedRow {
  RowValues values;
  ProvTerm annotation;
};

struct AnnotatedResult {
  std::vector<std::string> columns;  // variable names, without '?'
  std::vector<AnnotatedRow> rows;    // sorted by values, unbound last
};

struct CountedRow {
  RowValues values;
  std::uint64_t count;
};

struct CountedResult {
  std::vector<std::string> columns;
  std::vector<CountedRow> rows;
};

/// Orders rows by their values; an unbound cell sorts after any term.
bool row_values_less(const RowValues& a, const RowValues& b);

/// Annotates every Graphs row with g<i> and every Quads row with t<i>,
/// evaluates the translated query in the free m-semiring.
AnnotatedResult run_provenance(const Query& q, const Dataset& d);

/// Bag evaluation: every base row annotated 1 in the natural numbers.
CountedResult run_counts(const Query& q, const Dataset& d,
                         const QueryTranslator& translate = translate_query);

using TrustAssignment = std::map<std::string, bool>;

/// Evaluates each row's annotation in the boolean m-semiring. Identifiers
/// missing from `ta` get `default_trust`.
std::vector<bool> apply_trust(const AnnotatedResult& r, const TrustAssignment& ta,
                              bool default_trust = true);

struct CountCheckRow {
  RowValues values;
  std::uint64_t ra_count;
  std::uint64_t ref_count;
};

struct CountCheckReport {
  std::vector<std::string> columns;
  std::vector<CountCheckRow> rows;  // union of both supports
  bool matches() const;
};

/// Compares the bag evaluation of the translated query with the reference
/// evaluator, row by row.
CountCheckReport count_check(const Query& q, const Dataset& d,
                             const QueryTranslator& translate = translate_query);

/// The reference evaluator's result in the same row shape as run_counts.
CountedResult reference_counts(const Query& q, const Dataset& d);

}  // namespace provsparql
