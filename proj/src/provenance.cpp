#include "provsparql/provenance.hpp"

#include <algorithm>

namespace provsparql {

bool row_values_less(const RowValues& a, const RowValues& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const std::optional<std::string>& x, const std::optional<std::string>& y) {
        if (x.has_value() != y.has_value()) return x.has_value();
        return x.has_value() && *x < *y;
      });
}

namespace {

RowValues decode(const Tuple& t) {
  RowValues out;
  out.reserve(t.size());
  for (const auto& v : t) {
    if (v.is_unb()) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(v.text());
    }
  }
  return out;
}

template <MSemiring S, class Row, class Wrap>
std::vector<Row> collect(const KRelation<S>& rel, Wrap wrap) {
  std::vector<Row> rows;
  for (const auto& [t, a] : rel.rows()) rows.push_back(wrap(decode(t), a));
  std::sort(rows.begin(), rows.end(),
            [](const Row& x, const Row& y) { return row_values_less(x.values, y.values); });
  return rows;
}

}  // namespace

AnnotatedResult run_provenance(const Query& q, const Dataset& d) {
  RAPtr e = translate_query(q);
  const BaseDb db = encode_dataset(d);
  BaseAnnotations<FreeSemiring> ann;
  for (const auto& id : db.graph_ids) ann.graphs.push_back(ProvTerm::id(id));
  for (const auto& id : db.quad_ids) ann.quads.push_back(ProvTerm::id(id));
  auto rel = eval_ra(*e, db, free_semiring(), ann);
  return {q.selected(), collect<FreeSemiring, AnnotatedRow>(rel, [](RowValues v, const ProvTerm& a) {
            return AnnotatedRow{std::move(v), normalize(a)};
          })};
}

CountedResult run_counts(const Query& q, const Dataset& d, const QueryTranslator& translate) {
  RAPtr e = translate(q);
  const BaseDb db = encode_dataset(d);
  auto rel = eval_ra(*e, db, nat_semiring(), unit_annotations<NatSemiring>(db));
  return {q.selected(), collect<NatSemiring, CountedRow>(rel, [](RowValues v, std::uint64_t n) {
            return CountedRow{std::move(v), n};
          })};
}

std::vector<bool> apply_trust(const AnnotatedResult& r, const TrustAssignment& ta,
                              bool default_trust) {
  Homomorphism<BoolSemiring> h;
  h.assignment = ta;
  h.fallback = default_trust;
  std::vector<bool> out;
  out.reserve(r.rows.size());
  for (const auto& row : r.rows) out.push_back(hom_eval(row.annotation, h));
  return out;
}

CountedResult reference_counts(const Query& q, const Dataset& d) {
  CountedResult out{q.selected(), {}};
  for (const auto& [mu, n] : eval_query(q, d)) {
    RowValues values;
    for (const auto& v : out.columns) {
      auto it = mu.find(v);
      values.push_back(it == mu.end() ? std::nullopt : std::optional(encode_term(it->second)));
    }
    out.rows.push_back({std::move(values), n});
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const CountedRow& x, const CountedRow& y) {
    return row_values_less(x.values, y.values);
  });
  return out;
}

bool CountCheckReport::matches() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const CountCheckRow& r) { return r.ra_count == r.ref_count; });
}

CountCheckReport count_check(const Query& q, const Dataset& d, const QueryTranslator& translate) {
  const CountedResult ra = run_counts(q, d, translate);
  const CountedResult ref = reference_counts(q, d);

  std::map<RowValues, std::pair<std::uint64_t, std::uint64_t>, decltype(&row_values_less)> merged(
      &row_values_less);
  for (const auto& r : ra.rows) merged[r.values].first += r.count;
  for (const auto& r : ref.rows) merged[r.values].second += r.count;

  CountCheckReport report{ra.columns, {}};
  for (const auto& [values, counts] : merged) {
    report.rows.push_back({values, counts.first, counts.second});
  }
  return report;
}

}  // namespace provsparql
