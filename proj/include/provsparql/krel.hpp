#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "provsparql/error.hpp"
#include "provsparql/msemiring.hpp"
#include "provsparql/rdf.hpp"

namespace provsparql {

/// Attribute value: an encoded RDF term, the unbound marker, or a graph id.
/// `unb` never equals any encoded term.
class Value {
public:
  enum class Kind : std::uint8_t { Term, Unb, Gid };

  static Value term(std::string encoded) { return Value(Kind::Term, std::move(encoded), 0); }
  static Value unb() { return Value(Kind::Unb, {}, 0); }
  static Value gid(std::uint64_t n) { return Value(Kind::Gid, {}, n); }

  Kind kind() const { return kind_; }
  bool is_unb() const { return kind_ == Kind::Unb; }
  const std::string& text() const { return text_; }
  std::uint64_t gid_value() const { return gid_; }

  /// `unb`, the graph number, or the encoded term.
  std::string to_string() const;

  friend auto operator<=>(const Value&, const Value&) = default;
  friend bool operator==(const Value&, const Value&) = default;

private:
  Value(Kind k, std::string t, std::uint64_t g) : kind_(k), text_(std::move(t)), gid_(g) {}

  Kind kind_;
  std::string text_;
  std::uint64_t gid_;
};

using Tuple = std::vector<Value>;

/// Ordered attribute names, no duplicates.
class Schema {
public:
  Schema() = default;
  Schema(std::vector<std::string> attrs);  // NOLINT(google-explicit-constructor)
  Schema(std::initializer_list<std::string> attrs) : Schema(std::vector<std::string>(attrs)) {}

  const std::vector<std::string>& attrs() const { return attrs_; }
  std::size_t size() const { return attrs_.size(); }
  bool contains(const std::string& a) const;
  /// Throws UnknownAttribute.
  std::size_t index_of(const std::string& a) const;

  friend bool operator==(const Schema&, const Schema&) = default;

private:
  std::vector<std::string> attrs_;
};

std::string to_string(const Schema& s);

// ---------------------------------------------------------------------------
// Selection predicates

class SelPredicate {
public:
  enum class Kind : std::uint8_t {
    True, False, And, Or, Not,
    AttrEqAttr,   // a = b (raw value equality, unb = unb)
    AttrEqConst,  // a = value
    AttrNeqConst, // a != value
    GidGreater,   // a is a graph id > n
  };

  static SelPredicate always() { return SelPredicate(Kind::True); }
  static SelPredicate never() { return SelPredicate(Kind::False); }
  static SelPredicate eq(std::string a, std::string b);
  static SelPredicate eq(std::string a, Value v);
  static SelPredicate neq(std::string a, Value v);
  static SelPredicate gid_greater(std::string a, std::uint64_t n);
  static SelPredicate conj(std::vector<SelPredicate> parts);
  static SelPredicate disj(std::vector<SelPredicate> parts);
  static SelPredicate negate(SelPredicate p);

  Kind kind() const { return kind_; }
  const std::string& left() const { return left_; }
  const std::string& right() const { return right_; }
  const Value& value() const { return value_; }
  std::uint64_t bound() const { return bound_; }
  const std::vector<SelPredicate>& children() const { return children_; }

  /// Attributes referenced, in first-occurrence order.
  std::vector<std::string> attributes() const;

  /// Resolves attribute names against `schema` once; the result tests tuples.
  std::function<bool(const Tuple&)> bind(const Schema& schema) const;

  std::string to_string() const;

private:
  explicit SelPredicate(Kind k) : kind_(k), value_(Value::unb()) {}

  Kind kind_;
  std::string left_;
  std::string right_;
  Value value_;
  std::uint64_t bound_ = 0;
  std::vector<SelPredicate> children_;
};

// ---------------------------------------------------------------------------
// Relational algebra expressions

/// Output column of an extended projection.
struct ProjCol {
  enum class Fn : std::uint8_t { Keep, ConstUnb, ConstGid, First };

  std::string name;    // output attribute
  Fn fn = Fn::Keep;
  std::string a;       // Keep / First: source attributes
  std::string b;
  std::uint64_t gid = 0;

  static ProjCol keep(std::string attr) { return {attr, Fn::Keep, attr, {}, 0}; }
  /// Copies attribute `src` under the name `out`.
  static ProjCol keep_as(std::string out, std::string src) {
    return {std::move(out), Fn::Keep, std::move(src), {}, 0};
  }
  static ProjCol const_unb(std::string out) { return {std::move(out), Fn::ConstUnb, {}, {}, 0}; }
  static ProjCol const_gid(std::string out, std::uint64_t n) {
    return {std::move(out), Fn::ConstGid, {}, {}, n};
  }
  /// First non-unb of (a, b), or unb.
  static ProjCol first(std::string out, std::string a, std::string b) {
    return {std::move(out), Fn::First, std::move(a), std::move(b), 0};
  }

  std::string to_string() const;
};

class RAExpr;
using RAPtr = std::shared_ptr<const RAExpr>;

namespace ra {
struct BaseGraphs {};
struct BaseQuads {};
struct Select { SelPredicate pred; RAPtr input; };
struct Project { std::vector<ProjCol> cols; RAPtr input; };
/// old name -> new name; unlisted attributes keep their names.
struct Rename { std::vector<std::pair<std::string, std::string>> mapping; RAPtr input; };
struct NatJoin { RAPtr left, right; };
struct Union { RAPtr left, right; };
struct Diff { RAPtr left, right; };
/// Duplicate elimination; delta_1 in annotated evaluation.
struct DupElim { RAPtr input; };
}  // namespace ra

/// Immutable RA node. The output schema is computed and validated when the
/// node is built (SchemaMismatch / UnknownAttribute).
class RAExpr {
public:
  using Node = std::variant<ra::BaseGraphs, ra::BaseQuads, ra::Select, ra::Project,
                            ra::Rename, ra::NatJoin, ra::Union, ra::Diff, ra::DupElim>;

  RAExpr(Node node, Schema schema) : node_(std::move(node)), schema_(std::move(schema)) {}

  const Node& node() const { return node_; }
  const Schema& schema() const { return schema_; }

  template <class T>
  const T* as() const { return std::get_if<T>(&node_); }

private:
  Node node_;
  Schema schema_;
};

const Schema& graphs_schema();  // [gid, IRI]
const Schema& quads_schema();   // [gid, sub, pred, obj]

RAPtr ra_graphs();
RAPtr ra_quads();
RAPtr ra_select(SelPredicate pred, RAPtr input);
RAPtr ra_project(std::vector<ProjCol> cols, RAPtr input);
/// Keeps the listed attributes in the given order.
RAPtr ra_project_keep(const std::vector<std::string>& attrs, RAPtr input);
RAPtr ra_rename(std::vector<std::pair<std::string, std::string>> mapping, RAPtr input);
RAPtr ra_join(RAPtr left, RAPtr right);
RAPtr ra_union(RAPtr left, RAPtr right);
RAPtr ra_diff(RAPtr left, RAPtr right);
RAPtr ra_dupelim(RAPtr input);

/// Indented tree, one operator per line.
std::string print_ra(const RAExpr& e);

/// Number of nodes of each operator name ("Diff", "DupElim", ...), counting
/// shared subtrees once per occurrence.
std::map<std::string, std::size_t> count_ra_nodes(const RAExpr& e);

// ---------------------------------------------------------------------------
// K-relations

/// A K-relation: tuples of the schema's arity mapped to nonzero annotations.
template <MSemiring S>
class KRelation {
public:
  using Annot = typename S::value_type;

  KRelation() = default;
  KRelation(Schema schema, S semiring = {}) : schema_(std::move(schema)), s_(semiring) {}

  const Schema& schema() const { return schema_; }
  const S& semiring() const { return s_; }
  const std::map<Tuple, Annot>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// Adds `a` to the annotation of `t`; zero results leave the support.
  void accumulate(const Tuple& t, const Annot& a) {
    if (t.size() != schema_.size()) throw SchemaMismatch("tuple arity does not match schema");
    if (s_.is_zero(a)) return;
    auto it = rows_.find(t);
    if (it == rows_.end()) {
      rows_.emplace(t, a);
      return;
    }
    Annot sum = s_.add(it->second, a);
    if (s_.is_zero(sum)) {
      rows_.erase(it);
    } else {
      it->second = std::move(sum);
    }
  }

  /// Annotation of `t`, zero when outside the support.
  Annot at(const Tuple& t) const {
    auto it = rows_.find(t);
    return it == rows_.end() ? s_.zero() : it->second;
  }

private:
  Schema schema_;
  S s_{};
  std::map<Tuple, Annot> rows_;
};

template <MSemiring S>
KRelation<S> rel_union(const KRelation<S>& r1, const KRelation<S>& r2) {
  if (!(r1.schema() == r2.schema())) {
    throw SchemaMismatch("union of " + to_string(r1.schema()) + " and " + to_string(r2.schema()));
  }
  KRelation<S> out = r1;
  for (const auto& [t, a] : r2.rows()) out.accumulate(t, a);
  return out;
}

template <MSemiring S>
KRelation<S> rel_project(const std::vector<ProjCol>& cols, const KRelation<S>& r) {
  std::vector<std::string> names;
  for (const auto& c : cols) names.push_back(c.name);
  KRelation<S> out(Schema(names), r.semiring());
  struct Src { ProjCol::Fn fn; std::size_t a, b; std::uint64_t gid; };
  std::vector<Src> src;
  for (const auto& c : cols) {
    Src s{c.fn, 0, 0, c.gid};
    if (c.fn == ProjCol::Fn::Keep || c.fn == ProjCol::Fn::First) s.a = r.schema().index_of(c.a);
    if (c.fn == ProjCol::Fn::First) s.b = r.schema().index_of(c.b);
    src.push_back(s);
  }
  for (const auto& [t, a] : r.rows()) {
    Tuple o;
    o.reserve(src.size());
    for (const auto& s : src) {
      switch (s.fn) {
        case ProjCol::Fn::Keep: o.push_back(t[s.a]); break;
        case ProjCol::Fn::ConstUnb: o.push_back(Value::unb()); break;
        case ProjCol::Fn::ConstGid: o.push_back(Value::gid(s.gid)); break;
        case ProjCol::Fn::First: o.push_back(t[s.a].is_unb() ? t[s.b] : t[s.a]); break;
      }
    }
    out.accumulate(o, a);
  }
  return out;
}

template <MSemiring S>
KRelation<S> rel_select(const SelPredicate& pred, const KRelation<S>& r) {
  auto test = pred.bind(r.schema());
  KRelation<S> out(r.schema(), r.semiring());
  for (const auto& [t, a] : r.rows()) {
    if (test(t)) out.accumulate(t, a);
  }
  return out;
}

template <MSemiring S>
KRelation<S> rel_rename(const std::vector<std::pair<std::string, std::string>>& mapping,
                        const KRelation<S>& r) {
  std::vector<std::string> attrs = r.schema().attrs();
  for (auto& a : attrs) {
    for (const auto& [from, to] : mapping) {
      if (a == from) {
        a = to;
        break;
      }
    }
  }
  KRelation<S> out(Schema(attrs), r.semiring());
  for (const auto& [t, a] : r.rows()) out.accumulate(t, a);
  return out;
}

template <MSemiring S>
KRelation<S> rel_join(const KRelation<S>& r1, const KRelation<S>& r2) {
  const S& s = r1.semiring();
  std::vector<std::size_t> lkey, rkey, rrest;
  std::vector<std::string> attrs = r1.schema().attrs();
  for (std::size_t j = 0; j < r2.schema().size(); ++j) {
    const auto& name = r2.schema().attrs()[j];
    if (r1.schema().contains(name)) {
      lkey.push_back(r1.schema().index_of(name));
      rkey.push_back(j);
    } else {
      rrest.push_back(j);
      attrs.push_back(name);
    }
  }
  KRelation<S> out(Schema(attrs), s);

  auto project = [](const Tuple& t, const std::vector<std::size_t>& idx) {
    Tuple k;
    k.reserve(idx.size());
    for (auto i : idx) k.push_back(t[i]);
    return k;
  };
  std::map<Tuple, std::vector<const std::pair<const Tuple, typename S::value_type>*>> index;
  for (const auto& row : r2.rows()) index[project(row.first, rkey)].push_back(&row);

  for (const auto& [t1, a1] : r1.rows()) {
    auto it = index.find(project(t1, lkey));
    if (it == index.end()) continue;
    for (const auto* row : it->second) {
      Tuple o = t1;
      for (auto j : rrest) o.push_back(row->first[j]);
      out.accumulate(o, s.mul(a1, row->second));
    }
  }
  return out;
}

template <MSemiring S>
KRelation<S> rel_diff(const KRelation<S>& r1, const KRelation<S>& r2) {
  if (!(r1.schema() == r2.schema())) {
    throw SchemaMismatch("difference of " + to_string(r1.schema()) + " and " +
                         to_string(r2.schema()));
  }
  const S& s = r1.semiring();
  KRelation<S> out(r1.schema(), s);
  for (const auto& [t, a] : r1.rows()) out.accumulate(t, s.monus(a, r2.at(t)));
  return out;
}

template <MSemiring S>
KRelation<S> rel_dupelim(const KRelation<S>& r) {
  const S& s = r.semiring();
  KRelation<S> out(r.schema(), s);
  for (const auto& [t, a] : r.rows()) out.accumulate(t, s.delta(a));
  return out;
}

/// Annotations of the base relation rows, aligned with BaseDb.
template <MSemiring S>
struct BaseAnnotations {
  std::vector<typename S::value_type> graphs;
  std::vector<typename S::value_type> quads;
};

/// Every base row annotated with the semiring's one (plain bag semantics).
template <MSemiring S>
BaseAnnotations<S> unit_annotations(const BaseDb& db, const S& s = {}) {
  return {std::vector<typename S::value_type>(db.graphs_rel.size(), s.one()),
          std::vector<typename S::value_type>(db.quads_rel.size(), s.one())};
}

template <MSemiring S>
KRelation<S> base_graphs(const BaseDb& db, const BaseAnnotations<S>& ann, const S& s) {
  KRelation<S> r(graphs_schema(), s);
  for (std::size_t i = 0; i < db.graphs_rel.size(); ++i) {
    const auto& g = db.graphs_rel[i];
    r.accumulate({Value::gid(g.gid), Value::term(g.iri_key)}, ann.graphs.at(i));
  }
  return r;
}

template <MSemiring S>
KRelation<S> base_quads(const BaseDb& db, const BaseAnnotations<S>& ann, const S& s) {
  KRelation<S> r(quads_schema(), s);
  for (std::size_t i = 0; i < db.quads_rel.size(); ++i) {
    const auto& q = db.quads_rel[i];
    r.accumulate({Value::gid(q.gid), Value::term(q.sub), Value::term(q.pred), Value::term(q.obj)},
                 ann.quads.at(i));
  }
  return r;
}

namespace detail {

template <MSemiring S>
class RAEvaluator {
public:
  RAEvaluator(const BaseDb& db, const S& s, const BaseAnnotations<S>& ann)
      : db_(db), s_(s), ann_(ann) {}

  const KRelation<S>& eval(const RAExpr& e) {
    if (auto it = memo_.find(&e); it != memo_.end()) return it->second;
    KRelation<S> r = std::visit([&](const auto& n) { return apply(n); }, e.node());
    return memo_.emplace(&e, std::move(r)).first->second;
  }

private:
  KRelation<S> apply(const ra::BaseGraphs&) { return base_graphs(db_, ann_, s_); }
  KRelation<S> apply(const ra::BaseQuads&) { return base_quads(db_, ann_, s_); }
  KRelation<S> apply(const ra::Select& n) { return rel_select(n.pred, eval(*n.input)); }
  KRelation<S> apply(const ra::Project& n) { return rel_project(n.cols, eval(*n.input)); }
  KRelation<S> apply(const ra::Rename& n) { return rel_rename(n.mapping, eval(*n.input)); }
  KRelation<S> apply(const ra::NatJoin& n) { return rel_join(eval(*n.left), eval(*n.right)); }
  KRelation<S> apply(const ra::Union& n) { return rel_union(eval(*n.left), eval(*n.right)); }
  KRelation<S> apply(const ra::Diff& n) { return rel_diff(eval(*n.left), eval(*n.right)); }
  KRelation<S> apply(const ra::DupElim& n) { return rel_dupelim(eval(*n.input)); }

  const BaseDb& db_;
  S s_;
  const BaseAnnotations<S>& ann_;
  std::unordered_map<const RAExpr*, KRelation<S>> memo_;
};

}  // namespace detail

/// Bottom-up evaluation of `e` over the annotated base relations. Shared
/// subexpressions are evaluated once.
template <MSemiring S>
KRelation<S> eval_ra(const RAExpr& e, const BaseDb& db, const S& s,
                     const BaseAnnotations<S>& ann) {
  if (ann.graphs.size() != db.graphs_rel.size() || ann.quads.size() != db.quads_rel.size()) {
    throw SchemaMismatch("base annotations do not cover every base row");
  }
  detail::RAEvaluator<S> ev(db, s, ann);
  return ev.eval(e);
}

}  // namespace provsparql
