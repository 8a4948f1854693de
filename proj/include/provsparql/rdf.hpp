#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace provsparql {

/// An RDF term: IRI, literal or blank node. A literal carries at most one of
/// datatype and language tag.
class RdfTerm {
public:
  enum class Kind : std::uint8_t { Iri, Literal, Blank };

  static RdfTerm iri(std::string iri);
  static RdfTerm literal(std::string lexical);
  static RdfTerm lang_literal(std::string lexical, std::string lang);
  static RdfTerm typed_literal(std::string lexical, std::string datatype);
  static RdfTerm blank(std::string label);

  Kind kind() const { return kind_; }
  bool is_iri() const { return kind_ == Kind::Iri; }
  bool is_literal() const { return kind_ == Kind::Literal; }
  bool is_blank() const { return kind_ == Kind::Blank; }

  /// IRI text, lexical form, or blank label depending on kind.
  const std::string& value() const { return value_; }
  const std::optional<std::string>& datatype() const { return datatype_; }
  const std::optional<std::string>& lang() const { return lang_; }

  friend auto operator<=>(const RdfTerm&, const RdfTerm&) = default;
  friend bool operator==(const RdfTerm&, const RdfTerm&) = default;

private:
  RdfTerm(Kind kind, std::string value, std::optional<std::string> datatype,
          std::optional<std::string> lang)
      : kind_(kind),
        value_(std::move(value)),
        datatype_(std::move(datatype)),
        lang_(std::move(lang)) {}

  Kind kind_;
  std::string value_;
  std::optional<std::string> datatype_;
  std::optional<std::string> lang_;
};

struct Triple {
  RdfTerm subj;
  RdfTerm pred;
  RdfTerm obj;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

/// A set of triples that remembers insertion order.
class Graph {
public:
  /// Returns false when the triple was already present.
  bool insert(Triple t);
  bool contains(const Triple& t) const;
  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

private:
  std::vector<Triple> triples_;
};

struct NamedGraph {
  std::string iri;
  Graph graph;
};

/// Default graph plus named graphs in first-occurrence order. Named-graph
/// IRIs are pairwise distinct.
class Dataset {
public:
  Graph& default_graph() { return default_graph_; }
  const Graph& default_graph() const { return default_graph_; }
  const std::vector<NamedGraph>& named_graphs() const { return named_; }

  /// Returns the named graph for `iri`, creating it at the end if missing.
  Graph& named_graph(const std::string& iri);
  /// 1-based position of the named graph, or nullopt.
  std::optional<std::size_t> graph_index(std::string_view iri) const;

  /// Graph by gid: 0 is the default graph, 1..n the named graphs.
  const Graph& graph(std::size_t gid) const;
  std::size_t graph_count() const { return named_.size() + 1; }

private:
  Graph default_graph_;
  std::vector<NamedGraph> named_;
};

/// Canonical injective text key of a term: `<iri>`, `"lex"`, `"lex"@lang`,
/// `"lex"^^<dt>`, `_:label`. Quotes, backslashes and control characters in
/// lexical forms are escaped.
std::string encode_term(const RdfTerm& t);

/// Blank nodes are local to their graph; in named graph `gid` a label is
/// rewritten to `label@g<gid>`. Other terms (and the default graph) pass
/// through unchanged.
RdfTerm scope_term(const RdfTerm& t, std::size_t gid);

Dataset parse_nquads(std::istream& in);
Dataset parse_nquads_string(std::string_view text);

/// Debug serializer, one statement per line in graph order.
std::string render_nquads(const Dataset& d);

struct GraphRow {
  std::uint64_t gid;
  std::string iri_key;
};

struct QuadRow {
  std::uint64_t gid;
  std::string sub;
  std::string pred;
  std::string obj;
};

/// The dataset encoded as the two base relations `Graphs(gid, IRI)` and
/// `Quads(gid, sub, pred, obj)`, with one fresh identifier per row.
struct BaseDb {
  std::vector<GraphRow> graphs_rel;
  std::vector<QuadRow> quads_rel;
  std::vector<std::string> graph_ids;  // g0..gn
  std::vector<std::string> quad_ids;   // t1..tm
};

BaseDb encode_dataset(const Dataset& d);

}  // namespace provsparql
