#include "provsparql/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "provsparql/error.hpp"

namespace provsparql {

RdfTerm RdfTerm::iri(std::string iri) {
  return RdfTerm(Kind::Iri, std::move(iri), std::nullopt, std::nullopt);
}

RdfTerm RdfTerm::literal(std::string lexical) {
  return RdfTerm(Kind::Literal, std::move(lexical), std::nullopt, std::nullopt);
}

RdfTerm RdfTerm::lang_literal(std::string lexical, std::string lang) {
  return RdfTerm(Kind::Literal, std::move(lexical), std::nullopt, std::move(lang));
}

RdfTerm RdfTerm::typed_literal(std::string lexical, std::string datatype) {
  return RdfTerm(Kind::Literal, std::move(lexical), std::move(datatype),
                 std::nullopt);
}

RdfTerm RdfTerm::blank(std::string label) {
  return RdfTerm(Kind::Blank, std::move(label), std::nullopt, std::nullopt);
}

bool Graph::insert(Triple t) {
  if (contains(t)) return false;
  triples_.push_back(std::move(t));
  return true;
}

bool Graph::contains(const Triple& t) const {
  return std::find(triples_.begin(), triples_.end(), t) != triples_.end();
}

Graph& Dataset::named_graph(const std::string& iri) {
  for (auto& ng : named_) {
    if (ng.iri == iri) return ng.graph;
  }
  named_.push_back(NamedGraph{iri, Graph{}});
  return named_.back().graph;
}

std::optional<std::size_t> Dataset::graph_index(std::string_view iri) const {
  for (std::size_t i = 0; i < named_.size(); ++i) {
    if (named_[i].iri == iri) return i + 1;
  }
  return std::nullopt;
}

const Graph& Dataset::graph(std::size_t gid) const {
  if (gid == 0) return default_graph_;
  if (gid > named_.size()) throw std::out_of_range("graph id out of range");
  return named_[gid - 1].graph;
}

namespace {

void append_escaped(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
}

}  // namespace

std::string encode_term(const RdfTerm& t) {
  std::string out;
  switch (t.kind()) {
    case RdfTerm::Kind::Iri:
      out.reserve(t.value().size() + 2);
      out += '<';
      out += t.value();
      out += '>';
      break;
    case RdfTerm::Kind::Blank:
      out = "_:" + t.value();
      break;
    case RdfTerm::Kind::Literal:
      out += '"';
      append_escaped(out, t.value());
      out += '"';
      if (t.lang()) {
        out += '@';
        out += *t.lang();
      } else if (t.datatype()) {
        out += "^^<";
        out += *t.datatype();
        out += '>';
      }
      break;
  }
  return out;
}

RdfTerm scope_term(const RdfTerm& t, std::size_t gid) {
  if (!t.is_blank() || gid == 0) return t;
  return RdfTerm::blank(t.value() + "@g" + std::to_string(gid));
}

namespace {

class LineParser {
public:
  LineParser(std::string_view line, std::size_t line_no)
      : s_(line), line_no_(line_no) {}

  /// Parses one statement; returns false for blank/comment lines.
  bool parse(Dataset& d) {
    skip_ws();
    if (at_end() || peek() == '#') return false;

    RdfTerm subj = parse_term();
    skip_ws();
    RdfTerm pred = parse_term();
    if (!pred.is_iri()) fail("predicate must be an IRI");
    skip_ws();
    RdfTerm obj = parse_term();
    skip_ws();

    std::optional<std::string> graph;
    if (!at_end() && peek() != '.') {
      RdfTerm g = parse_term();
      if (!g.is_iri()) fail("graph label must be an IRI");
      graph = g.value();
      skip_ws();
    }
    expect('.');
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected trailing characters");

    Triple t{std::move(subj), std::move(pred), std::move(obj)};
    if (graph) {
      d.named_graph(*graph).insert(std::move(t));
    } else {
      d.default_graph().insert(std::move(t));
    }
    return true;
  }

private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(line_no_, pos_ + 1, msg);
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_iri_body() {
    expect('<');
    std::string out;
    while (!at_end() && peek() != '>') {
      char c = peek();
      if (c == ' ' || c == '<' || c == '"') fail("invalid character in IRI");
      out += c;
      ++pos_;
    }
    expect('>');
    return out;
  }

  RdfTerm parse_term() {
    if (at_end()) fail("unexpected end of line");
    char c = peek();
    if (c == '<') return RdfTerm::iri(parse_iri_body());
    if (c == '_') {
      ++pos_;
      expect(':');
      std::string label;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                           peek() == '_' || peek() == '-' || peek() == '.')) {
        label += peek();
        ++pos_;
      }
      // A trailing '.' belongs to the statement terminator.
      while (!label.empty() && label.back() == '.') {
        label.pop_back();
        --pos_;
      }
      if (label.empty()) fail("empty blank node label");
      return RdfTerm::blank(std::move(label));
    }
    if (c == '"') return parse_literal();
    fail("expected IRI, blank node or literal");
  }

  RdfTerm parse_literal() {
    expect('"');
    std::string lex;
    for (;;) {
      if (at_end()) fail("unterminated literal");
      char ch = peek();
      ++pos_;
      if (ch == '"') break;
      if (ch == '\\') {
        if (at_end()) fail("dangling escape");
        char e = peek();
        ++pos_;
        switch (e) {
          case 'n': lex += '\n'; break;
          case 'r': lex += '\r'; break;
          case 't': lex += '\t'; break;
          case '"': lex += '"'; break;
          case '\\': lex += '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
        continue;
      }
      lex += ch;
    }
    if (!at_end() && peek() == '@') {
      ++pos_;
      std::string lang;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                           peek() == '-')) {
        lang += peek();
        ++pos_;
      }
      if (lang.empty()) fail("empty language tag");
      return RdfTerm::lang_literal(std::move(lex), std::move(lang));
    }
    if (!at_end() && peek() == '^') {
      ++pos_;
      expect('^');
      return RdfTerm::typed_literal(std::move(lex), parse_iri_body());
    }
    return RdfTerm::literal(std::move(lex));
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace

Dataset parse_nquads(std::istream& in) {
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    LineParser(line, line_no).parse(d);
  }
  return d;
}

Dataset parse_nquads_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_nquads(in);
}

std::string render_nquads(const Dataset& d) {
  std::string out;
  auto emit = [&](const Graph& g, const std::string* iri) {
    for (const auto& t : g.triples()) {
      out += encode_term(t.subj);
      out += ' ';
      out += encode_term(t.pred);
      out += ' ';
      out += encode_term(t.obj);
      if (iri) {
        out += " <";
        out += *iri;
        out += '>';
      }
      out += " .\n";
    }
  };
  emit(d.default_graph(), nullptr);
  for (const auto& ng : d.named_graphs()) emit(ng.graph, &ng.iri);
  return out;
}

BaseDb encode_dataset(const Dataset& d) {
  BaseDb db;
  db.graphs_rel.push_back(GraphRow{0, ""});
  for (std::size_t i = 0; i < d.named_graphs().size(); ++i) {
    db.graphs_rel.push_back(
        GraphRow{i + 1, encode_term(RdfTerm::iri(d.named_graphs()[i].iri))});
  }
  for (std::size_t i = 0; i < db.graphs_rel.size(); ++i) {
    db.graph_ids.push_back("g" + std::to_string(i));
  }
  for (std::size_t gid = 0; gid < d.graph_count(); ++gid) {
    for (const auto& t : d.graph(gid).triples()) {
      db.quads_rel.push_back(QuadRow{gid, encode_term(scope_term(t.subj, gid)),
                                     encode_term(scope_term(t.pred, gid)),
                                     encode_term(scope_term(t.obj, gid))});
      db.quad_ids.push_back("t" + std::to_string(db.quads_rel.size()));
    }
  }
  return db;
}

}  // namespace provsparql
