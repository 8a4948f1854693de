#include <algorithm>
#include <cctype>

#include "provsparql/error.hpp"
#include "provsparql/sparql.hpp"

namespace provsparql {

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";

enum class Tok {
  End,
  Iri,       // <...>, text = body
  PName,     // prefix:local, text = whole
  Var,       // ?x, text = name
  String,    // "..." (unescaped body)
  Integer,
  Word,      // keyword or bare word, text uppercased in `upper`
  LBrace, RBrace, LParen, RParen, Dot, Star,
  Eq, Neq, Bang, AndAnd, OrOr, At, Caret2,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t;
      t.offset = pos_;
      if (pos_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[pos_];
      if (c == '<') {
        ++pos_;
        std::string body;
        while (pos_ < s_.size() && s_[pos_] != '>') {
          if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            throw SyntaxError(0, pos_, "whitespace inside IRI");
          }
          body += s_[pos_++];
        }
        if (pos_ >= s_.size()) throw SyntaxError(0, t.offset, "unterminated IRI");
        ++pos_;
        t.kind = Tok::Iri;
        t.text = std::move(body);
      } else if (c == '?' || c == '$') {
        ++pos_;
        t.kind = Tok::Var;
        t.text = read_name();
        if (t.text.empty()) throw SyntaxError(0, t.offset, "empty variable name");
      } else if (c == '"') {
        t.kind = Tok::String;
        t.text = read_string();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Integer;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          t.text += s_[pos_++];
        }
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == ':' || c == '_') {
        std::string word = read_name();
        if (pos_ < s_.size() && s_[pos_] == ':') {
          ++pos_;
          t.kind = Tok::PName;
          t.text = word + ":" + read_local();
        } else {
          if (word.empty()) throw SyntaxError(0, t.offset, "unexpected character");
          t.kind = Tok::Word;
          t.text = std::move(word);
        }
      } else {
        ++pos_;
        auto next_is = [&](char n) {
          if (pos_ < s_.size() && s_[pos_] == n) {
            ++pos_;
            return true;
          }
          return false;
        };
        switch (c) {
          case '{': t.kind = Tok::LBrace; break;
          case '}': t.kind = Tok::RBrace; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '.': t.kind = Tok::Dot; break;
          case '*': t.kind = Tok::Star; break;
          case '=': t.kind = Tok::Eq; break;
          case '@': t.kind = Tok::At; break;
          case '!': t.kind = next_is('=') ? Tok::Neq : Tok::Bang; break;
          case '&':
            if (!next_is('&')) throw SyntaxError(0, t.offset, "expected '&&'");
            t.kind = Tok::AndAnd;
            break;
          case '|':
            if (!next_is('|')) throw SyntaxError(0, t.offset, "expected '||'");
            t.kind = Tok::OrOr;
            break;
          case '^':
            if (!next_is('^')) throw SyntaxError(0, t.offset, "expected '^^'");
            t.kind = Tok::Caret2;
            break;
          default:
            throw SyntaxError(0, t.offset, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

private:
  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string read_name() {
    std::string out;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        out += c;
        ++pos_;
      } else {
        break;
      }
    }
    return out;
  }

  // Local part of a prefixed name; a trailing '.' terminates the triple.
  std::string read_local() {
    std::string out;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == '.' || c == '/' || c == '#') {
        out += c;
        ++pos_;
      } else {
        break;
      }
    }
    while (!out.empty() && out.back() == '.') {
      out.pop_back();
      --pos_;
    }
    return out;
  }

  std::string read_string() {
    std::size_t start = pos_;
    ++pos_;
    std::string out;
    for (;;) {
      if (pos_ >= s_.size()) throw SyntaxError(0, start, "unterminated string");
      char c = s_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= s_.size()) throw SyntaxError(0, start, "unterminated string");
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw SyntaxError(0, pos_ - 2, "unknown escape");
        }
        continue;
      }
      out += c;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Query parse() {
    Query q;
    while (is_word("PREFIX")) {
      next();
      std::string name;
      if (peek().kind == Tok::PName) {
        name = peek().text;
        if (name.back() != ':') fail("expected prefix name");
        name.pop_back();
        next();
      } else if (peek().kind == Tok::Word) {
        // Tolerates `PREFIX foaf <iri>` without the colon.
        name = next().text;
      } else {
        fail("expected prefix name");
      }
      if (peek().kind != Tok::Iri) fail("expected IRI after prefix name");
      q.prefixes[name] = next().text;
    }
    prefixes_ = &q.prefixes;

    expect_word("SELECT");
    if (peek().kind == Tok::Star) {
      next();
    } else {
      std::vector<std::string> vars;
      while (peek().kind == Tok::Var) vars.push_back(next().text);
      if (vars.empty()) fail("expected '*' or variables after SELECT");
      q.projection = std::move(vars);
    }
    if (is_word("WHERE")) next();
    q.pattern = parse_group();
    if (peek().kind != Tok::End) fail("unexpected trailing input");

    if (q.projection) {
      auto in_scope = var_of(*q.pattern);
      for (const auto& v : *q.projection) {
        if (!std::binary_search(in_scope.begin(), in_scope.end(), v)) {
          throw ProjectionError("selected variable ?" + v +
                                " does not occur in the pattern");
        }
      }
    }
    return q;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_word(std::string_view w) const {
    return peek().kind == Tok::Word && upper(peek().text) == w;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(0, peek().offset, msg);
  }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    next();
  }

  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected " + std::string(w));
    next();
  }

  PatternPtr parse_group() {
    expect(Tok::LBrace, "'{'");
    std::vector<GroupItem> items;
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::RBrace) {
        next();
        break;
      }
      if (t.kind == Tok::End) fail("unterminated group, expected '}'");
      if (t.kind == Tok::Dot) {
        next();
        continue;
      }
      if (is_word("OPTIONAL")) {
        next();
        items.emplace_back(group::Optional{parse_group()});
      } else if (is_word("MINUS")) {
        next();
        items.emplace_back(group::Minus{parse_group()});
      } else if (is_word("FILTER")) {
        next();
        items.emplace_back(group::Filter{parse_constraint()});
      } else if (is_word("GRAPH")) {
        next();
        PatternTerm term = parse_term();
        if (std::holds_alternative<RdfTerm>(term) && !std::get<RdfTerm>(term).is_iri()) {
          fail("GRAPH expects an IRI or a variable");
        }
        items.emplace_back(group::Graph{std::move(term), parse_group()});
      } else if (t.kind == Tok::LBrace) {
        PatternPtr p = parse_group();
        while (is_word("UNION")) {
          next();
          p = make_union(p, parse_group());
        }
        items.emplace_back(group::Sub{std::move(p)});
      } else {
        pat::TriplePattern tp;
        tp.subj = parse_term();
        if (peek().kind == Tok::Word && peek().text == "a") {
          next();
          tp.pred = RdfTerm::iri(std::string(kRdfType));
        } else {
          tp.pred = parse_term();
        }
        tp.obj = parse_term();
        check_sorts(tp, t.offset);
        items.emplace_back(group::Triple{std::move(tp)});
        if (peek().kind == Tok::Dot) next();
      }
    }
    return desugar_group(items);
  }

  void check_sorts(const pat::TriplePattern& tp, std::size_t at) const {
    auto term = [](const PatternTerm& x) { return std::get_if<RdfTerm>(&x); };
    for (const auto* x : {term(tp.subj), term(tp.pred), term(tp.obj)}) {
      if (x && x->is_blank()) {
        throw SyntaxError(0, at, "blank nodes are not allowed in triple patterns");
      }
    }
    if (const auto* p = term(tp.pred); p && !p->is_iri()) {
      throw SyntaxError(0, at, "predicate must be an IRI or a variable");
    }
  }

  PatternTerm parse_term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Var: return Variable{next().text};
      case Tok::Iri: return RdfTerm::iri(next().text);
      case Tok::PName: return RdfTerm::iri(expand(next()));
      case Tok::Integer:
        return RdfTerm::typed_literal(next().text, std::string(kXsdInteger));
      case Tok::String: {
        std::string lex = next().text;
        if (peek().kind == Tok::At) {
          next();
          if (peek().kind != Tok::Word) fail("expected language tag");
          std::string lang = next().text;
          return RdfTerm::lang_literal(std::move(lex), std::move(lang));
        }
        if (peek().kind == Tok::Caret2) {
          next();
          if (peek().kind == Tok::Iri) return RdfTerm::typed_literal(std::move(lex), next().text);
          if (peek().kind == Tok::PName) {
            return RdfTerm::typed_literal(std::move(lex), expand(next()));
          }
          fail("expected datatype IRI");
        }
        return RdfTerm::literal(std::move(lex));
      }
      default: fail("expected a term or variable");
    }
  }

  std::string expand(const Token& t) const {
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    if (prefix == "_") throw SyntaxError(0, t.offset, "blank nodes are not allowed in patterns");
    auto it = prefixes_->find(prefix);
    if (it == prefixes_->end()) throw UnknownPrefix(prefix);
    return it->second + t.text.substr(colon + 1);
  }

  FilterPtr parse_constraint() {
    if (peek().kind == Tok::LParen) {
      next();
      FilterPtr e = parse_or();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (is_word("BOUND") || is_word("EXISTS") || is_word("NOT")) return parse_primary();
    fail("expected '(' , BOUND, EXISTS or NOT EXISTS after FILTER");
  }

  FilterPtr parse_or() {
    FilterPtr e = parse_and();
    while (peek().kind == Tok::OrOr) {
      next();
      e = make_for(e, parse_and());
    }
    return e;
  }

  FilterPtr parse_and() {
    FilterPtr e = parse_unary();
    while (peek().kind == Tok::AndAnd) {
      next();
      e = make_fand(e, parse_unary());
    }
    return e;
  }

  FilterPtr parse_unary() {
    if (peek().kind == Tok::Bang) {
      next();
      return make_not(parse_unary());
    }
    return parse_primary();
  }

  FilterPtr parse_primary() {
    if (peek().kind == Tok::LParen) {
      next();
      FilterPtr e = parse_or();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (is_word("BOUND")) {
      next();
      expect(Tok::LParen, "'('");
      if (peek().kind != Tok::Var) fail("BOUND expects a variable");
      std::string v = next().text;
      expect(Tok::RParen, "')'");
      return make_bound(std::move(v));
    }
    if (is_word("EXISTS")) {
      next();
      return make_exists(parse_group());
    }
    if (is_word("NOT")) {
      next();
      expect_word("EXISTS");
      return make_not_exists(parse_group());
    }
    if (is_word("TRUE")) {
      next();
      return make_const(true);
    }
    if (is_word("FALSE")) {
      next();
      return make_const(false);
    }
    PatternTerm l = parse_term();
    if (peek().kind == Tok::Eq) {
      next();
      return make_eq(std::move(l), parse_term());
    }
    if (peek().kind == Tok::Neq) {
      next();
      return make_neq(std::move(l), parse_term());
    }
    throw UnsupportedFilterAtom("unsupported filter expression at offset " +
                                std::to_string(peek().offset) +
                                " (expected '=' or '!=')");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::map<std::string, std::string>* prefixes_ = nullptr;
};

}  // namespace

Query parse_query(std::string_view text) {
  return Parser(Lexer(text).run()).parse();
}

}  // namespace provsparql
