#include <algorithm>
#include <set>

#include "provsparql/error.hpp"
#include "provsparql/sparql.hpp"

namespace provsparql {

namespace {
template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

PatternPtr mk(GraphPattern::Node n) {
  return std::make_shared<const GraphPattern>(std::move(n));
}
FilterPtr mkf(FilterExpr::Node n) {
  return std::make_shared<const FilterExpr>(std::move(n));
}
}  // namespace

PatternPtr make_empty() { return mk(pat::Empty{}); }
PatternPtr make_triple(PatternTerm s, PatternTerm p, PatternTerm o) {
  return mk(pat::TriplePattern{std::move(s), std::move(p), std::move(o)});
}
PatternPtr make_and(PatternPtr l, PatternPtr r) {
  return mk(pat::And{std::move(l), std::move(r)});
}
PatternPtr make_union(PatternPtr l, PatternPtr r) {
  return mk(pat::Union{std::move(l), std::move(r)});
}
PatternPtr make_minus(PatternPtr l, PatternPtr r) {
  return mk(pat::Minus{std::move(l), std::move(r)});
}
PatternPtr make_optional(PatternPtr l, PatternPtr r, FilterPtr filter) {
  return mk(pat::Optional{std::move(l), std::move(r), std::move(filter)});
}
PatternPtr make_filter(PatternPtr inner, FilterPtr expr) {
  return mk(pat::Filter{std::move(inner), std::move(expr)});
}
PatternPtr make_graph(PatternTerm term, PatternPtr inner) {
  return mk(pat::Graph{std::move(term), std::move(inner)});
}

FilterPtr make_eq(PatternTerm l, PatternTerm r) {
  return mkf(fx::Eq{std::move(l), std::move(r)});
}
FilterPtr make_neq(PatternTerm l, PatternTerm r) {
  return mkf(fx::Neq{std::move(l), std::move(r)});
}
FilterPtr make_bound(std::string var) {
  return mkf(fx::Bound{Variable{std::move(var)}});
}
FilterPtr make_not(FilterPtr e) { return mkf(fx::Not{std::move(e)}); }
FilterPtr make_fand(FilterPtr l, FilterPtr r) {
  return mkf(fx::And{std::move(l), std::move(r)});
}
FilterPtr make_for(FilterPtr l, FilterPtr r) {
  return mkf(fx::Or{std::move(l), std::move(r)});
}
FilterPtr make_exists(PatternPtr p) { return mkf(fx::Exists{std::move(p)}); }
FilterPtr make_not_exists(PatternPtr p) {
  return mkf(fx::NotExists{std::move(p)});
}
FilterPtr make_const(bool v) { return mkf(fx::Const{v}); }

namespace {

bool same_opt_filter(const FilterPtr& a, const FilterPtr& b) {
  if (!a || !b) return !a && !b;
  return same_filter(*a, *b);
}

}  // namespace

bool same_pattern(const GraphPattern& a, const GraphPattern& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [](const pat::Empty&) { return true; },
          [&](const pat::TriplePattern& x) {
            const auto& y = *b.as<pat::TriplePattern>();
            return x.subj == y.subj && x.pred == y.pred && x.obj == y.obj;
          },
          [&](const pat::And& x) {
            const auto& y = *b.as<pat::And>();
            return same_pattern(*x.left, *y.left) && same_pattern(*x.right, *y.right);
          },
          [&](const pat::Union& x) {
            const auto& y = *b.as<pat::Union>();
            return same_pattern(*x.left, *y.left) && same_pattern(*x.right, *y.right);
          },
          [&](const pat::Minus& x) {
            const auto& y = *b.as<pat::Minus>();
            return same_pattern(*x.left, *y.left) && same_pattern(*x.right, *y.right);
          },
          [&](const pat::Optional& x) {
            const auto& y = *b.as<pat::Optional>();
            return same_pattern(*x.left, *y.left) &&
                   same_pattern(*x.right, *y.right) &&
                   same_opt_filter(x.filter, y.filter);
          },
          [&](const pat::Filter& x) {
            const auto& y = *b.as<pat::Filter>();
            return same_pattern(*x.inner, *y.inner) && same_filter(*x.expr, *y.expr);
          },
          [&](const pat::Graph& x) {
            const auto& y = *b.as<pat::Graph>();
            return x.term == y.term && same_pattern(*x.inner, *y.inner);
          },
      },
      a.node());
}

bool same_filter(const FilterExpr& a, const FilterExpr& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [&](const fx::Eq& x) {
            const auto& y = *b.as<fx::Eq>();
            return x.left == y.left && x.right == y.right;
          },
          [&](const fx::Neq& x) {
            const auto& y = *b.as<fx::Neq>();
            return x.left == y.left && x.right == y.right;
          },
          [&](const fx::Bound& x) { return x.var == b.as<fx::Bound>()->var; },
          [&](const fx::Not& x) {
            return same_filter(*x.inner, *b.as<fx::Not>()->inner);
          },
          [&](const fx::And& x) {
            const auto& y = *b.as<fx::And>();
            return same_filter(*x.left, *y.left) && same_filter(*x.right, *y.right);
          },
          [&](const fx::Or& x) {
            const auto& y = *b.as<fx::Or>();
            return same_filter(*x.left, *y.left) && same_filter(*x.right, *y.right);
          },
          [&](const fx::Exists& x) {
            return same_pattern(*x.pattern, *b.as<fx::Exists>()->pattern);
          },
          [&](const fx::NotExists& x) {
            return same_pattern(*x.pattern, *b.as<fx::NotExists>()->pattern);
          },
          [&](const fx::Const& x) { return x.value == b.as<fx::Const>()->value; },
      },
      a.node());
}

namespace {

void add_term_var(const PatternTerm& t, std::set<std::string>& out) {
  if (const auto* v = std::get_if<Variable>(&t)) out.insert(v->name);
}

void collect_in_scope(const GraphPattern& p, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const pat::Empty&) {},
                 [&](const pat::TriplePattern& t) {
                   add_term_var(t.subj, out);
                   add_term_var(t.pred, out);
                   add_term_var(t.obj, out);
                 },
                 [&](const pat::And& x) {
                   collect_in_scope(*x.left, out);
                   collect_in_scope(*x.right, out);
                 },
                 [&](const pat::Union& x) {
                   collect_in_scope(*x.left, out);
                   collect_in_scope(*x.right, out);
                 },
                 [&](const pat::Minus& x) { collect_in_scope(*x.left, out); },
                 [&](const pat::Optional& x) {
                   collect_in_scope(*x.left, out);
                   collect_in_scope(*x.right, out);
                 },
                 [&](const pat::Filter& x) { collect_in_scope(*x.inner, out); },
                 [&](const pat::Graph& x) {
                   add_term_var(x.term, out);
                   collect_in_scope(*x.inner, out);
                 },
             },
             p.node());
}

void collect_all(const GraphPattern& p, std::set<std::string>& out);

void collect_filter_all(const FilterExpr& e, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const fx::Eq& x) {
                   add_term_var(x.left, out);
                   add_term_var(x.right, out);
                 },
                 [&](const fx::Neq& x) {
                   add_term_var(x.left, out);
                   add_term_var(x.right, out);
                 },
                 [&](const fx::Bound& x) { out.insert(x.var.name); },
                 [&](const fx::Not& x) { collect_filter_all(*x.inner, out); },
                 [&](const fx::And& x) {
                   collect_filter_all(*x.left, out);
                   collect_filter_all(*x.right, out);
                 },
                 [&](const fx::Or& x) {
                   collect_filter_all(*x.left, out);
                   collect_filter_all(*x.right, out);
                 },
                 [&](const fx::Exists& x) { collect_all(*x.pattern, out); },
                 [&](const fx::NotExists& x) { collect_all(*x.pattern, out); },
                 [](const fx::Const&) {},
             },
             e.node());
}

void collect_all(const GraphPattern& p, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const pat::Empty&) {},
                 [&](const pat::TriplePattern& t) {
                   add_term_var(t.subj, out);
                   add_term_var(t.pred, out);
                   add_term_var(t.obj, out);
                 },
                 [&](const pat::And& x) {
                   collect_all(*x.left, out);
                   collect_all(*x.right, out);
                 },
                 [&](const pat::Union& x) {
                   collect_all(*x.left, out);
                   collect_all(*x.right, out);
                 },
                 [&](const pat::Minus& x) {
                   collect_all(*x.left, out);
                   collect_all(*x.right, out);
                 },
                 [&](const pat::Optional& x) {
                   collect_all(*x.left, out);
                   collect_all(*x.right, out);
                   if (x.filter) collect_filter_all(*x.filter, out);
                 },
                 [&](const pat::Filter& x) {
                   collect_all(*x.inner, out);
                   collect_filter_all(*x.expr, out);
                 },
                 [&](const pat::Graph& x) {
                   add_term_var(x.term, out);
                   collect_all(*x.inner, out);
                 },
             },
             p.node());
}

void collect_exists(const FilterExpr& e, std::vector<const FilterExpr*>& out) {
  std::visit(overloaded{
                 [&](const fx::Not& x) { collect_exists(*x.inner, out); },
                 [&](const fx::And& x) {
                   collect_exists(*x.left, out);
                   collect_exists(*x.right, out);
                 },
                 [&](const fx::Or& x) {
                   collect_exists(*x.left, out);
                   collect_exists(*x.right, out);
                 },
                 [&](const fx::Exists&) { out.push_back(&e); },
                 [&](const fx::NotExists&) { out.push_back(&e); },
                 [](const auto&) {},
             },
             e.node());
}

}  // namespace

std::vector<std::string> var_of(const GraphPattern& p) {
  std::set<std::string> out;
  collect_in_scope(p, out);
  return {out.begin(), out.end()};
}

std::vector<std::string> all_variables(const GraphPattern& p) {
  std::set<std::string> out;
  collect_all(p, out);
  return {out.begin(), out.end()};
}

std::vector<std::string> filter_variables(const FilterExpr& e) {
  std::set<std::string> out;
  collect_filter_all(e, out);
  return {out.begin(), out.end()};
}

std::vector<const FilterExpr*> exists_nodes(const FilterExpr& e) {
  std::vector<const FilterExpr*> out;
  collect_exists(e, out);
  return out;
}

std::vector<std::string> Query::selected() const {
  if (projection) return *projection;
  return var_of(*pattern);
}

PatternPtr desugar_group(const std::vector<GroupItem>& items) {
  PatternPtr acc = make_empty();
  std::vector<FilterPtr> filters;
  std::vector<pat::TriplePattern> run;

  auto join_into = [&](PatternPtr p) {
    acc = acc->as<pat::Empty>() ? std::move(p) : make_and(acc, std::move(p));
  };
  auto flush_run = [&] {
    if (run.empty()) return;
    PatternPtr bgp = mk(run.back());
    for (auto it = run.rbegin() + 1; it != run.rend(); ++it) {
      bgp = make_and(mk(*it), bgp);
    }
    if (run.size() > 1) bgp = make_and(make_empty(), bgp);
    run.clear();
    join_into(std::move(bgp));
  };

  for (const auto& item : items) {
    if (const auto* t = std::get_if<group::Triple>(&item)) {
      run.push_back(t->tp);
      continue;
    }
    flush_run();
    std::visit(overloaded{
                   [](const group::Triple&) {},
                   [&](const group::Optional& o) {
                     if (const auto* f = o.inner->as<pat::Filter>()) {
                       acc = make_optional(acc, f->inner, f->expr);
                     } else {
                       acc = make_optional(acc, o.inner);
                     }
                   },
                   [&](const group::Minus& m) { acc = make_minus(acc, m.inner); },
                   [&](const group::Filter& f) { filters.push_back(f.expr); },
                   [&](const group::Sub& s) { join_into(s.inner); },
                   [&](const group::Graph& g) {
                     join_into(make_graph(g.term, g.inner));
                   },
               },
               item);
  }
  flush_run();

  if (!filters.empty()) {
    FilterPtr cond = filters.front();
    for (std::size_t i = 1; i < filters.size(); ++i) {
      cond = make_fand(cond, filters[i]);
    }
    acc = make_filter(acc, cond);
  }
  return acc;
}

std::string render_pattern_term(const PatternTerm& t) {
  if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
  return encode_term(std::get<RdfTerm>(t));
}

namespace {

void print_filter(const FilterExpr& e, int depth, std::string& out);

void print_node(const GraphPattern& p, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  auto open = [&](const char* name) {
    out += pad;
    out += '(';
    out += name;
    out += '\n';
  };
  auto close = [&] {
    out.pop_back();  // trailing newline of the last child
    out += ")\n";
  };
  std::visit(
      overloaded{
          [&](const pat::Empty&) { out += pad + "(empty)\n"; },
          [&](const pat::TriplePattern& t) {
            out += pad + "(triple " + render_pattern_term(t.subj) + " " +
                   render_pattern_term(t.pred) + " " + render_pattern_term(t.obj) +
                   ")\n";
          },
          [&](const pat::And& x) {
            open("and");
            print_node(*x.left, depth + 1, out);
            print_node(*x.right, depth + 1, out);
            close();
          },
          [&](const pat::Union& x) {
            open("union");
            print_node(*x.left, depth + 1, out);
            print_node(*x.right, depth + 1, out);
            close();
          },
          [&](const pat::Minus& x) {
            open("minus");
            print_node(*x.left, depth + 1, out);
            print_node(*x.right, depth + 1, out);
            close();
          },
          [&](const pat::Optional& x) {
            open("optional");
            print_node(*x.left, depth + 1, out);
            print_node(*x.right, depth + 1, out);
            if (x.filter) print_filter(*x.filter, depth + 1, out);
            close();
          },
          [&](const pat::Filter& x) {
            open("filter");
            print_node(*x.inner, depth + 1, out);
            print_filter(*x.expr, depth + 1, out);
            close();
          },
          [&](const pat::Graph& x) {
            out += pad + "(graph " + render_pattern_term(x.term) + "\n";
            print_node(*x.inner, depth + 1, out);
            close();
          },
      },
      p.node());
}

void print_filter(const FilterExpr& e, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  auto binary = [&](const char* name, const FilterExpr& l, const FilterExpr& r) {
    out += pad + "(" + name + "\n";
    print_filter(l, depth + 1, out);
    print_filter(r, depth + 1, out);
    out.pop_back();
    out += ")\n";
  };
  std::visit(overloaded{
                 [&](const fx::Eq& x) {
                   out += pad + "(= " + render_pattern_term(x.left) + " " +
                          render_pattern_term(x.right) + ")\n";
                 },
                 [&](const fx::Neq& x) {
                   out += pad + "(!= " + render_pattern_term(x.left) + " " +
                          render_pattern_term(x.right) + ")\n";
                 },
                 [&](const fx::Bound& x) { out += pad + "(bound ?" + x.var.name + ")\n"; },
                 [&](const fx::Not& x) {
                   out += pad + "(not\n";
                   print_filter(*x.inner, depth + 1, out);
                   out.pop_back();
                   out += ")\n";
                 },
                 [&](const fx::And& x) { binary("&&", *x.left, *x.right); },
                 [&](const fx::Or& x) { binary("||", *x.left, *x.right); },
                 [&](const fx::Exists& x) {
                   out += pad + "(exists\n";
                   print_node(*x.pattern, depth + 1, out);
                   out.pop_back();
                   out += ")\n";
                 },
                 [&](const fx::NotExists& x) {
                   out += pad + "(not-exists\n";
                   print_node(*x.pattern, depth + 1, out);
                   out.pop_back();
                   out += ")\n";
                 },
                 [&](const fx::Const& x) { out += pad + (x.value ? "true\n" : "false\n"); },
             },
             e.node());
}

}  // namespace

std::string print_pattern(const GraphPattern& p) {
  std::string out;
  print_node(p, 0, out);
  return out;
}

std::string print_query(const Query& q) {
  std::string out = "(select";
  if (!q.projection) {
    out += " *";
  } else {
    for (const auto& v : *q.projection) out += " ?" + v;
  }
  out += "\n";
  print_node(*q.pattern, 1, out);
  out.pop_back();
  out += ")\n";
  return out;
}

}  // namespace provsparql
