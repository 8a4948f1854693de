#include "provsparql/translator.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace provsparql {

namespace {
template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> sorted_union(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::string> sorted_intersection(const std::vector<std::string>& a,
                                             const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool has(const std::vector<std::string>& sorted, const std::string& v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

std::vector<std::string> with_graph(const std::string& g, const std::vector<std::string>& vars) {
  std::vector<std::string> out{g};
  for (const auto& v : vars) out.push_back(var_attr(v));
  return out;
}

/// Extended projection onto [G, vars] padding variables missing from
/// `present` with unb.
RAPtr pad_to(const RAPtr& input, const std::string& g, const std::vector<std::string>& vars,
             const std::vector<std::string>& present) {
  std::vector<ProjCol> cols{ProjCol::keep(g)};
  for (const auto& v : vars) {
    cols.push_back(has(present, v) ? ProjCol::keep(var_attr(v)) : ProjCol::const_unb(var_attr(v)));
  }
  return ra_project(std::move(cols), input);
}

SelPredicate is_unb(const std::string& a) { return SelPredicate::eq(a, Value::unb()); }
SelPredicate not_unb(const std::string& a) { return SelPredicate::neq(a, Value::unb()); }

}  // namespace

RAPtr Translator::translate_cached(const GraphPattern& p, const std::string& g) {
  for (const auto& [key, e] : cache_) {
    if (key.first == &p && key.second == g) return e;
  }
  RAPtr e = translate(p, g);
  cache_.push_back({{&p, g}, e});
  return e;
}

RAPtr Translator::translate(const GraphPattern& p, const std::string& g) {
  return std::visit(
      overloaded{
          [&](const pat::Empty&) { return translate_empty(g); },
          [&](const pat::TriplePattern& t) { return translate_triple(t, g); },
          [&](const pat::And& x) { return translate_and(*x.left, *x.right, g); },
          [&](const pat::Union& x) { return translate_union(*x.left, *x.right, g); },
          [&](const pat::Minus& x) { return translate_minus(*x.left, *x.right, g); },
          [&](const pat::Optional& x) {
            return translate_optional(*x.left, *x.right, x.filter.get(), g);
          },
          [&](const pat::Filter& x) { return translate_filter(*x.inner, *x.expr, g); },
          [&](const pat::Graph& x) { return translate_graph(x.term, *x.inner, g); },
      },
      p.node());
}

RAPtr Translator::translate_empty(const std::string& g) {
  return ra_project_keep({g}, ra_rename({{"gid", g}}, ra_graphs()));
}

RAPtr Translator::translate_triple(const pat::TriplePattern& t, const std::string& g) {
  static const char* const columns[] = {"sub", "pred", "obj"};
  const PatternTerm* positions[] = {&t.subj, &t.pred, &t.obj};

  std::vector<SelPredicate> conds;
  std::map<std::string, std::string> first_column;  // variable -> column
  std::vector<std::pair<std::string, std::string>> renames{{"gid", g}};
  for (int i = 0; i < 3; ++i) {
    const PatternTerm& pt = *positions[i];
    if (const auto* v = std::get_if<Variable>(&pt)) {
      auto [it, inserted] = first_column.emplace(v->name, columns[i]);
      if (inserted) {
        renames.emplace_back(columns[i], var_attr(v->name));
      } else {
        conds.push_back(SelPredicate::eq(it->second, columns[i]));
      }
    } else {
      conds.push_back(SelPredicate::eq(columns[i], Value::term(encode_term(std::get<RdfTerm>(pt)))));
    }
  }
  // Constant conditions first, then column equalities.
  std::stable_partition(conds.begin(), conds.end(), [](const SelPredicate& c) {
    return c.kind() == SelPredicate::Kind::AttrEqConst;
  });

  RAPtr e = ra_quads();
  if (!conds.empty()) e = ra_select(SelPredicate::conj(std::move(conds)), e);
  e = ra_rename(std::move(renames), e);
  std::vector<std::string> vars;
  for (const auto& [v, col] : first_column) vars.push_back(v);
  return ra_project_keep(with_graph(g, vars), e);
}

RAPtr Translator::translate_graph(const PatternTerm& term, const GraphPattern& inner,
                                  const std::string& g) {
  const std::string g2 = names_.fresh_graph();
  const auto inner_vars = var_of(inner);
  RAPtr body = translate_cached(inner, g2);

  if (const auto* v = std::get_if<Variable>(&term)) {
    RAPtr graphs = ra_rename({{"gid", g2}, {"IRI", var_attr(v->name)}},
                             ra_select(SelPredicate::gid_greater("gid", 0), ra_graphs()));
    const auto out_vars = sorted_union({v->name}, inner_vars);
    RAPtr joined;
    if (has(inner_vars, v->name)) {
      // The body may leave v unbound; join through a renamed copy.
      const std::string copy = names_.fresh_prime(v->name, 2);
      RAPtr renamed = ra_rename({{var_attr(v->name), copy}}, body);
      joined = ra_select(SelPredicate::disj({is_unb(copy), SelPredicate::eq(copy, var_attr(v->name))}),
                         ra_join(graphs, renamed));
    } else {
      joined = ra_join(graphs, body);
    }
    std::vector<std::string> cols;
    for (const auto& x : out_vars) cols.push_back(var_attr(x));
    return ra_join(translate_empty(g), ra_project_keep(cols, joined));
  }

  const auto& iri = std::get<RdfTerm>(term);
  RAPtr graph_id = ra_project_keep(
      {g2}, ra_rename({{"gid", g2}}, ra_select(SelPredicate::eq("IRI", Value::term(encode_term(iri))),
                                               ra_graphs())));
  std::vector<std::string> cols;
  for (const auto& x : inner_vars) cols.push_back(var_attr(x));
  return ra_join(translate_empty(g), ra_project_keep(cols, ra_join(graph_id, body)));
}

RAPtr Translator::translate_union(const GraphPattern& p1, const GraphPattern& p2,
                                  const std::string& g) {
  const auto v1 = var_of(p1);
  const auto v2 = var_of(p2);
  const auto all = sorted_union(v1, v2);
  RAPtr l = translate_cached(p1, g);
  RAPtr r = translate_cached(p2, g);
  if (v1 != all) l = pad_to(l, g, all, v1);
  if (v2 != all) r = pad_to(r, g, all, v2);
  return ra_union(l, r);
}

Translator::AndParts Translator::and_of(const RAPtr& l, const std::vector<std::string>& lvars,
                                        const RAPtr& r, const std::vector<std::string>& rvars,
                                        const std::string& g, bool keep_left) {
  const auto shared = sorted_intersection(lvars, rvars);
  const auto all = sorted_union(lvars, rvars);
  if (shared.empty()) return {ra_project_keep(with_graph(g, all), ra_join(l, r)), {}};

  std::vector<std::pair<std::string, std::string>> lren, rren;
  std::map<std::string, std::pair<std::string, std::string>> primed;
  std::vector<SelPredicate> comp;
  for (const auto& v : shared) {
    std::string a = names_.fresh_prime(v, 1);
    std::string b = names_.fresh_prime(v, 2);
    lren.emplace_back(var_attr(v), a);
    rren.emplace_back(var_attr(v), b);
    comp.push_back(SelPredicate::disj({is_unb(a), is_unb(b), SelPredicate::eq(a, b)}));
    primed.emplace(v, std::make_pair(a, b));
  }
  RAPtr joined = ra_select(SelPredicate::conj(std::move(comp)),
                           ra_join(ra_rename(std::move(lren), l), ra_rename(std::move(rren), r)));
  AndParts parts;
  std::vector<ProjCol> cols{ProjCol::keep(g)};
  for (const auto& v : all) {
    if (auto it = primed.find(v); it != primed.end()) {
      cols.push_back(ProjCol::first(var_attr(v), it->second.first, it->second.second));
    } else {
      cols.push_back(ProjCol::keep(var_attr(v)));
    }
  }
  if (keep_left) {
    for (const auto& [v, names] : primed) {
      cols.push_back(ProjCol::keep(names.first));
      parts.left_copies.emplace_back(v, names.first);
    }
  }
  parts.merged = ra_project(std::move(cols), joined);
  return parts;
}

RAPtr Translator::translate_and(const GraphPattern& p1, const GraphPattern& p2,
                                const std::string& g) {
  return and_of(translate_cached(p1, g), var_of(p1), translate_cached(p2, g), var_of(p2), g).merged;
}

RAPtr Translator::translate_minus(const GraphPattern& p1, const GraphPattern& p2,
                                  const std::string& g) {
  const auto v1 = var_of(p1);
  const auto shared = sorted_intersection(v1, var_of(p2));
  RAPtr left = translate_cached(p1, g);
  if (shared.empty()) return left;

  std::vector<std::pair<std::string, std::string>> ren;
  std::vector<SelPredicate> comp, disj;
  for (const auto& v : shared) {
    std::string x = var_attr(v);
    std::string y = names_.fresh_prime(v, 1);
    ren.emplace_back(x, y);
    comp.push_back(SelPredicate::disj({is_unb(x), is_unb(y), SelPredicate::eq(x, y)}));
    disj.push_back(SelPredicate::disj({is_unb(x), is_unb(y)}));
  }
  SelPredicate cond = SelPredicate::conj(
      {SelPredicate::conj(std::move(comp)), SelPredicate::negate(SelPredicate::conj(std::move(disj)))});
  RAPtr matched = ra_project_keep(
      with_graph(g, v1),
      ra_select(std::move(cond), ra_join(left, ra_rename(std::move(ren), translate_cached(p2, g)))));
  return ra_join(left, ra_diff(ra_dupelim(left), matched));
}

SelPredicate compile_filter(const FilterExpr& r, const std::vector<std::string>& in_scope,
                            const std::vector<std::pair<const FilterExpr*, std::string>>& ex_attrs) {
  // nullopt: out-of-scope variable (always unbound).
  struct Operand {
    bool is_attr;
    std::string attr;
    Value constant = Value::unb();
  };
  auto operand = [&](const PatternTerm& t) -> std::optional<Operand> {
    if (const auto* v = std::get_if<Variable>(&t)) {
      if (!has(in_scope, v->name)) return std::nullopt;
      return Operand{true, var_attr(v->name)};
    }
    return Operand{false, {}, Value::term(encode_term(std::get<RdfTerm>(t)))};
  };
  auto comparison = [&](const PatternTerm& lt, const PatternTerm& rt, bool equal) {
    auto l = operand(lt);
    auto rr = operand(rt);
    if (!l || !rr) return SelPredicate::never();
    if (!l->is_attr && !rr->is_attr) {
      return (l->constant == rr->constant) == equal ? SelPredicate::always() : SelPredicate::never();
    }
    if (!l->is_attr) std::swap(l, rr);
    if (!rr->is_attr) {
      return equal ? SelPredicate::eq(l->attr, rr->constant)
                   : SelPredicate::conj({not_unb(l->attr), SelPredicate::neq(l->attr, rr->constant)});
    }
    SelPredicate same = SelPredicate::eq(l->attr, rr->attr);
    return SelPredicate::conj({not_unb(l->attr), not_unb(rr->attr),
                               equal ? same : SelPredicate::negate(same)});
  };
  auto ex_attr = [&](const FilterExpr* node) -> const std::string& {
    for (const auto& [n, a] : ex_attrs) {
      if (n == node) return a;
    }
    throw UnsupportedFilterAtom("EXISTS without a result attribute");
  };

  return std::visit(
      overloaded{
          [&](const fx::Eq& x) { return comparison(x.left, x.right, true); },
          [&](const fx::Neq& x) { return comparison(x.left, x.right, false); },
          [&](const fx::Bound& x) {
            return has(in_scope, x.var.name) ? not_unb(var_attr(x.var.name)) : SelPredicate::never();
          },
          [&](const fx::Not& x) {
            return SelPredicate::negate(compile_filter(*x.inner, in_scope, ex_attrs));
          },
          [&](const fx::And& x) {
            return SelPredicate::conj({compile_filter(*x.left, in_scope, ex_attrs),
                                       compile_filter(*x.right, in_scope, ex_attrs)});
          },
          [&](const fx::Or& x) {
            return SelPredicate::disj({compile_filter(*x.left, in_scope, ex_attrs),
                                       compile_filter(*x.right, in_scope, ex_attrs)});
          },
          [&](const fx::Exists&) { return SelPredicate::neq(ex_attr(&r), Value::gid(0)); },
          [&](const fx::NotExists&) { return SelPredicate::eq(ex_attr(&r), Value::gid(0)); },
          [&](const fx::Const& x) { return x.value ? SelPredicate::always() : SelPredicate::never(); },
      },
      r.node());
}

RAPtr Translator::apply_filter(const RAPtr& inner, const std::vector<std::string>& vars,
                               const FilterExpr& r, const std::string& g,
                               const std::vector<std::string>& extra) {
  const auto exists = exists_nodes(r);
  if (exists.empty()) return ra_select(compile_filter(r, vars, {}), inner);

  auto keep = with_graph(g, vars);
  keep.insert(keep.end(), extra.begin(), extra.end());
  RAPtr dedup = ra_dupelim(inner);
  RAPtr joined = inner;
  std::vector<std::pair<const FilterExpr*, std::string>> ex_attrs;
  for (const FilterExpr* node : exists) {
    const GraphPattern& sub = node->as<fx::Exists>() ? *node->as<fx::Exists>()->pattern
                                                     : *node->as<fx::NotExists>()->pattern;
    const std::string ex = names_.fresh_ex();
    ex_attrs.emplace_back(node, ex);

    std::vector<std::pair<std::string, std::string>> ren;
    std::vector<SelPredicate> subst;
    for (const auto& v : sorted_intersection(vars, var_of(sub))) {
      std::string x = var_attr(v);
      std::string y = names_.fresh_prime(v, 1);
      ren.emplace_back(x, y);
      subst.push_back(SelPredicate::disj({SelPredicate::eq(x, y), is_unb(x)}));
    }
    RAPtr sub_e = translate_cached(sub, g);
    if (!ren.empty()) sub_e = ra_rename(std::move(ren), sub_e);
    RAPtr matching =
        ra_project_keep(keep, ra_select(SelPredicate::conj(std::move(subst)), ra_join(inner, sub_e)));

    RAPtr none = ra_diff(dedup, matching);
    auto tagged = [&](const RAPtr& e, std::uint64_t flag) {
      std::vector<ProjCol> cols;
      for (const auto& a : keep) cols.push_back(ProjCol::keep(a));
      cols.push_back(ProjCol::const_gid(ex, flag));
      return ra_project(std::move(cols), e);
    };
    RAPtr e_i = ra_union(tagged(none, 0), tagged(ra_diff(dedup, none), 1));
    joined = ra_join(joined, e_i);
  }
  return ra_project_keep(keep, ra_select(compile_filter(r, vars, ex_attrs), joined));
}

RAPtr Translator::translate_filter(const GraphPattern& p, const FilterExpr& r,
                                   const std::string& g) {
  return apply_filter(translate_cached(p, g), var_of(p), r, g);
}

RAPtr Translator::translate_optional(const GraphPattern& p1, const GraphPattern& p2,
                                     const FilterExpr* r, const std::string& g) {
  const auto v1 = var_of(p1);
  const auto v2 = var_of(p2);
  const auto all = sorted_union(v1, v2);
  RAPtr left = translate_cached(p1, g);
  // The join part keeps the left operand's own values of shared variables:
  // where the left side had a variable unbound and the right side bound it,
  // the merged value would no longer match the left tuple in the difference.
  AndParts both = and_of(left, v1, translate_cached(p2, g), v2, g, true);
  std::vector<std::string> extra;
  for (const auto& [v, copy] : both.left_copies) extra.push_back(copy);

  const bool trivial = !r || (r->as<fx::Const>() && r->as<fx::Const>()->value);
  RAPtr matched_full = trivial ? both.merged : apply_filter(both.merged, all, *r, g, extra);
  RAPtr matched = extra.empty() ? matched_full : ra_project_keep(with_graph(g, all), matched_full);

  std::vector<ProjCol> left_cols{ProjCol::keep(g)};
  for (const auto& v : v1) {
    auto it = std::find_if(both.left_copies.begin(), both.left_copies.end(),
                           [&](const auto& c) { return c.first == v; });
    left_cols.push_back(it == both.left_copies.end() ? ProjCol::keep(var_attr(v))
                                                     : ProjCol::keep_as(var_attr(v), it->second));
  }
  RAPtr unmatched = ra_join(left, ra_diff(ra_dupelim(left), ra_project(std::move(left_cols), matched_full)));
  return ra_union(matched, pad_to(unmatched, g, all, v1));
}

RAPtr translate_query(const Query& q) {
  const auto in_scope = var_of(*q.pattern);
  const auto selected = q.selected();
  for (const auto& v : selected) {
    if (!has(in_scope, v)) {
      throw ProjectionError("selected variable ?" + v + " does not occur in the pattern");
    }
  }
  Translator t;
  const std::string g = t.names().fresh_graph();
  RAPtr body = ra_join(t.translate_empty(g), t.translate(*q.pattern, g));
  RAPtr top = ra_select(SelPredicate::eq(g, Value::gid(0)), body);
  std::vector<std::string> cols;
  for (const auto& v : selected) cols.push_back(var_attr(v));
  return ra_project_keep(cols, top);
}

// ---------------------------------------------------------------------------

std::vector<std::string> certainly_bound(const GraphPattern& p) {
  return std::visit(
      overloaded{
          [](const pat::Empty&) { return std::vector<std::string>{}; },
          [&](const pat::TriplePattern&) { return var_of(p); },
          [](const pat::And& x) {
            return sorted_union(certainly_bound(*x.left), certainly_bound(*x.right));
          },
          [](const pat::Union& x) {
            return sorted_intersection(certainly_bound(*x.left), certainly_bound(*x.right));
          },
          [](const pat::Minus& x) { return certainly_bound(*x.left); },
          [](const pat::Optional& x) { return certainly_bound(*x.left); },
          [](const pat::Filter& x) { return certainly_bound(*x.inner); },
          [](const pat::Graph& x) {
            auto out = certainly_bound(*x.inner);
            if (const auto* v = std::get_if<Variable>(&x.term)) out = sorted_union(out, {v->name});
            return out;
          },
      },
      p.node());
}

namespace {

/// Variables that substitution would touch in positions where the join-based
/// translation does not see them: MINUS right sides and filter expressions.
void sensitive_vars(const GraphPattern& p, std::set<std::string>& out) {
  auto add_all = [&](const std::vector<std::string>& vs) { out.insert(vs.begin(), vs.end()); };
  std::visit(overloaded{
                 [](const pat::Empty&) {},
                 [](const pat::TriplePattern&) {},
                 [&](const pat::And& x) {
                   sensitive_vars(*x.left, out);
                   sensitive_vars(*x.right, out);
                 },
                 [&](const pat::Union& x) {
                   sensitive_vars(*x.left, out);
                   sensitive_vars(*x.right, out);
                 },
                 [&](const pat::Minus& x) {
                   sensitive_vars(*x.left, out);
                   add_all(all_variables(*x.right));
                 },
                 [&](const pat::Optional& x) {
                   sensitive_vars(*x.left, out);
                   sensitive_vars(*x.right, out);
                   if (x.filter) add_all(filter_variables(*x.filter));
                 },
                 [&](const pat::Filter& x) {
                   sensitive_vars(*x.inner, out);
                   add_all(filter_variables(*x.expr));
                 },
                 [&](const pat::Graph& x) { sensitive_vars(*x.inner, out); },
             },
             p.node());
}

bool filter_safe(const FilterExpr& r, const std::vector<std::string>& context) {
  for (const FilterExpr* node : exists_nodes(r)) {
    const GraphPattern& sub = node->as<fx::Exists>() ? *node->as<fx::Exists>()->pattern
                                                     : *node->as<fx::NotExists>()->pattern;
    if (!exists_substitution_safe(sub)) return false;
    const auto certain = certainly_bound(sub);
    std::set<std::string> sensitive;
    sensitive_vars(sub, sensitive);
    for (const auto& v : sorted_intersection(context, all_variables(sub))) {
      if (!has(certain, v) || sensitive.contains(v)) return false;
    }
  }
  return true;
}

}  // namespace

bool exists_substitution_safe(const GraphPattern& p) {
  return std::visit(
      overloaded{
          [](const pat::Empty&) { return true; },
          [](const pat::TriplePattern&) { return true; },
          [](const pat::And& x) {
            return exists_substitution_safe(*x.left) && exists_substitution_safe(*x.right);
          },
          [](const pat::Union& x) {
            return exists_substitution_safe(*x.left) && exists_substitution_safe(*x.right);
          },
          [](const pat::Minus& x) {
            return exists_substitution_safe(*x.left) && exists_substitution_safe(*x.right);
          },
          [](const pat::Optional& x) {
            if (!exists_substitution_safe(*x.left) || !exists_substitution_safe(*x.right)) return false;
            return !x.filter ||
                   filter_safe(*x.filter, sorted_union(var_of(*x.left), var_of(*x.right)));
          },
          [](const pat::Filter& x) {
            return exists_substitution_safe(*x.inner) && filter_safe(*x.expr, var_of(*x.inner));
          },
          [](const pat::Graph& x) { return exists_substitution_safe(*x.inner); },
      },
      p.node());
}

}  // namespace provsparql
