#include "provsparql/ref_eval.hpp"

#include <optional>

namespace provsparql {

namespace {
template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

SolutionMultiset::SolutionMultiset(
    std::initializer_list<std::pair<const SolutionMapping, std::uint64_t>> init) {
  for (const auto& [mu, n] : init) add(mu, n);
}

void SolutionMultiset::add(const SolutionMapping& mu, std::uint64_t count) {
  if (count == 0) return;
  elems_[mu] += count;
}

std::uint64_t SolutionMultiset::count(const SolutionMapping& mu) const {
  auto it = elems_.find(mu);
  return it == elems_.end() ? 0 : it->second;
}

std::uint64_t SolutionMultiset::size() const {
  std::uint64_t n = 0;
  for (const auto& [mu, c] : elems_) n += c;
  return n;
}

bool compatible(const SolutionMapping& a, const SolutionMapping& b) {
  // Both maps are sorted by variable; walk them in step.
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      if (!(i->second == j->second)) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

namespace {

bool domains_intersect(const SolutionMapping& a, const SolutionMapping& b) {
  for (const auto& [v, t] : a) {
    if (b.contains(v)) return true;
  }
  return false;
}

SolutionMapping merge(const SolutionMapping& a, const SolutionMapping& b) {
  SolutionMapping out = a;
  out.insert(b.begin(), b.end());
  return out;
}

}  // namespace

SolutionMultiset join(const SolutionMultiset& a, const SolutionMultiset& b) {
  SolutionMultiset out;
  for (const auto& [m1, c1] : a) {
    for (const auto& [m2, c2] : b) {
      if (compatible(m1, m2)) out.add(merge(m1, m2), c1 * c2);
    }
  }
  return out;
}

SolutionMultiset multiset_union(const SolutionMultiset& a, const SolutionMultiset& b) {
  SolutionMultiset out = a;
  for (const auto& [m, c] : b) out.add(m, c);
  return out;
}

SolutionMultiset minus(const SolutionMultiset& a, const SolutionMultiset& b) {
  SolutionMultiset out;
  for (const auto& [m1, c1] : a) {
    bool keep = true;
    for (const auto& [m2, c2] : b) {
      if (compatible(m1, m2) && domains_intersect(m1, m2)) {
        keep = false;
        break;
      }
    }
    if (keep) out.add(m1, c1);
  }
  return out;
}

SolutionMultiset diff(const SolutionMultiset& a, const SolutionMultiset& b,
                      const FilterExpr& r, ActiveGraph g) {
  SolutionMultiset out;
  for (const auto& [m1, c1] : a) {
    bool keep = true;
    for (const auto& [m2, c2] : b) {
      if (compatible(m1, m2) && satisfies(merge(m1, m2), r, g)) {
        keep = false;
        break;
      }
    }
    if (keep) out.add(m1, c1);
  }
  return out;
}

SolutionMultiset left_join(const SolutionMultiset& a, const SolutionMultiset& b,
                           const FilterExpr& r, ActiveGraph g) {
  SolutionMultiset joined;
  for (const auto& [m1, c1] : a) {
    for (const auto& [m2, c2] : b) {
      if (!compatible(m1, m2)) continue;
      SolutionMapping m = merge(m1, m2);
      if (satisfies(m, r, g)) joined.add(m, c1 * c2);
    }
  }
  return multiset_union(joined, diff(a, b, r, g));
}

namespace {

std::optional<RdfTerm> resolve(const SolutionMapping& mu, const PatternTerm& t) {
  if (const auto* v = std::get_if<Variable>(&t)) {
    auto it = mu.find(v->name);
    if (it == mu.end()) return std::nullopt;
    return it->second;
  }
  return std::get<RdfTerm>(t);
}

bool match_pos(const PatternTerm& pt, const RdfTerm& value, SolutionMapping& mu) {
  if (const auto* v = std::get_if<Variable>(&pt)) {
    auto [it, inserted] = mu.emplace(v->name, value);
    return inserted || it->second == value;
  }
  return std::get<RdfTerm>(pt) == value;
}

SolutionMultiset eval_triple(const pat::TriplePattern& tp, ActiveGraph g) {
  SolutionMultiset out;
  for (const auto& t : g.dataset.graph(g.gid).triples()) {
    SolutionMapping mu;
    if (match_pos(tp.subj, scope_term(t.subj, g.gid), mu) &&
        match_pos(tp.pred, scope_term(t.pred, g.gid), mu) &&
        match_pos(tp.obj, scope_term(t.obj, g.gid), mu)) {
      out.add(mu);
    }
  }
  return out;
}

const FilterExpr& true_filter() {
  static const FilterPtr t = make_const(true);
  return *t;
}

}  // namespace

bool satisfies(const SolutionMapping& mu, const FilterExpr& r, ActiveGraph g) {
  return std::visit(
      overloaded{
          [&](const fx::Eq& x) {
            auto l = resolve(mu, x.left);
            auto rr = resolve(mu, x.right);
            return l && rr && encode_term(*l) == encode_term(*rr);
          },
          [&](const fx::Neq& x) {
            auto l = resolve(mu, x.left);
            auto rr = resolve(mu, x.right);
            return l && rr && encode_term(*l) != encode_term(*rr);
          },
          [&](const fx::Bound& x) { return mu.contains(x.var.name); },
          [&](const fx::Not& x) { return !satisfies(mu, *x.inner, g); },
          [&](const fx::And& x) {
            return satisfies(mu, *x.left, g) && satisfies(mu, *x.right, g);
          },
          [&](const fx::Or& x) {
            return satisfies(mu, *x.left, g) || satisfies(mu, *x.right, g);
          },
          [&](const fx::Exists& x) { return !eval(*substitute(mu, x.pattern), g).empty(); },
          [&](const fx::NotExists& x) {
            return eval(*substitute(mu, x.pattern), g).empty();
          },
          [](const fx::Const& x) { return x.value; },
      },
      r.node());
}

SolutionMultiset eval(const GraphPattern& p, ActiveGraph g) {
  return std::visit(
      overloaded{
          [](const pat::Empty&) {
            SolutionMultiset out;
            out.add(SolutionMapping{});
            return out;
          },
          [&](const pat::TriplePattern& tp) { return eval_triple(tp, g); },
          [&](const pat::And& x) { return join(eval(*x.left, g), eval(*x.right, g)); },
          [&](const pat::Union& x) {
            return multiset_union(eval(*x.left, g), eval(*x.right, g));
          },
          [&](const pat::Minus& x) { return minus(eval(*x.left, g), eval(*x.right, g)); },
          [&](const pat::Optional& x) {
            const FilterExpr& r = x.filter ? *x.filter : true_filter();
            return left_join(eval(*x.left, g), eval(*x.right, g), r, g);
          },
          [&](const pat::Filter& x) {
            SolutionMultiset out;
            for (const auto& [mu, c] : eval(*x.inner, g)) {
              if (satisfies(mu, *x.expr, g)) out.add(mu, c);
            }
            return out;
          },
          [&](const pat::Graph& x) {
            if (const auto* v = std::get_if<Variable>(&x.term)) {
              SolutionMultiset out;
              const auto& named = g.dataset.named_graphs();
              for (std::size_t i = 0; i < named.size(); ++i) {
                SolutionMultiset bind;
                bind.add(SolutionMapping{{v->name, RdfTerm::iri(named[i].iri)}});
                out = multiset_union(
                    out, join(eval(*x.inner, ActiveGraph{g.dataset, i + 1}), bind));
              }
              return out;
            }
            const auto& term = std::get<RdfTerm>(x.term);
            std::optional<std::size_t> gid;
            if (term.is_iri()) gid = g.dataset.graph_index(term.value());
            if (!gid) return SolutionMultiset{};
            return eval(*x.inner, ActiveGraph{g.dataset, *gid});
          },
      },
      p.node());
}

namespace {

PatternTerm subst_term(const SolutionMapping& mu, const PatternTerm& t) {
  if (const auto* v = std::get_if<Variable>(&t)) {
    auto it = mu.find(v->name);
    if (it != mu.end()) return it->second;
  }
  return t;
}

}  // namespace

PatternPtr substitute(const SolutionMapping& mu, const PatternPtr& p) {
  if (mu.empty()) return p;
  return std::visit(
      overloaded{
          [&](const pat::Empty&) { return p; },
          [&](const pat::TriplePattern& t) {
            return make_triple(subst_term(mu, t.subj), subst_term(mu, t.pred),
                               subst_term(mu, t.obj));
          },
          [&](const pat::And& x) {
            return make_and(substitute(mu, x.left), substitute(mu, x.right));
          },
          [&](const pat::Union& x) {
            return make_union(substitute(mu, x.left), substitute(mu, x.right));
          },
          [&](const pat::Minus& x) {
            return make_minus(substitute(mu, x.left), substitute(mu, x.right));
          },
          [&](const pat::Optional& x) {
            return make_optional(substitute(mu, x.left), substitute(mu, x.right),
                                 x.filter ? substitute(mu, x.filter) : nullptr);
          },
          [&](const pat::Filter& x) {
            return make_filter(substitute(mu, x.inner), substitute(mu, x.expr));
          },
          [&](const pat::Graph& x) {
            return make_graph(subst_term(mu, x.term), substitute(mu, x.inner));
          },
      },
      p->node());
}

FilterPtr substitute(const SolutionMapping& mu, const FilterPtr& e) {
  if (mu.empty()) return e;
  return std::visit(
      overloaded{
          [&](const fx::Eq& x) { return make_eq(subst_term(mu, x.left), subst_term(mu, x.right)); },
          [&](const fx::Neq& x) {
            return make_neq(subst_term(mu, x.left), subst_term(mu, x.right));
          },
          // BOUND of a substituted variable is trivially true.
          [&](const fx::Bound& x) {
            return mu.contains(x.var.name) ? make_const(true) : e;
          },
          [&](const fx::Not& x) { return make_not(substitute(mu, x.inner)); },
          [&](const fx::And& x) {
            return make_fand(substitute(mu, x.left), substitute(mu, x.right));
          },
          [&](const fx::Or& x) {
            return make_for(substitute(mu, x.left), substitute(mu, x.right));
          },
          [&](const fx::Exists& x) { return make_exists(substitute(mu, x.pattern)); },
          [&](const fx::NotExists& x) {
            return make_not_exists(substitute(mu, x.pattern));
          },
          [&](const fx::Const&) { return e; },
      },
      e->node());
}

SolutionMultiset eval_query(const Query& q, const Dataset& d) {
  SolutionMultiset all = eval(*q.pattern, d);
  if (!q.projection) return all;
  SolutionMultiset out;
  for (const auto& [mu, c] : all) {
    SolutionMapping restricted;
    for (const auto& v : *q.projection) {
      if (auto it = mu.find(v); it != mu.end()) restricted.emplace(v, it->second);
    }
    out.add(restricted, c);
  }
  return out;
}

std::string render_mapping(const SolutionMapping& mu) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : mu) {
    if (!first) out += ", ";
    first = false;
    out += "?" + v + "->" + encode_term(t);
  }
  return out + "}";
}

}  // namespace provsparql
