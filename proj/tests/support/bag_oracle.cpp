#include "bag_oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace oracle {

using provsparql::ProjCol;
using provsparql::RAExpr;
using provsparql::SelPredicate;
using provsparql::Tuple;
using provsparql::Value;

namespace {

std::size_t position(const std::vector<std::string>& attrs, const std::string& a) {
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i] == a) return i;
  }
  throw std::logic_error("oracle: no attribute " + a);
}

bool holds(const SelPredicate& p, const std::vector<std::string>& attrs, const Tuple& t) {
  using K = SelPredicate::Kind;
  switch (p.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::And:
      for (const auto& c : p.children()) {
        if (!holds(c, attrs, t)) return false;
      }
      return true;
    case K::Or:
      for (const auto& c : p.children()) {
        if (holds(c, attrs, t)) return true;
      }
      return false;
    case K::Not: return !holds(p.children().at(0), attrs, t);
    case K::AttrEqAttr: return t[position(attrs, p.left())] == t[position(attrs, p.right())];
    case K::AttrEqConst: return t[position(attrs, p.left())] == p.value();
    case K::AttrNeqConst: return !(t[position(attrs, p.left())] == p.value());
    case K::GidGreater: {
      const Value& v = t[position(attrs, p.left())];
      return v.kind() == Value::Kind::Gid && v.gid_value() > p.bound();
    }
  }
  return false;
}

BagRelation eval(const RAExpr& e, const provsparql::BaseDb& db);

BagRelation eval(const RAExpr& e, const provsparql::BaseDb& db) {
  namespace ra = provsparql::ra;
  BagRelation out;
  if (e.as<ra::BaseGraphs>()) {
    out.attrs = {"gid", "IRI"};
    for (const auto& g : db.graphs_rel) out.rows.push_back({Value::gid(g.gid), Value::term(g.iri_key)});
  } else if (e.as<ra::BaseQuads>()) {
    out.attrs = {"gid", "sub", "pred", "obj"};
    for (const auto& q : db.quads_rel) {
      out.rows.push_back({Value::gid(q.gid), Value::term(q.sub), Value::term(q.pred), Value::term(q.obj)});
    }
  } else if (const auto* s = e.as<ra::Select>()) {
    BagRelation in = eval(*s->input, db);
    out.attrs = in.attrs;
    for (auto& t : in.rows) {
      if (holds(s->pred, in.attrs, t)) out.rows.push_back(std::move(t));
    }
  } else if (const auto* p = e.as<ra::Project>()) {
    BagRelation in = eval(*p->input, db);
    for (const auto& c : p->cols) out.attrs.push_back(c.name);
    for (const auto& t : in.rows) {
      Tuple r;
      for (const auto& c : p->cols) {
        switch (c.fn) {
          case ProjCol::Fn::Keep: r.push_back(t[position(in.attrs, c.a)]); break;
          case ProjCol::Fn::ConstUnb: r.push_back(Value::unb()); break;
          case ProjCol::Fn::ConstGid: r.push_back(Value::gid(c.gid)); break;
          case ProjCol::Fn::First: {
            const Value& a = t[position(in.attrs, c.a)];
            r.push_back(a.is_unb() ? t[position(in.attrs, c.b)] : a);
            break;
          }
        }
      }
      out.rows.push_back(std::move(r));
    }
  } else if (const auto* r = e.as<ra::Rename>()) {
    out = eval(*r->input, db);
    std::vector<std::string> renamed = out.attrs;
    for (const auto& [from, to] : r->mapping) renamed[position(out.attrs, from)] = to;
    out.attrs = renamed;
  } else if (const auto* j = e.as<ra::NatJoin>()) {
    BagRelation l = eval(*j->left, db);
    BagRelation rr = eval(*j->right, db);
    out.attrs = l.attrs;
    std::vector<std::pair<std::size_t, std::size_t>> shared;
    std::vector<std::size_t> extra;
    for (std::size_t i = 0; i < rr.attrs.size(); ++i) {
      auto it = std::find(l.attrs.begin(), l.attrs.end(), rr.attrs[i]);
      if (it == l.attrs.end()) {
        extra.push_back(i);
        out.attrs.push_back(rr.attrs[i]);
      } else {
        shared.emplace_back(static_cast<std::size_t>(it - l.attrs.begin()), i);
      }
    }
    for (const auto& a : l.rows) {
      for (const auto& b : rr.rows) {
        bool match = true;
        for (auto [i, k] : shared) match = match && a[i] == b[k];
        if (!match) continue;
        Tuple t = a;
        for (auto k : extra) t.push_back(b[k]);
        out.rows.push_back(std::move(t));
      }
    }
  } else if (const auto* u = e.as<ra::Union>()) {
    out = eval(*u->left, db);
    BagRelation rr = eval(*u->right, db);
    if (rr.attrs != out.attrs) throw std::logic_error("oracle: union schema");
    out.rows.insert(out.rows.end(), rr.rows.begin(), rr.rows.end());
  } else if (const auto* d = e.as<ra::Diff>()) {
    BagRelation l = eval(*d->left, db);
    BagRelation rr = eval(*d->right, db);
    if (rr.attrs != l.attrs) throw std::logic_error("oracle: difference schema");
    out.attrs = l.attrs;
    // Each right copy cancels one left copy.
    std::vector<Tuple> remaining = rr.rows;
    for (const auto& t : l.rows) {
      auto it = std::find(remaining.begin(), remaining.end(), t);
      if (it != remaining.end()) {
        remaining.erase(it);
      } else {
        out.rows.push_back(t);
      }
    }
  } else if (const auto* de = e.as<ra::DupElim>()) {
    BagRelation in = eval(*de->input, db);
    out.attrs = in.attrs;
    for (const auto& t : in.rows) {
      if (std::find(out.rows.begin(), out.rows.end(), t) == out.rows.end()) out.rows.push_back(t);
    }
  } else {
    throw std::logic_error("oracle: unknown node");
  }
  return out;
}

}  // namespace

BagRelation eval_bag(const RAExpr& e, const provsparql::BaseDb& db) { return eval(e, db); }

std::map<Tuple, std::uint64_t> counts(const BagRelation& r) {
  std::map<Tuple, std::uint64_t> out;
  for (const auto& t : r.rows) ++out[t];
  return out;
}

}  // namespace oracle
