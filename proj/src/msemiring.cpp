#include "provsparql/msemiring.hpp"

#include <algorithm>
#include <set>

namespace provsparql {

namespace {

int rank(ProvTerm::Kind k) {
  switch (k) {
    case ProvTerm::Kind::Zero:
    case ProvTerm::Kind::One: return 0;
    case ProvTerm::Kind::Id: return 1;
    case ProvTerm::Kind::Delta: return 2;
    case ProvTerm::Kind::Mul: return 3;
    case ProvTerm::Kind::Add: return 4;
    case ProvTerm::Kind::Monus: return 5;
  }
  return 6;
}

bool canonical_less(const ProvTerm& a, const ProvTerm& b) {
  int ra = rank(a.kind());
  int rb = rank(b.kind());
  if (ra != rb) return ra < rb;
  return a.text() < b.text();
}

std::string render_node(ProvTerm::Kind k, const std::string& name,
                        const std::vector<ProvTerm>& ch) {
  switch (k) {
    case ProvTerm::Kind::Zero: return "0";
    case ProvTerm::Kind::One: return "1";
    case ProvTerm::Kind::Id: return name;
    case ProvTerm::Kind::Add: {
      std::string out;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (i) out += '+';
        out += ch[i].text();
      }
      return out;
    }
    case ProvTerm::Kind::Mul: {
      std::string out;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (i) out += '*';
        if (ch[i].kind() == ProvTerm::Kind::Add) {
          out += "(" + ch[i].text() + ")";
        } else {
          out += ch[i].text();
        }
      }
      return out;
    }
    case ProvTerm::Kind::Monus: {
      const auto& r = ch[1];
      std::string rhs = r.kind() == ProvTerm::Kind::Add ? "(" + r.text() + ")" : r.text();
      return "(" + ch[0].text() + "-" + rhs + ")";
    }
    case ProvTerm::Kind::Delta: return "d(" + ch[0].text() + ")";
  }
  return {};
}

}  // namespace

ProvTerm ProvTerm::build(Kind k, std::string name, std::vector<ProvTerm> children) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->has_monus = k == Kind::Monus;
  for (const auto& c : children) n->has_monus = n->has_monus || c.contains_monus();
  n->text = render_node(k, name, children);
  n->name = std::move(name);
  n->children = std::move(children);
  return ProvTerm(std::move(n));
}

ProvTerm::ProvTerm() : ProvTerm(zero()) {}

ProvTerm ProvTerm::zero() {
  static const ProvTerm z = build(Kind::Zero, {}, {});
  return z;
}

ProvTerm ProvTerm::one() {
  static const ProvTerm o = build(Kind::One, {}, {});
  return o;
}

ProvTerm ProvTerm::id(std::string name) { return build(Kind::Id, std::move(name), {}); }

ProvTerm ProvTerm::add_raw(std::vector<ProvTerm> operands) {
  return build(Kind::Add, {}, std::move(operands));
}

ProvTerm ProvTerm::mul_raw(std::vector<ProvTerm> operands) {
  return build(Kind::Mul, {}, std::move(operands));
}

ProvTerm ProvTerm::monus_raw(ProvTerm left, ProvTerm right) {
  return build(Kind::Monus, {}, {std::move(left), std::move(right)});
}

ProvTerm ProvTerm::delta_raw(ProvTerm inner) {
  return build(Kind::Delta, {}, {std::move(inner)});
}

bool operator==(const ProvTerm& a, const ProvTerm& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.text() != b.text()) return false;
  if (a.kind() == ProvTerm::Kind::Id) return a.name() == b.name();
  const auto& x = a.operands();
  const auto& y = b.operands();
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] == y[i])) return false;
  }
  return true;
}

ProvTerm prov_add(std::vector<ProvTerm> operands) {
  std::vector<ProvTerm> flat;
  for (auto& op : operands) {
    if (op.kind() == ProvTerm::Kind::Add) {
      flat.insert(flat.end(), op.operands().begin(), op.operands().end());
    } else if (!op.is_zero()) {
      flat.push_back(std::move(op));
    }
  }
  if (flat.empty()) return ProvTerm::zero();
  if (flat.size() == 1) return flat.front();
  std::stable_sort(flat.begin(), flat.end(), canonical_less);
  return ProvTerm::add_raw(std::move(flat));
}

ProvTerm prov_mul(std::vector<ProvTerm> operands) {
  std::vector<ProvTerm> flat;
  for (auto& op : operands) {
    if (op.is_zero()) return ProvTerm::zero();
    if (op.kind() == ProvTerm::Kind::Mul) {
      flat.insert(flat.end(), op.operands().begin(), op.operands().end());
    } else if (!op.is_one()) {
      flat.push_back(std::move(op));
    }
  }
  if (flat.empty()) return ProvTerm::one();
  if (flat.size() == 1) return flat.front();
  std::stable_sort(flat.begin(), flat.end(), canonical_less);
  return ProvTerm::mul_raw(std::move(flat));
}

ProvTerm prov_monus(const ProvTerm& left, const ProvTerm& right) {
  if (right.is_zero()) return left;
  if (left.is_zero()) return ProvTerm::zero();
  if (left == right) return ProvTerm::zero();
  return ProvTerm::monus_raw(left, right);
}

ProvTerm prov_delta(const ProvTerm& inner) {
  if (inner.is_zero() || inner.is_one()) return inner;
  if (inner.kind() == ProvTerm::Kind::Delta) return inner;
  return ProvTerm::delta_raw(inner);
}

ProvTerm normalize(const ProvTerm& t) {
  switch (t.kind()) {
    case ProvTerm::Kind::Zero:
    case ProvTerm::Kind::One:
    case ProvTerm::Kind::Id: return t;
    case ProvTerm::Kind::Add:
    case ProvTerm::Kind::Mul: {
      std::vector<ProvTerm> ops;
      ops.reserve(t.operands().size());
      for (const auto& op : t.operands()) ops.push_back(normalize(op));
      return t.kind() == ProvTerm::Kind::Add ? prov_add(std::move(ops))
                                             : prov_mul(std::move(ops));
    }
    case ProvTerm::Kind::Monus:
      return prov_monus(normalize(t.operands()[0]), normalize(t.operands()[1]));
    case ProvTerm::Kind::Delta: return prov_delta(normalize(t.operands()[0]));
  }
  return t;
}

std::string render(const ProvTerm& t) { return t.text(); }

namespace {
void collect_ids(const ProvTerm& t, std::set<std::string>& out) {
  if (t.kind() == ProvTerm::Kind::Id) out.insert(t.name());
  for (const auto& c : t.operands()) collect_ids(c, out);
}
}  // namespace

std::vector<std::string> identifiers(const ProvTerm& t) {
  std::set<std::string> out;
  collect_ids(t, out);
  return {out.begin(), out.end()};
}

}  // namespace provsparql
