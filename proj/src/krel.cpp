#include "provsparql/krel.hpp"

#include <algorithm>
#include <set>

namespace provsparql {

namespace {
template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Term: return text_;
    case Kind::Unb: return "unb";
    case Kind::Gid: return std::to_string(gid_);
  }
  return {};
}

Schema::Schema(std::vector<std::string> attrs) : attrs_(std::move(attrs)) {
  std::set<std::string> seen;
  for (const auto& a : attrs_) {
    if (!seen.insert(a).second) throw SchemaMismatch("duplicate attribute '" + a + "'");
  }
}

bool Schema::contains(const std::string& a) const {
  return std::find(attrs_.begin(), attrs_.end(), a) != attrs_.end();
}

std::size_t Schema::index_of(const std::string& a) const {
  auto it = std::find(attrs_.begin(), attrs_.end(), a);
  if (it == attrs_.end()) throw UnknownAttribute(a);
  return static_cast<std::size_t>(it - attrs_.begin());
}

std::string to_string(const Schema& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += s.attrs()[i];
  }
  return out + "]";
}

SelPredicate SelPredicate::eq(std::string a, std::string b) {
  SelPredicate p(Kind::AttrEqAttr);
  p.left_ = std::move(a);
  p.right_ = std::move(b);
  return p;
}

SelPredicate SelPredicate::eq(std::string a, Value v) {
  SelPredicate p(Kind::AttrEqConst);
  p.left_ = std::move(a);
  p.value_ = std::move(v);
  return p;
}

SelPredicate SelPredicate::neq(std::string a, Value v) {
  SelPredicate p(Kind::AttrNeqConst);
  p.left_ = std::move(a);
  p.value_ = std::move(v);
  return p;
}

SelPredicate SelPredicate::gid_greater(std::string a, std::uint64_t n) {
  SelPredicate p(Kind::GidGreater);
  p.left_ = std::move(a);
  p.bound_ = n;
  return p;
}

SelPredicate SelPredicate::conj(std::vector<SelPredicate> parts) {
  std::erase_if(parts, [](const SelPredicate& x) { return x.kind() == Kind::True; });
  if (parts.empty()) return always();
  if (parts.size() == 1) return parts.front();
  SelPredicate p(Kind::And);
  p.children_ = std::move(parts);
  return p;
}

SelPredicate SelPredicate::disj(std::vector<SelPredicate> parts) {
  std::erase_if(parts, [](const SelPredicate& x) { return x.kind() == Kind::False; });
  if (parts.empty()) return never();
  if (parts.size() == 1) return parts.front();
  SelPredicate p(Kind::Or);
  p.children_ = std::move(parts);
  return p;
}

SelPredicate SelPredicate::negate(SelPredicate inner) {
  SelPredicate p(Kind::Not);
  p.children_.push_back(std::move(inner));
  return p;
}

std::vector<std::string> SelPredicate::attributes() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& a) {
    if (!a.empty() && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  };
  add(left_);
  add(right_);
  for (const auto& c : children_) {
    for (const auto& a : c.attributes()) add(a);
  }
  return out;
}

std::function<bool(const Tuple&)> SelPredicate::bind(const Schema& schema) const {
  switch (kind_) {
    case Kind::True: return [](const Tuple&) { return true; };
    case Kind::False: return [](const Tuple&) { return false; };
    case Kind::AttrEqAttr: {
      auto i = schema.index_of(left_);
      auto j = schema.index_of(right_);
      return [i, j](const Tuple& t) { return t[i] == t[j]; };
    }
    case Kind::AttrEqConst: {
      auto i = schema.index_of(left_);
      return [i, v = value_](const Tuple& t) { return t[i] == v; };
    }
    case Kind::AttrNeqConst: {
      auto i = schema.index_of(left_);
      return [i, v = value_](const Tuple& t) { return !(t[i] == v); };
    }
    case Kind::GidGreater: {
      auto i = schema.index_of(left_);
      return [i, n = bound_](const Tuple& t) {
        return t[i].kind() == Value::Kind::Gid && t[i].gid_value() > n;
      };
    }
    case Kind::Not: {
      auto inner = children_.front().bind(schema);
      return [inner](const Tuple& t) { return !inner(t); };
    }
    case Kind::And:
    case Kind::Or: {
      std::vector<std::function<bool(const Tuple&)>> parts;
      for (const auto& c : children_) parts.push_back(c.bind(schema));
      if (kind_ == Kind::And) {
        return [parts](const Tuple& t) {
          return std::all_of(parts.begin(), parts.end(), [&](const auto& f) { return f(t); });
        };
      }
      return [parts](const Tuple& t) {
        return std::any_of(parts.begin(), parts.end(), [&](const auto& f) { return f(t); });
      };
    }
  }
  return [](const Tuple&) { return false; };
}

std::string SelPredicate::to_string() const {
  switch (kind_) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::AttrEqAttr: return left_ + " = " + right_;
    case Kind::AttrEqConst: return left_ + " = " + value_.to_string();
    case Kind::AttrNeqConst: return left_ + " != " + value_.to_string();
    case Kind::GidGreater: return left_ + " > " + std::to_string(bound_);
    case Kind::Not: return "not(" + children_.front().to_string() + ")";
    case Kind::And:
    case Kind::Or: {
      std::string out = "(";
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i) out += kind_ == Kind::And ? " and " : " or ";
        out += children_[i].to_string();
      }
      return out + ")";
    }
  }
  return {};
}

std::string ProjCol::to_string() const {
  switch (fn) {
    case Fn::Keep: return name == a ? name : name + "<-" + a;
    case Fn::ConstUnb: return name + "<-unb";
    case Fn::ConstGid: return name + "<-" + std::to_string(gid);
    case Fn::First: return name + "<-first(" + a + "," + b + ")";
  }
  return name;
}

const Schema& graphs_schema() {
  static const Schema s{"gid", "IRI"};
  return s;
}

const Schema& quads_schema() {
  static const Schema s{"gid", "sub", "pred", "obj"};
  return s;
}

namespace {
RAPtr mk(RAExpr::Node n, Schema s) {
  return std::make_shared<const RAExpr>(std::move(n), std::move(s));
}
}  // namespace

RAPtr ra_graphs() {
  static const RAPtr g = mk(ra::BaseGraphs{}, graphs_schema());
  return g;
}

RAPtr ra_quads() {
  static const RAPtr q = mk(ra::BaseQuads{}, quads_schema());
  return q;
}

RAPtr ra_select(SelPredicate pred, RAPtr input) {
  for (const auto& a : pred.attributes()) input->schema().index_of(a);
  Schema s = input->schema();
  return mk(ra::Select{std::move(pred), std::move(input)}, std::move(s));
}

RAPtr ra_project(std::vector<ProjCol> cols, RAPtr input) {
  std::vector<std::string> names;
  for (const auto& c : cols) {
    if (c.fn == ProjCol::Fn::Keep || c.fn == ProjCol::Fn::First) input->schema().index_of(c.a);
    if (c.fn == ProjCol::Fn::First) input->schema().index_of(c.b);
    names.push_back(c.name);
  }
  return mk(ra::Project{std::move(cols), std::move(input)}, Schema(std::move(names)));
}

RAPtr ra_project_keep(const std::vector<std::string>& attrs, RAPtr input) {
  std::vector<ProjCol> cols;
  for (const auto& a : attrs) cols.push_back(ProjCol::keep(a));
  return ra_project(std::move(cols), std::move(input));
}

RAPtr ra_rename(std::vector<std::pair<std::string, std::string>> mapping, RAPtr input) {
  std::vector<std::string> attrs = input->schema().attrs();
  std::set<std::string> sources;
  for (const auto& [from, to] : mapping) {
    input->schema().index_of(from);
    if (!sources.insert(from).second) {
      throw SchemaMismatch("rename lists '" + from + "' twice");
    }
  }
  for (auto& a : attrs) {
    for (const auto& [from, to] : mapping) {
      if (a == from) {
        a = to;
        break;
      }
    }
  }
  Schema s(std::move(attrs));  // rejects non-bijective renames
  return mk(ra::Rename{std::move(mapping), std::move(input)}, std::move(s));
}

RAPtr ra_join(RAPtr left, RAPtr right) {
  std::vector<std::string> attrs = left->schema().attrs();
  for (const auto& a : right->schema().attrs()) {
    if (!left->schema().contains(a)) attrs.push_back(a);
  }
  return mk(ra::NatJoin{std::move(left), std::move(right)}, Schema(std::move(attrs)));
}

RAPtr ra_union(RAPtr left, RAPtr right) {
  if (!(left->schema() == right->schema())) {
    throw SchemaMismatch("union of " + to_string(left->schema()) + " and " +
                         to_string(right->schema()));
  }
  Schema s = left->schema();
  return mk(ra::Union{std::move(left), std::move(right)}, std::move(s));
}

RAPtr ra_diff(RAPtr left, RAPtr right) {
  if (!(left->schema() == right->schema())) {
    throw SchemaMismatch("difference of " + to_string(left->schema()) + " and " +
                         to_string(right->schema()));
  }
  Schema s = left->schema();
  return mk(ra::Diff{std::move(left), std::move(right)}, std::move(s));
}

RAPtr ra_dupelim(RAPtr input) {
  Schema s = input->schema();
  return mk(ra::DupElim{std::move(input)}, std::move(s));
}

namespace {

void print_node(const RAExpr& e, int depth, std::string& out) {
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
  auto child = [&](const RAPtr& c) { print_node(*c, depth + 1, out); };
  std::visit(overloaded{
                 [&](const ra::BaseGraphs&) { out += "Graphs\n"; },
                 [&](const ra::BaseQuads&) { out += "Quads\n"; },
                 [&](const ra::Select& n) {
                   out += "Select " + n.pred.to_string() + "\n";
                   child(n.input);
                 },
                 [&](const ra::Project& n) {
                   out += "Project [";
                   for (std::size_t i = 0; i < n.cols.size(); ++i) {
                     if (i) out += ", ";
                     out += n.cols[i].to_string();
                   }
                   out += "]\n";
                   child(n.input);
                 },
                 [&](const ra::Rename& n) {
                   out += "Rename {";
                   for (std::size_t i = 0; i < n.mapping.size(); ++i) {
                     if (i) out += ", ";
                     out += n.mapping[i].second + "<-" + n.mapping[i].first;
                   }
                   out += "}\n";
                   child(n.input);
                 },
                 [&](const ra::NatJoin& n) {
                   out += "NatJoin\n";
                   child(n.left);
                   child(n.right);
                 },
                 [&](const ra::Union& n) {
                   out += "Union\n";
                   child(n.left);
                   child(n.right);
                 },
                 [&](const ra::Diff& n) {
                   out += "Diff\n";
                   child(n.left);
                   child(n.right);
                 },
                 [&](const ra::DupElim& n) {
                   out += "DupElim\n";
                   child(n.input);
                 },
             },
             e.node());
}

const char* node_name(const RAExpr& e) {
  static constexpr const char* names[] = {"Graphs", "Quads", "Select", "Project", "Rename",
                                          "NatJoin", "Union", "Diff", "DupElim"};
  return names[e.node().index()];
}

void count_nodes(const RAExpr& e, std::map<std::string, std::size_t>& out) {
  ++out[node_name(e)];
  std::visit(overloaded{
                 [](const ra::BaseGraphs&) {},
                 [](const ra::BaseQuads&) {},
                 [&](const auto& n) {
                   if constexpr (requires { n.input; }) {
                     count_nodes(*n.input, out);
                   } else {
                     count_nodes(*n.left, out);
                     count_nodes(*n.right, out);
                   }
                 },
             },
             e.node());
}

}  // namespace

std::string print_ra(const RAExpr& e) {
  std::string out;
  print_node(e, 0, out);
  return out;
}

std::map<std::string, std::size_t> count_ra_nodes(const RAExpr& e) {
  std::map<std::string, std::size_t> out;
  count_nodes(e, out);
  return out;
}

}  // namespace provsparql
