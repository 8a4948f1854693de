#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "provsparql/error.hpp"

namespace provsparql {

/// An element of the free m-semiring over tuple identifiers: a how-provenance
/// term built from identifiers, 0, 1, +, *, monus and delta. Immutable and
/// cheap to copy.
class ProvTerm {
public:
  enum class Kind : std::uint8_t { Zero, One, Id, Add, Mul, Monus, Delta };

  ProvTerm();  // Zero

  static ProvTerm zero();
  static ProvTerm one();
  static ProvTerm id(std::string name);

  // Raw constructors: build the node as given, no simplification.
  static ProvTerm add_raw(std::vector<ProvTerm> operands);
  static ProvTerm mul_raw(std::vector<ProvTerm> operands);
  static ProvTerm monus_raw(ProvTerm left, ProvTerm right);
  static ProvTerm delta_raw(ProvTerm inner);

  Kind kind() const { return node_->kind; }
  bool is_zero() const { return kind() == Kind::Zero; }
  bool is_one() const { return kind() == Kind::One; }
  /// Identifier name, only for Kind::Id.
  const std::string& name() const { return node_->name; }
  /// Add/Mul operands; Monus has [left, right]; Delta has [inner].
  const std::vector<ProvTerm>& operands() const { return node_->children; }
  bool contains_monus() const { return node_->has_monus; }

  /// Rendering in the output grammar (see render()).
  const std::string& text() const { return node_->text; }

  friend bool operator==(const ProvTerm& a, const ProvTerm& b);

private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<ProvTerm> children;
    std::string text;
    bool has_monus = false;
  };

  explicit ProvTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static ProvTerm build(Kind k, std::string name, std::vector<ProvTerm> children);

  std::shared_ptr<const Node> node_;
};

// Simplifying constructors. Inputs must already be normalized; the result is
// normalized.
ProvTerm prov_add(std::vector<ProvTerm> operands);
ProvTerm prov_mul(std::vector<ProvTerm> operands);
ProvTerm prov_monus(const ProvTerm& left, const ProvTerm& right);
ProvTerm prov_delta(const ProvTerm& inner);

/// Rewrites a term with the identities that hold in every m-semiring
/// (units, annihilation, x-0, 0-x, x-x, delta of constants, nested delta) and
/// flattens and sorts sums and products. Never distributes.
ProvTerm normalize(const ProvTerm& t);

/// `0`, `1`, identifiers verbatim, `a*b`, `a+b`, `(a-b)`, `d(a)`. Sums inside
/// products are parenthesized, as is a sum on the right of a monus.
std::string render(const ProvTerm& t);

/// Identifiers occurring in a term, sorted.
std::vector<std::string> identifiers(const ProvTerm& t);

// ---------------------------------------------------------------------------
// Semirings

template <class S>
concept MSemiring = requires(const S& s, const typename S::value_type& a,
                             const typename S::value_type& b) {
  typename S::value_type;
  { s.zero() } -> std::convertible_to<typename S::value_type>;
  { s.one() } -> std::convertible_to<typename S::value_type>;
  { s.add(a, b) } -> std::convertible_to<typename S::value_type>;
  { s.mul(a, b) } -> std::convertible_to<typename S::value_type>;
  { s.monus(a, b) } -> std::convertible_to<typename S::value_type>;
  { s.delta(a) } -> std::convertible_to<typename S::value_type>;
  { s.is_zero(a) } -> std::convertible_to<bool>;
};

/// (N, +, *, 0, 1) with truncated subtraction.
struct NatSemiring {
  using value_type = std::uint64_t;
  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type add(value_type a, value_type b) const { return a + b; }
  value_type mul(value_type a, value_type b) const { return a * b; }
  value_type monus(value_type a, value_type b) const { return a > b ? a - b : 0; }
  value_type delta(value_type a) const { return a == 0 ? 0 : 1; }
  bool is_zero(value_type a) const { return a == 0; }
  /// x <= y in the natural order.
  bool leq(value_type a, value_type b) const { return a <= b; }
};

/// ({f, t}, or, and, f, t) with x - y = x and not y.
struct BoolSemiring {
  using value_type = bool;
  value_type zero() const { return false; }
  value_type one() const { return true; }
  value_type add(bool a, bool b) const { return a || b; }
  value_type mul(bool a, bool b) const { return a && b; }
  value_type monus(bool a, bool b) const { return a && !b; }
  value_type delta(bool a) const { return a; }
  bool is_zero(bool a) const { return !a; }
  bool leq(bool a, bool b) const { return !a || b; }
};

/// The free m-semiring. Zero-testing is syntactic on normalized terms. Delta
/// stays symbolic over annotations that contain a monus and collapses to 1
/// otherwise.
struct FreeSemiring {
  using value_type = ProvTerm;
  value_type zero() const { return ProvTerm::zero(); }
  value_type one() const { return ProvTerm::one(); }
  value_type add(const ProvTerm& a, const ProvTerm& b) const { return prov_add({a, b}); }
  value_type mul(const ProvTerm& a, const ProvTerm& b) const { return prov_mul({a, b}); }
  value_type monus(const ProvTerm& a, const ProvTerm& b) const { return prov_monus(a, b); }
  value_type delta(const ProvTerm& a) const {
    if (a.is_zero()) return a;
    return a.contains_monus() ? prov_delta(a) : ProvTerm::one();
  }
  bool is_zero(const ProvTerm& a) const { return a.is_zero(); }
};

inline NatSemiring nat_semiring() { return {}; }
inline BoolSemiring bool_semiring() { return {}; }
inline FreeSemiring free_semiring() { return {}; }

/// Assignment of identifiers to values of a target semiring. When
/// `fallback` is set it is used for identifiers missing from the map.
template <MSemiring S>
struct Homomorphism {
  S target{};
  std::map<std::string, typename S::value_type> assignment;
  std::optional<typename S::value_type> fallback;

  typename S::value_type lookup(const std::string& name) const {
    if (auto it = assignment.find(name); it != assignment.end()) return it->second;
    if (fallback) return *fallback;
    throw UnboundIdentifier(name);
  }
};

/// Evaluates a provenance term in the target semiring. Delta maps nonzero
/// values to one.
template <MSemiring S>
typename S::value_type hom_eval(const ProvTerm& t, const Homomorphism<S>& h) {
  const S& s = h.target;
  switch (t.kind()) {
    case ProvTerm::Kind::Zero: return s.zero();
    case ProvTerm::Kind::One: return s.one();
    case ProvTerm::Kind::Id: return h.lookup(t.name());
    case ProvTerm::Kind::Add: {
      auto acc = s.zero();
      for (const auto& op : t.operands()) acc = s.add(acc, hom_eval(op, h));
      return acc;
    }
    case ProvTerm::Kind::Mul: {
      auto acc = s.one();
      for (const auto& op : t.operands()) acc = s.mul(acc, hom_eval(op, h));
      return acc;
    }
    case ProvTerm::Kind::Monus:
      return s.monus(hom_eval(t.operands()[0], h), hom_eval(t.operands()[1], h));
    case ProvTerm::Kind::Delta: {
      auto v = hom_eval(t.operands()[0], h);
      return s.is_zero(v) ? s.zero() : s.one();
    }
  }
  return s.zero();
}

}  // namespace provsparql
