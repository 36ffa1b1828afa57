#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coup {

/// Simple types over named base types. `o` is the formula type.
class SimpleType {
 public:
  SimpleType() = default;

  static SimpleType base(std::string name) {
    auto n = std::make_shared<Node>();
    n->name = std::move(name);
    return SimpleType(std::move(n));
  }
  static SimpleType arrow(SimpleType dom, SimpleType cod) {
    auto n = std::make_shared<Node>();
    n->parts = {std::move(dom), std::move(cod)};
    return SimpleType(std::move(n));
  }
  static SimpleType formula() { return base("o"); }

  bool valid() const { return node_ != nullptr; }
  bool is_arrow() const { return node_ && !node_->parts.empty(); }
  bool is_base() const { return node_ && node_->parts.empty(); }
  bool is_formula() const { return is_base() && node_->name == "o"; }
  /// A base type other than `o`.
  bool is_individual() const { return is_base() && node_->name != "o"; }

  const std::string& name() const { return node_->name; }
  const SimpleType& domain() const { return node_->parts[0]; }
  const SimpleType& codomain() const { return node_->parts[1]; }

  /// Final codomain after stripping every arrow.
  const SimpleType& target() const {
    const SimpleType* t = this;
    while (t->is_arrow()) t = &t->codomain();
    return *t;
  }
  std::vector<SimpleType> arguments() const {
    std::vector<SimpleType> out;
    const SimpleType* t = this;
    while (t->is_arrow()) {
      out.push_back(t->domain());
      t = &t->codomain();
    }
    return out;
  }
  friend bool operator==(const SimpleType& a, const SimpleType& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.is_arrow() != b.is_arrow()) return false;
    if (a.is_arrow()) return a.domain() == b.domain() && a.codomain() == b.codomain();
    return a.name() == b.name();
  }
  friend bool operator!=(const SimpleType& a, const SimpleType& b) { return !(a == b); }

  std::string to_string() const {
    if (!node_) return "?";
    if (!is_arrow()) return node_->name;
    std::string d = domain().to_string();
    if (domain().is_arrow()) d = "(" + d + ")";
    return d + " -> " + codomain().to_string();
  }

 private:
  struct Node {
    std::string name;
    std::vector<SimpleType> parts;  // empty, or {domain, codomain}
  };
  explicit SimpleType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline bool is_logical_symbol(const std::string& name) {
  return name == "&" || name == ";" || name == "=>" || name == "true" || name == "forall" ||
         name == "exists";
}

inline bool is_reserved_word(const std::string& name) {
  return is_logical_symbol(name) || name == "fix" || name == "kind" || name == "type" ||
         name == "const" || name == "fragment" || name == "define" || name == "S" || name == "P";
}

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constants with their types, in declaration order. Eigenvariables are
/// ordinary constants added by `extend`.
class Signature {
 public:
  void add_kind(const std::string& name) {
    if (name == "o") return;
    if (!has_kind(name)) kinds_.push_back(name);
  }
  bool has_kind(const std::string& name) const {
    if (name == "o") return true;
    for (const auto& k : kinds_)
      if (k == name) return true;
    return false;
  }
  const std::vector<std::string>& kinds() const { return kinds_; }

  void add_constant(const std::string& name, const SimpleType& type) {
    if (is_reserved_word(name)) throw SignatureError("constant '" + name + "' shadows a reserved symbol");
    if (contains(name)) throw SignatureError("constant '" + name + "' declared twice");
    check_type(name, type);
    index_[name] = order_.size();
    order_.emplace_back(name, type);
  }

  /// Σ extended with an eigenvariable; throws if the name is taken.
  Signature extend(const std::string& name, const SimpleType& type) const {
    Signature s = *this;
    s.add_constant(name, type);
    return s;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  std::optional<SimpleType> lookup(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return order_[it->second].second;
  }
  const std::vector<std::pair<std::string, SimpleType>>& constants() const { return order_; }

 private:
  void check_type(const std::string& name, const SimpleType& t) const {
    for (const auto& a : t.arguments()) {
      // Individual constructors never take formulas.
      if (a.is_formula() && t.target().is_individual())
        throw SignatureError("constructor '" + name + "' takes an argument of type o");
      check_bases(name, a);
    }
    check_bases(name, t.target());
  }
  void check_bases(const std::string& name, const SimpleType& t) const {
    if (t.is_arrow()) {
      check_bases(name, t.domain());
      check_bases(name, t.codomain());
    } else if (!has_kind(t.name())) {
      throw SignatureError("constant '" + name + "' uses undeclared type '" + t.name() + "'");
    }
  }

  std::vector<std::string> kinds_;
  std::vector<std::pair<std::string, SimpleType>> order_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace coup
