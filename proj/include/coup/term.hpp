#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coup/types.hpp"

namespace coup {

enum class TermKind { BVar, FVar, Const, App, Lam, Fix };

struct TermNode;

/// Immutable, shared λ-term in locally nameless form: bound variables are
/// de Bruijn indices, free variables and constants are named. Binder names
/// are kept only as printing hints, so `==` is α-equivalence.
class Term {
 public:
  Term() = default;

  static Term bvar(std::uint32_t index);
  static Term fvar(std::string name);
  static Term constant(std::string name);
  static Term app(Term fun, Term arg);
  static Term apps(Term head, const std::vector<Term>& args) {
    for (const auto& a : args) head = app(std::move(head), a);
    return head;
  }
  static Term lam(std::string hint, SimpleType type, Term body);
  static Term fix(std::string hint, SimpleType type, Term body);

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const;
  bool is(TermKind k) const { return valid() && kind() == k; }
  const std::string& name() const;
  std::uint32_t index() const;
  const SimpleType& binder_type() const;
  const Term& fun() const;
  const Term& arg() const;
  const Term& body() const { return fun(); }
  /// One more than the largest loose de Bruijn index (0 when locally closed).
  std::uint32_t loose_bound() const;
  bool has_free_vars() const;
  bool has_fix() const;
  std::size_t size() const;
  const TermNode* raw() const { return node_.get(); }

  /// Head of the application spine.
  const Term& head() const {
    const Term* t = this;
    while (t->is(TermKind::App)) t = &t->fun();
    return *t;
  }
  std::vector<Term> args() const {
    std::vector<Term> out;
    const Term* t = this;
    while (t->is(TermKind::App)) {
      out.push_back(t->arg());
      t = &t->fun();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

struct TermNode {
  TermKind kind;
  std::string name;  // FVar/Const name, binder hint for Lam/Fix
  std::uint32_t index = 0;
  SimpleType type;  // binder type
  Term left, right;  // App: fun/arg, Lam/Fix: body/-
  std::uint32_t loose = 0;
  bool fvars = false;
  bool fixes = false;
  std::size_t size = 1;
};

inline Term Term::bvar(std::uint32_t index) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::BVar;
  n->index = index;
  n->loose = index + 1;
  return Term(std::move(n));
}
inline Term Term::fvar(std::string name) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::FVar;
  n->name = std::move(name);
  n->fvars = true;
  return Term(std::move(n));
}
inline Term Term::constant(std::string name) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Const;
  n->name = std::move(name);
  return Term(std::move(n));
}
inline Term Term::app(Term fun, Term arg) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::App;
  n->loose = std::max(fun.loose_bound(), arg.loose_bound());
  n->fvars = fun.has_free_vars() || arg.has_free_vars();
  n->fixes = fun.has_fix() || arg.has_fix();
  n->size = 1 + fun.size() + arg.size();
  n->left = std::move(fun);
  n->right = std::move(arg);
  return Term(std::move(n));
}
inline Term Term::lam(std::string hint, SimpleType type, Term body) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Lam;
  n->name = std::move(hint);
  n->type = std::move(type);
  n->loose = body.loose_bound() > 0 ? body.loose_bound() - 1 : 0;
  n->fvars = body.has_free_vars();
  n->fixes = body.has_fix();
  n->size = 1 + body.size();
  n->left = std::move(body);
  return Term(std::move(n));
}
inline Term Term::fix(std::string hint, SimpleType type, Term body) {
  Term t = lam(std::move(hint), std::move(type), std::move(body));
  auto n = std::make_shared<TermNode>(*t.node_);
  n->kind = TermKind::Fix;
  n->fixes = true;
  return Term(std::move(n));
}

inline TermKind Term::kind() const { return node_->kind; }
inline const std::string& Term::name() const { return node_->name; }
inline std::uint32_t Term::index() const { return node_->index; }
inline const SimpleType& Term::binder_type() const { return node_->type; }
inline const Term& Term::fun() const { return node_->left; }
inline const Term& Term::arg() const { return node_->right; }
inline std::uint32_t Term::loose_bound() const { return node_ ? node_->loose : 0; }
inline bool Term::has_free_vars() const { return node_ && node_->fvars; }
inline bool Term::has_fix() const { return node_ && node_->fixes; }
inline std::size_t Term::size() const { return node_ ? node_->size : 0; }

inline bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case TermKind::BVar:
      return a.index() == b.index();
    case TermKind::FVar:
    case TermKind::Const:
      return a.name() == b.name();
    case TermKind::App:
      return a.fun() == b.fun() && a.arg() == b.arg();
    case TermKind::Lam:
    case TermKind::Fix:
      return a.binder_type() == b.binder_type() && a.body() == b.body();
  }
  return false;
}

// ---------------------------------------------------------------------------
// de Bruijn machinery

/// Adds `delta` to every bound index >= cutoff.
inline Term shift(const Term& t, int delta, std::uint32_t cutoff = 0) {
  if (delta == 0 || t.loose_bound() <= cutoff) return t;
  switch (t.kind()) {
    case TermKind::BVar:
      return Term::bvar(static_cast<std::uint32_t>(static_cast<int>(t.index()) + delta));
    case TermKind::App:
      return Term::app(shift(t.fun(), delta, cutoff), shift(t.arg(), delta, cutoff));
    case TermKind::Lam:
      return Term::lam(t.name(), t.binder_type(), shift(t.body(), delta, cutoff + 1));
    case TermKind::Fix:
      return Term::fix(t.name(), t.binder_type(), shift(t.body(), delta, cutoff + 1));
    default:
      return t;
  }
}

namespace detail {
inline Term instantiate_at(const Term& t, std::uint32_t depth, const Term& s) {
  if (t.loose_bound() <= depth) return t;
  switch (t.kind()) {
    case TermKind::BVar:
      if (t.index() == depth) return shift(s, static_cast<int>(depth));
      return Term::bvar(t.index() - 1);
    case TermKind::App:
      return Term::app(instantiate_at(t.fun(), depth, s), instantiate_at(t.arg(), depth, s));
    case TermKind::Lam:
      return Term::lam(t.name(), t.binder_type(), instantiate_at(t.body(), depth + 1, s));
    case TermKind::Fix:
      return Term::fix(t.name(), t.binder_type(), instantiate_at(t.body(), depth + 1, s));
    default:
      return t;
  }
}

inline Term abstract_at(const Term& t, const std::string& name, TermKind which, std::uint32_t depth) {
  bool may_contain = which == TermKind::Const || t.has_free_vars();
  if (!may_contain) return t;
  switch (t.kind()) {
    case TermKind::FVar:
    case TermKind::Const:
      if (t.kind() == which && t.name() == name) return Term::bvar(depth);
      return t;
    case TermKind::App:
      return Term::app(abstract_at(t.fun(), name, which, depth), abstract_at(t.arg(), name, which, depth));
    case TermKind::Lam:
      return Term::lam(t.name(), t.binder_type(), abstract_at(t.body(), name, which, depth + 1));
    case TermKind::Fix:
      return Term::fix(t.name(), t.binder_type(), abstract_at(t.body(), name, which, depth + 1));
    default:
      return t;
  }
}
}  // namespace detail

/// Replaces bound index 0 of a binder body by `s` (s is taken relative to
/// the binder's context).
inline Term instantiate(const Term& body, const Term& s) { return detail::instantiate_at(body, 0, s); }

/// Turns free variable `name` into bound index 0 (the inverse of opening).
inline Term abstract_fvar(const Term& t, const std::string& name) {
  return detail::abstract_at(shift(t, 1), name, TermKind::FVar, 0);
}
inline Term abstract_const(const Term& t, const std::string& name) {
  return detail::abstract_at(shift(t, 1), name, TermKind::Const, 0);
}

/// fix λx. M  ↦  M[x := fix λx. M]
inline Term unfold_fix(const Term& f) { return instantiate(f.body(), f); }

// ---------------------------------------------------------------------------
// β-normalization (Fix nodes are opaque heads)

inline Term beta_normalize(const Term& t) {
  switch (t.kind()) {
    case TermKind::App: {
      Term f = beta_normalize(t.fun());
      if (f.is(TermKind::Lam)) return beta_normalize(instantiate(f.body(), t.arg()));
      return Term::app(std::move(f), beta_normalize(t.arg()));
    }
    case TermKind::Lam:
      return Term::lam(t.name(), t.binder_type(), beta_normalize(t.body()));
    case TermKind::Fix:
      return Term::fix(t.name(), t.binder_type(), beta_normalize(t.body()));
    default:
      return t;
  }
}

/// Contracts redexes innermost-first instead of head-first; used to compare
/// reduction orders.
inline Term beta_normalize_innermost(const Term& t) {
  switch (t.kind()) {
    case TermKind::App: {
      Term f = beta_normalize_innermost(t.fun());
      Term a = beta_normalize_innermost(t.arg());
      if (f.is(TermKind::Lam)) return beta_normalize_innermost(instantiate(f.body(), a));
      return Term::app(std::move(f), std::move(a));
    }
    case TermKind::Lam:
      return Term::lam(t.name(), t.binder_type(), beta_normalize_innermost(t.body()));
    case TermKind::Fix:
      return Term::fix(t.name(), t.binder_type(), beta_normalize_innermost(t.body()));
    default:
      return t;
  }
}

// ---------------------------------------------------------------------------
// Canonical key, used for memo tables. Binder hints never appear in it.

inline void write_key(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::BVar:
      out += '#';
      out += std::to_string(t.index());
      break;
    case TermKind::FVar:
      out += '?';
      out += t.name();
      break;
    case TermKind::Const:
      out += t.name();
      break;
    case TermKind::App:
      out += '(';
      write_key(t.fun(), out);
      out += ' ';
      write_key(t.arg(), out);
      out += ')';
      break;
    case TermKind::Lam:
    case TermKind::Fix:
      out += t.is(TermKind::Lam) ? "(\\" : "(fix\\";
      out += t.binder_type().to_string();
      out += '.';
      write_key(t.body(), out);
      out += ')';
      break;
  }
}
inline std::string term_key(const Term& t) {
  std::string s;
  write_key(t, s);
  return s;
}

// ---------------------------------------------------------------------------
// Free variables, constants, substitution

inline void collect_fvars(const Term& t, std::set<std::string>& out) {
  if (!t.has_free_vars()) return;
  switch (t.kind()) {
    case TermKind::FVar:
      out.insert(t.name());
      break;
    case TermKind::App:
      collect_fvars(t.fun(), out);
      collect_fvars(t.arg(), out);
      break;
    case TermKind::Lam:
    case TermKind::Fix:
      collect_fvars(t.body(), out);
      break;
    default:
      break;
  }
}
inline std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> s;
  collect_fvars(t, s);
  return s;
}

inline void collect_constants(const Term& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::Const:
      out.insert(t.name());
      break;
    case TermKind::App:
      collect_constants(t.fun(), out);
      collect_constants(t.arg(), out);
      break;
    case TermKind::Lam:
    case TermKind::Fix:
      collect_constants(t.body(), out);
      break;
    default:
      break;
  }
}

inline bool mentions_constant(const Term& t, const std::string& name) {
  switch (t.kind()) {
    case TermKind::Const:
      return t.name() == name;
    case TermKind::App:
      return mentions_constant(t.fun(), name) || mentions_constant(t.arg(), name);
    case TermKind::Lam:
    case TermKind::Fix:
      return mentions_constant(t.body(), name);
    default:
      return false;
  }
}

/// Finite map from free-variable names to terms.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const std::string, Term>> init) : map_(init) {}

  void bind(const std::string& name, Term t) { map_[name] = std::move(t); }
  const Term* find(const std::string& name) const {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : &it->second;
  }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<std::string, Term>& bindings() const { return map_; }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  friend bool operator==(const Substitution& a, const Substitution& b) { return a.map_ == b.map_; }

 private:
  std::map<std::string, Term> map_;
};

/// Replaces free variables homomorphically. Substituted terms carry no loose
/// bound indices, so no capture is possible in the locally nameless form.
inline Term apply_subst(const Substitution& s, const Term& t) {
  if (s.empty() || !t.has_free_vars()) return t;
  switch (t.kind()) {
    case TermKind::FVar:
      if (const Term* r = s.find(t.name())) return *r;
      return t;
    case TermKind::App: {
      Term f = apply_subst(s, t.fun());
      Term a = apply_subst(s, t.arg());
      if (f.raw() == t.fun().raw() && a.raw() == t.arg().raw()) return t;
      return Term::app(std::move(f), std::move(a));
    }
    case TermKind::Lam:
      return Term::lam(t.name(), t.binder_type(), apply_subst(s, t.body()));
    case TermKind::Fix:
      return Term::fix(t.name(), t.binder_type(), apply_subst(s, t.body()));
    default:
      return t;
  }
}

/// Replaces constants by name (used to turn eigenvariables back into
/// variables, or to rename them).
inline Term replace_constant(const Term& t, const std::string& name, const Term& by) {
  switch (t.kind()) {
    case TermKind::Const:
      return t.name() == name ? by : t;
    case TermKind::App:
      return Term::app(replace_constant(t.fun(), name, by), replace_constant(t.arg(), name, by));
    case TermKind::Lam:
      return Term::lam(t.name(), t.binder_type(), replace_constant(t.body(), name, by));
    case TermKind::Fix:
      return Term::fix(t.name(), t.binder_type(), replace_constant(t.body(), name, by));
    default:
      return t;
  }
}

// ---------------------------------------------------------------------------
// Type checking

enum class TypeErrorCode { TypeMismatch, UnboundName };

class TypeError : public std::runtime_error {
 public:
  TypeError(TypeErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  TypeErrorCode code() const { return code_; }

 private:
  TypeErrorCode code_;
};

using TypeContext = std::map<std::string, SimpleType>;

namespace detail {
inline SimpleType typecheck_in(const Signature& sig, const TypeContext& ctx, std::vector<SimpleType>& bound,
                               const Term& t) {
  const SimpleType o = SimpleType::formula();
  switch (t.kind()) {
    case TermKind::BVar:
      if (t.index() >= bound.size()) throw TypeError(TypeErrorCode::UnboundName, "dangling bound index");
      return bound[bound.size() - 1 - t.index()];
    case TermKind::FVar: {
      auto it = ctx.find(t.name());
      if (it == ctx.end()) throw TypeError(TypeErrorCode::UnboundName, "unbound variable '" + t.name() + "'");
      return it->second;
    }
    case TermKind::Const: {
      const std::string& n = t.name();
      if (n == "true") return o;
      if (n == "&" || n == ";" || n == "=>") return SimpleType::arrow(o, SimpleType::arrow(o, o));
      if (n == "forall" || n == "exists")
        throw TypeError(TypeErrorCode::TypeMismatch, "quantifier '" + n + "' must be applied to an abstraction");
      auto ty = sig.lookup(n);
      if (!ty) throw TypeError(TypeErrorCode::UnboundName, "unknown constant '" + n + "'");
      return *ty;
    }
    case TermKind::App: {
      const Term& f = t.fun();
      if (f.is(TermKind::Const) && (f.name() == "forall" || f.name() == "exists")) {
        if (!t.arg().is(TermKind::Lam))
          throw TypeError(TypeErrorCode::TypeMismatch, "quantifier body must be an abstraction");
        SimpleType bt = typecheck_in(sig, ctx, bound, t.arg());
        if (bt.codomain() != o) throw TypeError(TypeErrorCode::TypeMismatch, "quantifier body must have type o");
        return o;
      }
      SimpleType ft = typecheck_in(sig, ctx, bound, f);
      if (!ft.is_arrow())
        throw TypeError(TypeErrorCode::TypeMismatch, "application head has non-arrow type " + ft.to_string());
      SimpleType at = typecheck_in(sig, ctx, bound, t.arg());
      if (at != ft.domain())
        throw TypeError(TypeErrorCode::TypeMismatch,
                        "argument type " + at.to_string() + " differs from " + ft.domain().to_string());
      return ft.codomain();
    }
    case TermKind::Lam: {
      bound.push_back(t.binder_type());
      SimpleType bt = typecheck_in(sig, ctx, bound, t.body());
      bound.pop_back();
      return SimpleType::arrow(t.binder_type(), bt);
    }
    case TermKind::Fix: {
      bound.push_back(t.binder_type());
      SimpleType bt = typecheck_in(sig, ctx, bound, t.body());
      bound.pop_back();
      if (bt != t.binder_type())
        throw TypeError(TypeErrorCode::TypeMismatch, "fixpoint body has type " + bt.to_string() +
                                                         ", binder has " + t.binder_type().to_string());
      return bt;
    }
  }
  throw TypeError(TypeErrorCode::TypeMismatch, "malformed term");
}
}  // namespace detail

/// Type of `t` under Σ and a context for its free variables. `bound` gives
/// the types of loose bound indices (innermost last).
inline SimpleType typecheck(const Signature& sig, const TypeContext& ctx, const Term& t,
                            std::vector<SimpleType> bound = {}) {
  return detail::typecheck_in(sig, ctx, bound, t);
}

// ---------------------------------------------------------------------------
// Guardedness

namespace detail {
// `var` is the de Bruijn index of the recursion variable at the current depth.
inline bool guarded_walk(const Term& t, std::uint32_t var, bool under_constructor) {
  if (t.loose_bound() <= var) return true;  // no occurrence below
  switch (t.kind()) {
    case TermKind::BVar:
      return t.index() != var || under_constructor;
    case TermKind::App: {
      const Term& h = t.head();
      bool guards = h.is(TermKind::Const) && !is_logical_symbol(h.name());
      if (h.is(TermKind::BVar) && h.index() == var && !under_constructor) return false;
      if (!h.is(TermKind::BVar) && !guarded_walk(h, var, under_constructor)) return false;
      for (const auto& a : t.args())
        if (!guarded_walk(a, var, under_constructor || guards)) return false;
      return true;
    }
    case TermKind::Lam:
    case TermKind::Fix:
      return guarded_walk(t.body(), var + 1, under_constructor);
    default:
      return true;
  }
}
}  // namespace detail

/// Every occurrence of the fix-bound variable in the β-normal body, below its
/// λ-prefix, sits strictly inside an argument of a non-logical constant.
inline bool check_guarded(const Term& fix) {
  if (!fix.is(TermKind::Fix)) return false;
  Term body = beta_normalize(fix.body());
  std::uint32_t var = 0;
  while (body.is(TermKind::Lam)) {
    body = body.body();
    ++var;
  }
  return detail::guarded_walk(body, var, false);
}

/// True when every Fix subterm of `t` is guarded.
inline bool all_fix_guarded(const Term& t) {
  if (!t.has_fix()) return true;
  switch (t.kind()) {
    case TermKind::App:
      return all_fix_guarded(t.fun()) && all_fix_guarded(t.arg());
    case TermKind::Lam:
      return all_fix_guarded(t.body());
    case TermKind::Fix:
      return check_guarded(t) && all_fix_guarded(t.body());
    default:
      return true;
  }
}

}  // namespace coup
