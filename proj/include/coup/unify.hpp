#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coup/fixbeta.hpp"
#include "coup/term.hpp"

namespace coup {

struct UnifyResult {
  enum class Status { Unified, Clash, FlexibleHead, BudgetExhausted };
  Status status = Status::Clash;
  Substitution subst;  // only meaningful when Unified

  explicit operator bool() const { return status == Status::Unified; }
};

/// Rational-tree unifier without occurs check. Bindings are accumulated
/// triangularly and may be cyclic; `solved()` materializes cycles as Fix terms.
class RationalUnifier {
 public:
  /// `types` gives the types of the free variables that may be bound; it is
  /// needed to annotate the binders of materialized cycles.
  explicit RationalUnifier(TypeContext types, std::size_t budget = kDefaultUnfoldBudget)
      : types_(std::move(types)), limit_(budget), budget_(budget) {}

  /// Starts from existing (idempotent) bindings.
  void seed(const Substitution& s) {
    for (const auto& [k, v] : s) bindings_[k] = v;
  }
  void declare(const std::string& var, const SimpleType& type) { types_[var] = type; }

  /// Each call gets a fresh unfold budget and memo. Bindings made by a failed
  /// call stay in place; use mark()/undo() to retract them.
  UnifyResult::Status unify(const Term& a, const Term& b) {
    visited_.clear();
    budget_ = UnfoldBudget(limit_);
    UnifyResult::Status st = go(a, b);
    if (st == UnifyResult::Status::Unified && budget_.exhausted()) return UnifyResult::Status::BudgetExhausted;
    return st;
  }

  bool is_bound(const std::string& v) const { return bindings_.count(v) != 0; }
  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t m) {
    while (trail_.size() > m) {
      bindings_.erase(trail_.back());
      trail_.pop_back();
    }
  }
  const std::map<std::string, Term>& raw_bindings() const { return bindings_; }

  /// Fully resolved substitution: every binding is free of bound variables.
  Substitution solved() const {
    Substitution out;
    for (const auto& [name, _] : bindings_) {
      std::set<std::string> in_progress{name};
      std::set<std::string> cyclic;
      Term body = resolve(bindings_.at(name), in_progress, cyclic);
      if (cyclic.count(name)) body = close_cycle(name, body);
      out.bind(name, body);
    }
    return out;
  }

  /// Applies the current bindings (with cycles materialized) to a term.
  Term resolve_term(const Term& t) const {
    std::set<std::string> in_progress, cyclic;
    return resolve(t, in_progress, cyclic);
  }

 private:
  static std::string placeholder(const std::string& v) { return "#cycle:" + v; }

  Term close_cycle(const std::string& v, const Term& body) const {
    auto it = types_.find(v);
    SimpleType ty = it == types_.end() ? SimpleType::base("?") : it->second;
    std::string hint = v;
    while (!hint.empty() && (hint[0] == '_' || hint[0] == '?')) hint.erase(0, 1);
    while (!hint.empty() && std::isdigit(static_cast<unsigned char>(hint.back()))) hint.pop_back();
    if (hint.empty() || !std::isalpha(static_cast<unsigned char>(hint[0]))) hint = "x";
    return Term::fix(hint, ty, abstract_fvar(body, placeholder(v)));
  }

  Term resolve(const Term& t, std::set<std::string>& in_progress, std::set<std::string>& cyclic) const {
    if (!t.has_free_vars()) return t;
    switch (t.kind()) {
      case TermKind::FVar: {
        auto it = bindings_.find(t.name());
        if (it == bindings_.end()) return t;
        if (in_progress.count(t.name())) {
          cyclic.insert(t.name());
          return Term::fvar(placeholder(t.name()));
        }
        in_progress.insert(t.name());
        std::set<std::string> inner;
        Term r = resolve(it->second, in_progress, inner);
        in_progress.erase(t.name());
        if (inner.count(t.name())) {
          r = close_cycle(t.name(), r);
          inner.erase(t.name());
        }
        cyclic.insert(inner.begin(), inner.end());
        return r;
      }
      case TermKind::App:
        return Term::app(resolve(t.fun(), in_progress, cyclic), resolve(t.arg(), in_progress, cyclic));
      case TermKind::Lam:
        return Term::lam(t.name(), t.binder_type(), resolve(t.body(), in_progress, cyclic));
      case TermKind::Fix:
        return Term::fix(t.name(), t.binder_type(), resolve(t.body(), in_progress, cyclic));
      default:
        return t;
    }
  }

  Term walk(Term t) const {
    while (t.is(TermKind::FVar)) {
      auto it = bindings_.find(t.name());
      if (it == bindings_.end()) break;
      t = it->second;
    }
    return t;
  }

  // Head-normal form with bound variable heads substituted.
  Term head_form(const Term& t) {
    Term cur = beta_normalize(walk(t));
    for (;;) {
      const Term& h = cur.head();
      if (h.is(TermKind::FVar) && bindings_.count(h.name()) && cur.is(TermKind::App)) {
        cur = beta_normalize(Term::apps(walk(h), cur.args()));
      } else if (h.is(TermKind::Fix)) {
        if (!budget_.take(h)) return Term();
        cur = beta_normalize(Term::apps(unfold_fix(h), cur.args()));
      } else {
        return walk(cur);
      }
    }
  }

  void bind(const std::string& v, const Term& t) {
    bindings_[v] = t;
    trail_.push_back(v);
  }

  UnifyResult::Status go(const Term& a0, const Term& b0) {
    using S = UnifyResult::Status;
    Term a = resolve_term(a0), b = resolve_term(b0);
    if (a == b) return S::Unified;
    if (a.is(TermKind::FVar)) {
      bind(a.name(), b);
      return S::Unified;
    }
    if (b.is(TermKind::FVar)) {
      bind(b.name(), a);
      return S::Unified;
    }
    auto key = std::make_pair(term_key(a), term_key(b));
    if (!visited_.insert(key).second) return S::Unified;

    Term x = head_form(a), y = head_form(b);
    if (!x.valid() || !y.valid()) return S::BudgetExhausted;
    if (x == y) return S::Unified;
    if (x.is(TermKind::FVar) || y.is(TermKind::FVar)) return go(x, y);
    if ((x.is(TermKind::App) && x.head().is(TermKind::FVar)) || (y.is(TermKind::App) && y.head().is(TermKind::FVar)))
      return S::FlexibleHead;
    if (x.is(TermKind::Lam) || y.is(TermKind::Lam)) {
      // No higher-order unification: abstractions must already coincide.
      return resolve_term(x) == resolve_term(y) ? S::Unified : S::Clash;
    }
    const Term& hx = x.head();
    const Term& hy = y.head();
    if (hx.kind() != hy.kind()) return S::Clash;
    if (hx.is(TermKind::BVar) ? hx.index() != hy.index() : hx.name() != hy.name()) return S::Clash;
    auto ax = x.args(), ay = y.args();
    if (ax.size() != ay.size()) return S::Clash;
    for (std::size_t i = 0; i < ax.size(); ++i) {
      S st = go(ax[i], ay[i]);
      if (st != S::Unified) return st;
    }
    return S::Unified;
  }

  TypeContext types_;
  std::size_t limit_;
  UnfoldBudget budget_;
  std::map<std::string, Term> bindings_;
  std::vector<std::string> trail_;
  std::set<std::pair<std::string, std::string>> visited_;
};

/// Most general rational-tree unifier of two first-order terms or atoms.
/// Cyclic solutions come back as guarded Fix terms.
inline UnifyResult unify_rational(const Term& a1, const Term& a2, const TypeContext& var_types = {},
                                  std::size_t budget = kDefaultUnfoldBudget) {
  RationalUnifier u(var_types, budget);
  UnifyResult r;
  r.status = u.unify(a1, a2);
  if (r.status == UnifyResult::Status::Unified) r.subst = u.solved();
  return r;
}

}  // namespace coup
