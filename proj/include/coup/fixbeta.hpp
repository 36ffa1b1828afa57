#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "coup/term.hpp"

namespace coup {

inline constexpr std::size_t kDefaultUnfoldBudget = 64;

struct EquivVerdict {
  enum class Kind { Equal, NotEqual, BudgetExhausted };
  Kind kind = Kind::NotEqual;
  std::size_t unfolds_used = 0;

  bool equal() const { return kind == Kind::Equal; }
  bool exhausted() const { return kind == Kind::BudgetExhausted; }
};

/// Counts Fix unfoldings per Fix node; shared by =_{fixβ} and unification.
class UnfoldBudget {
 public:
  explicit UnfoldBudget(std::size_t per_fix = kDefaultUnfoldBudget) : limit_(per_fix) {}

  /// Records one unfolding of `fix`; false when it would exceed the budget.
  bool take(const Term& fix) {
    std::size_t& n = counts_[term_key(fix)];
    if (n >= limit_) {
      exhausted_ = true;
      return false;
    }
    ++n;
    ++total_;
    return true;
  }
  bool exhausted() const { return exhausted_; }
  std::size_t total() const { return total_; }

 private:
  std::size_t limit_;
  std::map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
  bool exhausted_ = false;
};

/// β-normal form whose spine head is not a Fix node. Returns an invalid term
/// when the budget runs out.
inline Term head_normalize(const Term& t, UnfoldBudget& budget) {
  Term cur = beta_normalize(t);
  while (cur.head().is(TermKind::Fix)) {
    const Term& h = cur.head();
    if (!budget.take(h)) return Term();
    cur = beta_normalize(Term::apps(unfold_fix(h), cur.args()));
  }
  return cur;
}

namespace detail {

class Bisimulation {
 public:
  explicit Bisimulation(std::size_t budget) : budget_(budget) {}

  enum class R { Eq, Neq, Exhausted };

  R run(const Term& a, const Term& b) {
    if (a == b) return R::Eq;
    Term x = head_normalize(a, budget_);
    Term y = head_normalize(b, budget_);
    if (!x.valid() || !y.valid()) return R::Exhausted;
    if (x == y) return R::Eq;
    auto key = std::make_pair(term_key(x), term_key(y));
    if (!visited_.insert(key).second) return R::Eq;
    visited_.insert({key.second, key.first});

    if (x.is(TermKind::Lam) || y.is(TermKind::Lam)) {
      if (!x.is(TermKind::Lam) || !y.is(TermKind::Lam) || x.binder_type() != y.binder_type()) return R::Neq;
      return run(x.body(), y.body());
    }
    const Term& hx = x.head();
    const Term& hy = y.head();
    if (hx.kind() != hy.kind()) return R::Neq;
    switch (hx.kind()) {
      case TermKind::BVar:
        if (hx.index() != hy.index()) return R::Neq;
        break;
      case TermKind::FVar:
      case TermKind::Const:
        if (hx.name() != hy.name()) return R::Neq;
        break;
      default:
        // λ-headed spines cannot survive β-normalization.
        if (!(hx == hy)) return R::Neq;
    }
    auto ax = x.args();
    auto ay = y.args();
    if (ax.size() != ay.size()) return R::Neq;
    R result = R::Eq;
    for (std::size_t i = 0; i < ax.size(); ++i) {
      R r = run(ax[i], ay[i]);
      if (r == R::Neq) return R::Neq;
      if (r == R::Exhausted) result = R::Exhausted;
    }
    return result;
  }

  std::size_t used() const { return budget_.total(); }

 private:
  UnfoldBudget budget_;
  std::set<std::pair<std::string, std::string>> visited_;
};

}  // namespace detail

/// Equality of the (possibly infinite) trees denoted by two terms: β-normalize,
/// unfold Fix heads, and compare coinductively with a memo of visited pairs.
/// Exact on rational trees; reports BudgetExhausted instead of guessing.
inline EquivVerdict fixbeta_equal(const Term& t1, const Term& t2, std::size_t budget = kDefaultUnfoldBudget) {
  detail::Bisimulation bisim(budget);
  auto r = bisim.run(t1, t2);
  EquivVerdict v;
  v.unfolds_used = bisim.used();
  v.kind = r == detail::Bisimulation::R::Eq    ? EquivVerdict::Kind::Equal
           : r == detail::Bisimulation::R::Neq ? EquivVerdict::Kind::NotEqual
                                               : EquivVerdict::Kind::BudgetExhausted;
  return v;
}

}  // namespace coup
