#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coup/term.hpp"
#include "coup/types.hpp"

namespace coup {

enum class FormulaKind { Atom, Top, And, Or, Implies, Forall, Exists };

/// A formula is a β-normal term of type o. This wrapper exposes its logical
/// structure; quantifiers are `forall (λx:T. body)` applications.
class Formula {
 public:
  Formula() = default;
  explicit Formula(Term t) : term_(std::move(t)) {}

  static Formula atom(Term t) { return Formula(std::move(t)); }
  static Formula top() { return Formula(Term::constant("true")); }
  static Formula conj(const Formula& l, const Formula& r) { return binary("&", l, r); }
  static Formula disj(const Formula& l, const Formula& r) { return binary(";", l, r); }
  static Formula implies(const Formula& l, const Formula& r) { return binary("=>", l, r); }
  /// Binds free variable `var` of `body`.
  static Formula forall(const std::string& var, const SimpleType& type, const Formula& body) {
    return quant("forall", var, type, body);
  }
  static Formula exists(const std::string& var, const SimpleType& type, const Formula& body) {
    return quant("exists", var, type, body);
  }

  const Term& term() const { return term_; }
  bool valid() const { return term_.valid(); }

  FormulaKind kind() const {
    const Term& h = term_.head();
    if (h.is(TermKind::Const)) {
      const std::string& n = h.name();
      std::size_t nargs = term_.args().size();
      if (n == "true" && nargs == 0) return FormulaKind::Top;
      if (n == "&" && nargs == 2) return FormulaKind::And;
      if (n == ";" && nargs == 2) return FormulaKind::Or;
      if (n == "=>" && nargs == 2) return FormulaKind::Implies;
      if (n == "forall" && nargs == 1) return FormulaKind::Forall;
      if (n == "exists" && nargs == 1) return FormulaKind::Exists;
    }
    return FormulaKind::Atom;
  }
  bool is(FormulaKind k) const { return kind() == k; }

  Formula left() const { return Formula(term_.fun().arg()); }
  Formula right() const { return Formula(term_.arg()); }
  /// Binder of a quantifier.
  const std::string& binder_name() const { return term_.arg().name(); }
  const SimpleType& binder_type() const { return term_.arg().binder_type(); }
  /// Quantifier body with a loose bound index 0.
  Formula raw_body() const { return Formula(term_.arg().body()); }

  /// Body of a quantifier with the bound variable replaced by `t`.
  Formula instantiate(const Term& t) const {
    return Formula(beta_normalize(coup::instantiate(term_.arg().body(), t)));
  }

  friend bool operator==(const Formula& a, const Formula& b) { return a.term_ == b.term_; }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  static Formula binary(const char* op, const Formula& l, const Formula& r) {
    return Formula(Term::app(Term::app(Term::constant(op), l.term_), r.term_));
  }
  static Formula quant(const char* q, const std::string& var, const SimpleType& type, const Formula& body) {
    return Formula(Term::app(Term::constant(q), Term::lam(var, type, abstract_fvar(body.term_, var))));
  }

  Term term_;
};

inline bool is_closed(const Formula& f) { return !f.term().has_free_vars() && f.term().loose_bound() == 0; }

/// ∀-closes the given free variables, leftmost variable outermost.
inline Formula forall_close(Formula f, const std::vector<std::pair<std::string, SimpleType>>& vars) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = Formula::forall(it->first, it->second, f);
  return f;
}

// ---------------------------------------------------------------------------
// Fragments

enum class Fragment { CoFohc, CoFohh, CoHohc, CoHohh };

inline constexpr Fragment kAllFragments[] = {Fragment::CoFohc, Fragment::CoFohh, Fragment::CoHohc,
                                             Fragment::CoHohh};

inline bool is_first_order(Fragment f) { return f == Fragment::CoFohc || f == Fragment::CoFohh; }
inline bool is_harrop(Fragment f) { return f == Fragment::CoFohh || f == Fragment::CoHohh; }

/// The lattice: co-fohc below everything, co-hohh above everything, the two
/// middle fragments incomparable.
inline bool fragment_leq(Fragment a, Fragment b) {
  return a == b || a == Fragment::CoFohc || b == Fragment::CoHohh;
}

inline std::string fragment_name(Fragment f) {
  switch (f) {
    case Fragment::CoFohc:
      return "co-fohc";
    case Fragment::CoFohh:
      return "co-fohh";
    case Fragment::CoHohc:
      return "co-hohc";
    case Fragment::CoHohh:
      return "co-hohh";
  }
  return "?";
}
inline std::optional<Fragment> parse_fragment(const std::string& s) {
  for (Fragment f : kAllFragments)
    if (fragment_name(f) == s) return f;
  return std::nullopt;
}

/// A fragment plus the orthogonal fixpoint-term capability.
struct Logic {
  Fragment fragment = Fragment::CoFohc;
  bool allow_fix = false;

  std::string name() const { return fragment_name(fragment) + (allow_fix ? "+fix" : ""); }
  friend bool operator==(const Logic&, const Logic&) = default;
};

// ---------------------------------------------------------------------------
// Term universes

enum class Universe { U1, U2, Unrestricted };

inline bool contains_constant(const Term& t, const char* name) { return mentions_constant(t, name); }

/// U1: no ∀ and no ⊃ anywhere; U2: no ⊃.
inline bool universe_check(const Term& t, Universe u) {
  switch (u) {
    case Universe::U1:
      return !contains_constant(t, "forall") && !contains_constant(t, "=>");
    case Universe::U2:
      return !contains_constant(t, "=>");
    case Universe::Unrestricted:
      return true;
  }
  return false;
}

inline Universe tightest_universe(const Term& t) {
  if (universe_check(t, Universe::U1)) return Universe::U1;
  if (universe_check(t, Universe::U2)) return Universe::U2;
  return Universe::Unrestricted;
}

// ---------------------------------------------------------------------------
// Atom classification

struct AtomClass {
  bool rigid = false;
  bool first_order = false;
  Universe universe = Universe::Unrestricted;
};

class NotAnAtom : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Types of loose bound indices (innermost last) and of free variables, as
/// seen from a subformula.
struct Scope {
  const Signature* sig = nullptr;
  TypeContext free;
  std::vector<SimpleType> bound;

  SimpleType type_of(const Term& t) const { return typecheck(*sig, free, t, bound); }
  Scope under(const SimpleType& binder) const {
    Scope s = *this;
    s.bound.push_back(binder);
    return s;
  }
};

namespace detail {

inline std::optional<SimpleType> head_type(const Scope& sc, const Term& h) {
  try {
    return sc.type_of(h);
  } catch (const TypeError&) {
    return std::nullopt;
  }
}

// First-order individual term: constants and individual variables applied
// first-order, no λ and no logical symbols. With `allow_fix`, a Fix of
// individual type whose body is itself first-order is also admitted.
inline bool first_order_term(const Scope& sc, const Term& t, bool allow_fix) {
  if (t.is(TermKind::Lam)) return false;
  if (t.is(TermKind::Fix)) {
    if (!allow_fix || !t.binder_type().is_individual()) return false;
    return first_order_term(sc.under(t.binder_type()), t.body(), allow_fix);
  }
  const Term& h = t.head();
  if (h.is(TermKind::Const) && is_logical_symbol(h.name())) return false;
  if (h.is(TermKind::Lam) || h.is(TermKind::Fix)) return false;
  auto ht = head_type(sc, h);
  if (!ht) return false;
  auto args = t.args();
  if (!args.empty() && !h.is(TermKind::Const)) return false;
  auto params = ht->arguments();
  if (params.size() != args.size() || !ht->target().is_individual()) return false;
  for (const auto& p : params)
    if (!p.is_individual()) return false;
  for (const auto& a : args)
    if (!first_order_term(sc, a, allow_fix)) return false;
  return true;
}

}  // namespace detail

inline bool is_rigid_atom(const Formula& f) {
  return f.is(FormulaKind::Atom) && f.term().head().is(TermKind::Const);
}

/// A¹: rigid atom over first-order individual arguments.
inline bool is_first_order_atom(const Scope& sc, const Formula& f, bool allow_fix) {
  if (!is_rigid_atom(f)) return false;
  auto ht = detail::head_type(sc, f.term().head());
  if (!ht) return false;
  for (const auto& p : ht->arguments())
    if (!p.is_individual()) return false;
  for (const auto& a : f.term().args())
    if (!detail::first_order_term(sc, a, allow_fix)) return false;
  return true;
}

inline AtomClass classify_atom(const Scope& sc, const Formula& f) {
  if (!f.is(FormulaKind::Atom)) throw NotAnAtom("formula is not atomic");
  AtomClass c;
  c.rigid = is_rigid_atom(f);
  c.first_order = is_first_order_atom(sc, f, false);
  c.universe = tightest_universe(f.term());
  return c;
}
inline AtomClass classify_atom(const Signature& sig, const Formula& f) {
  return classify_atom(Scope{&sig, {}, {}}, f);
}

// ---------------------------------------------------------------------------
// Grammars of program clauses (D), goals (G) and core formulae (M)

namespace detail {

enum class AtomRole { Clause, Goal };

inline bool atom_ok(const Logic& lg, const Scope& sc, const Formula& f, AtomRole role) {
  if (!lg.allow_fix && f.term().has_fix()) return false;
  if (!all_fix_guarded(f.term())) return false;
  if (is_first_order(lg.fragment)) return is_first_order_atom(sc, f, lg.allow_fix);
  Universe u = lg.fragment == Fragment::CoHohc ? Universe::U1 : Universe::U2;
  if (!universe_check(f.term(), u)) return false;
  if (role == AtomRole::Clause) return is_rigid_atom(f);
  const Term& h = f.term().head();
  return h.is(TermKind::Const) || h.is(TermKind::FVar) || h.is(TermKind::BVar);
}

inline bool binder_ok(const Logic& lg, const SimpleType& t) {
  return is_first_order(lg.fragment) ? t.is_individual() : true;
}

inline bool goal(const Logic& lg, const Scope& sc, const Formula& f);

inline bool clause(const Logic& lg, const Scope& sc, const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      return atom_ok(lg, sc, f, AtomRole::Clause);
    case FormulaKind::Implies:
      return goal(lg, sc, f.left()) && clause(lg, sc, f.right());
    case FormulaKind::And:
      return clause(lg, sc, f.left()) && clause(lg, sc, f.right());
    case FormulaKind::Forall:
      return binder_ok(lg, f.binder_type()) && clause(lg, sc.under(f.binder_type()), f.raw_body());
    default:
      return false;
  }
}

inline bool goal(const Logic& lg, const Scope& sc, const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Top:
      return true;
    case FormulaKind::Atom:
      return atom_ok(lg, sc, f, AtomRole::Goal);
    case FormulaKind::And:
    case FormulaKind::Or:
      return goal(lg, sc, f.left()) && goal(lg, sc, f.right());
    case FormulaKind::Exists:
      return binder_ok(lg, f.binder_type()) && goal(lg, sc.under(f.binder_type()), f.raw_body());
    case FormulaKind::Implies:
      return is_harrop(lg.fragment) && clause(lg, sc, f.left()) && goal(lg, sc, f.right());
    case FormulaKind::Forall:
      return is_harrop(lg.fragment) && binder_ok(lg, f.binder_type()) &&
             goal(lg, sc.under(f.binder_type()), f.raw_body());
  }
  return false;
}

inline bool core(const Logic& lg, const Scope& sc, const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      return atom_ok(lg, sc, f, AtomRole::Clause);
    case FormulaKind::And:
      return core(lg, sc, f.left()) && core(lg, sc, f.right());
    case FormulaKind::Implies:
      return is_harrop(lg.fragment) && core(lg, sc, f.left()) && core(lg, sc, f.right());
    case FormulaKind::Forall:
      return is_harrop(lg.fragment) && binder_ok(lg, f.binder_type()) &&
             core(lg, sc.under(f.binder_type()), f.raw_body());
    default:
      return false;
  }
}

}  // namespace detail

inline bool is_program_clause(const Logic& lg, const Scope& sc, const Formula& f) { return detail::clause(lg, sc, f); }
inline bool is_goal(const Logic& lg, const Scope& sc, const Formula& f) { return detail::goal(lg, sc, f); }
inline bool is_core(const Logic& lg, const Scope& sc, const Formula& f) { return detail::core(lg, sc, f); }

inline bool is_program_clause(const Logic& lg, const Signature& sig, const Formula& f) {
  return is_program_clause(lg, Scope{&sig, {}, {}}, f);
}
inline bool is_goal(const Logic& lg, const Signature& sig, const Formula& f) {
  return is_goal(lg, Scope{&sig, {}, {}}, f);
}
inline bool is_core(const Logic& lg, const Signature& sig, const Formula& f) {
  return is_core(lg, Scope{&sig, {}, {}}, f);
}

/// First fragment (in lattice order, bottom first) whose core grammar admits `f`.
inline std::optional<Fragment> minimal_core_fragment(const Signature& sig, const Formula& f, bool allow_fix) {
  for (Fragment fr : kAllFragments)
    if (is_core(Logic{fr, allow_fix}, sig, f)) return fr;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Programs

struct Definition {
  std::string name;
  SimpleType type;
  Term body;
};

/// Σ with the program clauses in source order and registered lemmas.
struct Program {
  Signature sig;
  Logic logic;
  std::vector<Formula> clauses;
  std::vector<Formula> lemmas;
  /// Named abbreviations, used only for printing.
  std::vector<Definition> definitions;
};

}  // namespace coup
