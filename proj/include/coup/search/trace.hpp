#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coup/formula.hpp"
#include "coup/unify.hpp"

namespace coup {

class FlexibleGoalHead : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One resolution step. `goals` is the goal list before the step, with the
/// bindings known at that point applied; `head` is the renamed clause head
/// and `subst` the bindings after unifying it with `selected`.
struct TraceStep {
  std::vector<Formula> goals;
  Term selected;
  std::optional<std::size_t> clause;
  Term head;
  Substitution subst;
  std::vector<Term> introduced;
};

enum class TraceVerdict { LoopFound, BudgetExhausted, FiniteSuccess, FiniteFailure };

inline const char* verdict_name(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::LoopFound:
      return "LoopFound";
    case TraceVerdict::BudgetExhausted:
      return "BudgetExhausted";
    case TraceVerdict::FiniteSuccess:
      return "FiniteSuccess";
    case TraceVerdict::FiniteFailure:
      return "FiniteFailure";
  }
  return "?";
}

struct DerivationTrace {
  std::vector<TraceStep> steps;
  TraceVerdict verdict = TraceVerdict::BudgetExhausted;
  /// LoopFound: the ancestor's step and the step whose atom unified with it.
  std::size_t loop_from = 0, loop_to = 0;
  /// LoopFound: the recurring atom with the loop's unifier applied.
  Term loop_atom;
  /// Existential variables of the query, in order, and every variable's type.
  std::vector<std::string> query_vars;
  TypeContext var_types;
  Substitution answer;
};

namespace detail {

/// A Horn clause ∀x̄ (body ⊃ head) flattened from a program formula.
struct HornClause {
  std::size_t index;
  std::vector<std::pair<std::string, SimpleType>> vars;
  Term head;
  std::vector<Term> body;
};

class VarSupply {
 public:
  std::string fresh(const std::string& hint) {
    std::string base;
    for (char c : hint)
      if (std::isalnum(static_cast<unsigned char>(c))) base += c;
    while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
    if (base.empty() || !std::isalpha(static_cast<unsigned char>(base[0]))) base = "x";
    return "_" + base + std::to_string(++counter_);
  }

 private:
  std::size_t counter_ = 0;
};

// Opens ∃ and splits ∧ into atoms; `true` vanishes. Returns false on other shapes.
inline bool flatten_goal(const Formula& g, std::vector<Term>& atoms, VarSupply& vs, TypeContext& types,
                         std::vector<std::string>* opened = nullptr) {
  switch (g.kind()) {
    case FormulaKind::Top:
      return true;
    case FormulaKind::Atom:
      atoms.push_back(g.term());
      return true;
    case FormulaKind::And:
      return flatten_goal(g.left(), atoms, vs, types, opened) && flatten_goal(g.right(), atoms, vs, types, opened);
    case FormulaKind::Exists: {
      std::string v = vs.fresh(g.binder_name());
      types[v] = g.binder_type();
      if (opened) opened->push_back(v);
      return flatten_goal(g.instantiate(Term::fvar(v)), atoms, vs, types, opened);
    }
    default:
      return false;
  }
}

// Each conjunct of a clause, renamed apart, in source order.
inline void horn_instances(std::size_t index, const Formula& d, VarSupply& vs, TypeContext& types,
                           std::vector<std::pair<std::string, SimpleType>> vars, std::vector<HornClause>& out) {
  switch (d.kind()) {
    case FormulaKind::Forall: {
      std::string v = vs.fresh(d.binder_name());
      types[v] = d.binder_type();
      vars.emplace_back(v, d.binder_type());
      horn_instances(index, d.instantiate(Term::fvar(v)), vs, types, vars, out);
      return;
    }
    case FormulaKind::And:
      horn_instances(index, d.left(), vs, types, vars, out);
      horn_instances(index, d.right(), vs, types, vars, out);
      return;
    case FormulaKind::Implies: {
      if (!d.right().is(FormulaKind::Atom)) return;
      std::vector<Term> body;
      if (!flatten_goal(d.left(), body, vs, types)) return;
      out.push_back({index, vars, d.right().term(), body});
      return;
    }
    case FormulaKind::Atom:
      out.push_back({index, vars, d.term(), {}});
      return;
    default:
      return;
  }
}

inline bool same_predicate(const Term& a, const Term& b) {
  const Term &ha = a.head(), &hb = b.head();
  return ha.is(TermKind::Const) && hb.is(TermKind::Const) && ha.name() == hb.name();
}

}  // namespace detail

/// Leftmost SLD resolution with rational-tree unification, first matching
/// clause in source order, no backtracking. Stops with LoopFound when a
/// selected atom unifies with one of its same-predicate ancestors.
inline DerivationTrace sld_trace(const Program& p, const Formula& goal, std::size_t trace_limit,
                                 std::size_t unfold_budget = kDefaultUnfoldBudget) {
  DerivationTrace tr;
  detail::VarSupply vs;
  std::vector<Term> initial;
  if (!detail::flatten_goal(goal, initial, vs, tr.var_types, &tr.query_vars))
    throw std::invalid_argument("trace goals must be conjunctions of atoms under ∃");
  for (const auto& fv : free_vars(goal.term()))
    if (!tr.var_types.count(fv)) tr.query_vars.push_back(fv);

  struct Pending {
    Term atom;
    std::vector<std::size_t> ancestors;  // indices into `selected_at`
  };
  std::vector<Pending> goals;
  for (const auto& a : initial) goals.push_back({a, {}});
  std::vector<std::pair<Term, std::size_t>> selected_at;  // atom (unresolved), step

  RationalUnifier u(tr.var_types, unfold_budget);
  auto goal_list = [&]() {
    std::vector<Formula> out;
    for (const auto& g : goals) out.emplace_back(u.resolve_term(g.atom));
    return out;
  };

  for (std::size_t step = 0;; ++step) {
    if (goals.empty()) {
      tr.verdict = TraceVerdict::FiniteSuccess;
      break;
    }
    if (step >= trace_limit) {
      tr.verdict = TraceVerdict::BudgetExhausted;
      break;
    }
    Pending sel = goals.front();
    Term atom = u.resolve_term(sel.atom);
    if (!atom.head().is(TermKind::Const)) throw FlexibleGoalHead("selected goal has a flexible head");
    TraceStep ts;
    ts.goals = goal_list();
    ts.selected = atom;

    // CoLP ancestor test, nearest ancestor first.
    bool looped = false;
    for (auto it = sel.ancestors.rbegin(); it != sel.ancestors.rend() && !looped; ++it) {
      const auto& [anc, anc_step] = selected_at[*it];
      if (!detail::same_predicate(anc, atom)) continue;
      std::size_t m = u.mark();
      if (u.unify(anc, sel.atom) == UnifyResult::Status::Unified) {
        tr.verdict = TraceVerdict::LoopFound;
        tr.loop_from = anc_step;
        tr.loop_to = step;
        tr.loop_atom = beta_normalize(u.resolve_term(sel.atom));
        looped = true;
      } else {
        u.undo(m);
      }
    }
    if (looped) {
      tr.steps.push_back(ts);
      break;
    }

    std::vector<detail::HornClause> instances;
    for (std::size_t i = 0; i < p.clauses.size(); ++i) {
      // Rename apart on every attempt so that failed attempts leave no trace.
      detail::horn_instances(i, p.clauses[i], vs, tr.var_types, {}, instances);
    }
    bool resolved = false;
    for (const auto& hc : instances) {
      if (!detail::same_predicate(hc.head, atom)) continue;
      for (const auto& [v, t] : hc.vars) u.declare(v, t);
      std::size_t m = u.mark();
      if (u.unify(hc.head, sel.atom) != UnifyResult::Status::Unified) {
        u.undo(m);
        continue;
      }
      ts.clause = hc.index;
      ts.head = hc.head;
      Substitution all = u.solved();
      std::set<std::string> relevant = free_vars(hc.head);
      for (const auto& v : free_vars(sel.atom)) relevant.insert(v);
      for (const auto& [v, t] : all)
        if (relevant.count(v)) ts.subst.bind(v, t);
      for (const auto& b : hc.body) ts.introduced.push_back(beta_normalize(u.resolve_term(b)));

      std::size_t me = selected_at.size();
      selected_at.emplace_back(sel.atom, step);
      std::vector<Pending> next;
      auto anc = sel.ancestors;
      anc.push_back(me);
      for (const auto& b : hc.body) next.push_back({b, anc});
      next.insert(next.end(), goals.begin() + 1, goals.end());
      goals = std::move(next);
      resolved = true;
      break;
    }
    tr.steps.push_back(ts);
    if (!resolved) {
      tr.verdict = TraceVerdict::FiniteFailure;
      break;
    }
  }
  Substitution all = u.solved();
  for (const auto& v : tr.query_vars)
    if (const Term* t = all.find(v)) tr.answer.bind(v, *t);
  return tr;
}

inline DerivationTrace sld_trace(const Program& p, const Formula& goal) { return sld_trace(p, goal, 32); }

}  // namespace coup
