#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coup/fixbeta.hpp"
#include "coup/formula.hpp"
#include "coup/proof.hpp"

namespace coup {

enum class CheckError {
  BadRuleInstance,
  CoFixNotAtRoot,
  NonCoreCoinductiveGoal,
  GuardViolation,
  EigenvariableCapture,
  WitnessNotClosed,
  WitnessUniverseViolation,
  FragmentViolation,
  FixBetaBudgetExhausted,
};

inline const char* error_name(CheckError e) {
  switch (e) {
    case CheckError::BadRuleInstance:
      return "BadRuleInstance";
    case CheckError::CoFixNotAtRoot:
      return "CoFixNotAtRoot";
    case CheckError::NonCoreCoinductiveGoal:
      return "NonCoreCoinductiveGoal";
    case CheckError::GuardViolation:
      return "GuardViolation";
    case CheckError::EigenvariableCapture:
      return "EigenvariableCapture";
    case CheckError::WitnessNotClosed:
      return "WitnessNotClosed";
    case CheckError::WitnessUniverseViolation:
      return "WitnessUniverseViolation";
    case CheckError::FragmentViolation:
      return "FragmentViolation";
    case CheckError::FixBetaBudgetExhausted:
      return "FixBetaBudgetExhausted";
  }
  return "?";
}

struct RuleVerdict {
  std::optional<CheckError> error;
  std::string detail;
  std::size_t unfolds = 0;

  bool ok() const { return !error; }
  static RuleVerdict fail(CheckError e, std::string d) { return {e, std::move(d), 0}; }
};

struct CheckOptions {
  std::size_t unfold_budget = kDefaultUnfoldBudget;
};

struct CheckReport {
  struct Failure {
    std::vector<std::size_t> path;
    CheckError code;
    std::string detail;
  };
  bool accepted = false;
  std::optional<Failure> first_error;
  std::size_t nodes = 0;
  std::size_t fixbeta_budget_used = 0;
};

class KernelError : public std::runtime_error {
 public:
  KernelError(CheckError code, const std::string& what) : std::runtime_error(what), code_(code) {}
  CheckError code() const { return code_; }

 private:
  CheckError code_;
};

/// register_lemma was handed a certificate the kernel does not accept.
class RejectedCertificate : public KernelError {
 public:
  using KernelError::KernelError;
};

/// Σ;P ↬ M  becomes  Σ;P,⟨M⟩ ⟶ ⟨M⟩.
inline Sequent apply_cofix(const Logic& logic, const Signature& sig, const Sequent& root) {
  if (root.kind != SequentKind::Root) throw KernelError(CheckError::BadRuleInstance, "co-fix needs a ↬ sequent");
  if (!is_core(logic, root.signature(sig), root.goal.formula))
    throw KernelError(CheckError::NonCoreCoinductiveGoal, "coinductive goal is not a core formula");
  auto hyps = root.hyps;
  hyps.push_back({root.goal.formula, true});
  return Sequent::main(root.eigen, std::move(hyps), {root.goal.formula, true});
}

namespace detail {

class RuleChecker {
 public:
  RuleChecker(const Logic& logic, const Program& base, const CheckOptions& opts)
      : logic_(logic), base_(base), opts_(opts) {}

  RuleVerdict check(Rule rule, const Sequent& c, const std::vector<Sequent>& prem, const Payload& data) const {
    const RuleInfo& info = rule_info(rule);
    if (prem.size() != info.arity)
      return RuleVerdict::fail(CheckError::BadRuleInstance, std::string(info.label) + " has the wrong number of premises");
    if (!payload_shape_ok(info.payload, data))
      return RuleVerdict::fail(CheckError::BadRuleInstance, std::string(info.label) + " payload is malformed");

    if (rule == Rule::CoFix) return cofix(c, prem[0]);
    if (c.kind == SequentKind::Root)
      return RuleVerdict::fail(CheckError::BadRuleInstance, "a ↬ sequent can only be concluded by co-fix");

    bool left_rule = c.kind == SequentKind::Focused;
    bool expects_left = rule == Rule::Initial || rule == Rule::Initial_g || rule == Rule::ImpL ||
                        rule == Rule::ImpL_g || rule == Rule::AndL_left || rule == Rule::AndL_right ||
                        rule == Rule::AndL_left_g || rule == Rule::AndL_right_g || rule == Rule::ForallL ||
                        rule == Rule::ForallL_g;
    if (left_rule != expects_left)
      return RuleVerdict::fail(CheckError::BadRuleInstance, std::string(info.label) + " applied to the wrong sequent shape");
    if (c.goal.guarded != info.guarded)
      return RuleVerdict::fail(CheckError::GuardViolation,
                               info.guarded ? std::string(info.label) + " needs a guarded goal"
                                            : std::string(info.label) + " cannot reduce a guarded goal");

    const Formula& g = c.goal.formula;
    switch (rule) {
      case Rule::TopR:
        if (!g.is(FormulaKind::Top)) return bad("topR needs goal true");
        return {};
      case Rule::AndR:
      case Rule::AndR_g:
        if (!g.is(FormulaKind::And)) return bad("andR needs a conjunction");
        return expect(prem, {same_ctx_main(c, g.left(), info.guarded), same_ctx_main(c, g.right(), info.guarded)});
      case Rule::OrR_left:
      case Rule::OrR_right:
        if (!g.is(FormulaKind::Or)) return bad("orR needs a disjunction");
        return expect(prem, {same_ctx_main(c, rule == Rule::OrR_left ? g.left() : g.right(), false)});
      case Rule::ImpR:
      case Rule::ImpR_g: {
        if (!g.is(FormulaKind::Implies)) return bad("impR needs an implication");
        Sequent p = same_ctx_main(c, g.right(), info.guarded);
        p.hyps.push_back({g.left(), info.guarded});
        return expect(prem, {p});
      }
      case Rule::ForallR:
      case Rule::ForallR_g: {
        if (!g.is(FormulaKind::Forall)) return bad("forallR needs a universal goal");
        const auto& [name, type] = *data.eigen;
        if (type != g.binder_type()) return bad("eigenvariable type differs from the binder type");
        Signature sig = c.signature(base_.sig);
        if (sig.contains(name) || is_reserved_word(name))
          return RuleVerdict::fail(CheckError::EigenvariableCapture, "eigenvariable '" + name + "' is not fresh");
        Sequent p = same_ctx_main(c, g.instantiate(Term::constant(name)), info.guarded);
        p.eigen.push_back(*data.eigen);
        return expect(prem, {p});
      }
      case Rule::ExistsR: {
        if (!g.is(FormulaKind::Exists)) return bad("existsR needs an existential goal");
        if (auto v = witness(c, g.binder_type(), *data.witness); !v.ok()) return v;
        return expect(prem, {same_ctx_main(c, g.instantiate(*data.witness), false)});
      }
      case Rule::Decide:
      case Rule::Decide_g: {
        if (!g.is(FormulaKind::Atom)) return bad("decide needs an atomic goal");
        auto sel = select(c, *data.clause);
        if (!sel) return bad("decide selects a program entry that does not exist");
        if (sel->guarded)
          return RuleVerdict::fail(CheckError::GuardViolation, "decide selects a guarded formula");
        return expect(prem, {Sequent::focused(c.eigen, c.hyps, sel->formula, c.goal)});
      }
      case Rule::Initial:
      case Rule::Initial_g: {
        if (!c.focus.is(FormulaKind::Atom) || !g.is(FormulaKind::Atom)) return bad("initial needs atoms");
        auto v = fixbeta_equal(c.focus.term(), g.term(), opts_.unfold_budget);
        RuleVerdict out;
        out.unfolds = v.unfolds_used;
        if (v.exhausted()) {
          out.error = CheckError::FixBetaBudgetExhausted;
          out.detail = "fixβ comparison ran out of unfoldings";
        } else if (!v.equal()) {
          out.error = CheckError::BadRuleInstance;
          out.detail = "focused atom and goal are not fixβ-equal";
        }
        return out;
      }
      case Rule::ImpL: {
        if (!c.focus.is(FormulaKind::Implies)) return bad("impL needs an implication in focus");
        return expect(prem, {Sequent::focused(c.eigen, c.hyps, c.focus.right(), c.goal),
                             Sequent::main(c.eigen, c.hyps, {c.focus.left(), false})});
      }
      case Rule::ImpL_g: {
        if (!c.focus.is(FormulaKind::Implies)) return bad("impL<> needs an implication in focus");
        auto erased = erase_marks(c.hyps);
        std::vector<Sequent> want{Sequent::focused(c.eigen, erased, c.focus.right(), {g, false}),
                                  Sequent::main(c.eigen, erased, {c.focus.left(), false})};
        for (std::size_t i = 0; i < 2; ++i) {
          if (prem[i] == want[i]) continue;
          Sequent relaxed = prem[i];
          relaxed.hyps = erase_marks(relaxed.hyps);
          if (relaxed == want[i])
            return RuleVerdict::fail(CheckError::GuardViolation, "impL<> premises must erase every guard mark");
          return bad("premise " + std::to_string(i) + " of impL<> does not match");
        }
        return {};
      }
      case Rule::AndL_left:
      case Rule::AndL_right:
      case Rule::AndL_left_g:
      case Rule::AndL_right_g: {
        if (!c.focus.is(FormulaKind::And)) return bad("andL needs a conjunction in focus");
        bool left = rule == Rule::AndL_left || rule == Rule::AndL_left_g;
        return expect(prem, {Sequent::focused(c.eigen, c.hyps, left ? c.focus.left() : c.focus.right(), c.goal)});
      }
      case Rule::ForallL:
      case Rule::ForallL_g: {
        if (!c.focus.is(FormulaKind::Forall)) return bad("forallL needs a universal formula in focus");
        if (auto v = witness(c, c.focus.binder_type(), *data.witness); !v.ok()) return v;
        return expect(prem, {Sequent::focused(c.eigen, c.hyps, c.focus.instantiate(*data.witness), c.goal)});
      }
      case Rule::CoFix:
        break;
    }
    return bad("unhandled rule");
  }

  /// Fragment membership of every formula in a sequent.
  RuleVerdict fragment(const Sequent& s) const {
    Signature sig;
    try {
      sig = s.signature(base_.sig);
    } catch (const SignatureError& e) {
      return RuleVerdict::fail(CheckError::EigenvariableCapture, e.what());
    }
    for (const auto& h : s.hyps)
      if (!well_typed(sig, h.formula) || !is_program_clause(logic_, sig, h.formula))
        return RuleVerdict::fail(CheckError::FragmentViolation, "hypothesis is not a program clause of " + logic_.name());
    if (!well_typed(sig, s.goal.formula)) return RuleVerdict::fail(CheckError::FragmentViolation, "ill-typed goal");
    switch (s.kind) {
      case SequentKind::Root:
        if (!is_core(logic_, sig, s.goal.formula))
          return RuleVerdict::fail(CheckError::NonCoreCoinductiveGoal, "coinductive goal is not a core formula");
        break;
      case SequentKind::Main:
        if (s.goal.guarded ? !is_core(logic_, sig, s.goal.formula) : !is_goal(logic_, sig, s.goal.formula))
          return RuleVerdict::fail(CheckError::FragmentViolation, "goal is outside " + logic_.name());
        break;
      case SequentKind::Focused:
        if (!well_typed(sig, s.focus) || !is_program_clause(logic_, sig, s.focus))
          return RuleVerdict::fail(CheckError::FragmentViolation, "focused formula is outside " + logic_.name());
        if (!s.goal.formula.is(FormulaKind::Atom))
          return RuleVerdict::fail(CheckError::BadRuleInstance, "focused sequent needs an atomic goal");
        break;
    }
    return {};
  }

 private:
  static RuleVerdict bad(std::string d) { return RuleVerdict::fail(CheckError::BadRuleInstance, std::move(d)); }

  static bool well_typed(const Signature& sig, const Formula& f) {
    try {
      return typecheck(sig, {}, f.term()).is_formula();
    } catch (const TypeError&) {
      return false;
    }
  }

  static bool payload_shape_ok(PayloadKind k, const Payload& d) {
    bool w = d.witness.has_value(), e = d.eigen.has_value(), c = d.clause.has_value();
    switch (k) {
      case PayloadKind::None:
        return !w && !e && !c;
      case PayloadKind::Witness:
        return w && !e && !c;
      case PayloadKind::Eigenvariable:
        return !w && e && !c;
      case PayloadKind::ClauseSelection:
        return !w && !e && c;
    }
    return false;
  }

  static Sequent same_ctx_main(const Sequent& c, const Formula& goal, bool guarded) {
    return Sequent::main(c.eigen, c.hyps, {goal, guarded});
  }

  static RuleVerdict expect(const std::vector<Sequent>& got, const std::vector<Sequent>& want) {
    for (std::size_t i = 0; i < want.size(); ++i)
      if (!(got[i] == want[i])) return bad("premise " + std::to_string(i) + " does not match the rule");
    return {};
  }

  std::optional<MarkedFormula> select(const Sequent& c, const ClauseRef& ref) const {
    switch (ref.source) {
      case ClauseRef::Source::Clause:
        if (ref.index < base_.clauses.size()) return MarkedFormula{base_.clauses[ref.index], false};
        break;
      case ClauseRef::Source::Lemma:
        if (ref.index < base_.lemmas.size()) return MarkedFormula{base_.lemmas[ref.index], false};
        break;
      case ClauseRef::Source::Hyp:
        if (ref.index < c.hyps.size()) return c.hyps[ref.index];
        break;
    }
    return std::nullopt;
  }

  // ∃R / ∀L witness: closed over Σ, of the binder type, in the fragment's universe.
  RuleVerdict witness(const Sequent& c, const SimpleType& type, const Term& w) const {
    if (w.has_free_vars() || w.loose_bound() != 0)
      return RuleVerdict::fail(CheckError::WitnessNotClosed, "witness has free variables");
    Signature sig = c.signature(base_.sig);
    SimpleType wt;
    try {
      wt = typecheck(sig, {}, w);
    } catch (const TypeError& e) {
      if (e.code() == TypeErrorCode::UnboundName)
        return RuleVerdict::fail(CheckError::WitnessNotClosed, std::string("witness is not a term over Σ: ") + e.what());
      return bad(std::string("ill-typed witness: ") + e.what());
    }
    if (wt != type) return bad("witness type " + wt.to_string() + " differs from " + type.to_string());
    if (w.has_fix() && (!logic_.allow_fix || !all_fix_guarded(w)))
      return RuleVerdict::fail(CheckError::WitnessUniverseViolation, "witness uses fixpoint terms outside +fix");
    Scope sc{&sig, {}, {}};
    bool ok = true;
    switch (logic_.fragment) {
      case Fragment::CoFohc:
      case Fragment::CoFohh:
        ok = first_order_term(sc, w, logic_.allow_fix);
        break;
      case Fragment::CoHohc:
        ok = universe_check(w, Universe::U1);
        break;
      case Fragment::CoHohh:
        ok = universe_check(w, Universe::U2);
        break;
    }
    if (!ok) return RuleVerdict::fail(CheckError::WitnessUniverseViolation, "witness is outside the universe of " + logic_.name());
    return {};
  }

  RuleVerdict cofix(const Sequent& c, const Sequent& p) const {
    if (c.kind != SequentKind::Root) return RuleVerdict::fail(CheckError::CoFixNotAtRoot, "co-fix below the root");
    try {
      Sequent want = apply_cofix(logic_, base_.sig, c);
      if (!(p == want)) return bad("co-fix premise must add ⟨M⟩ to the program and guard the goal");
    } catch (const KernelError& e) {
      return RuleVerdict::fail(e.code(), e.what());
    }
    return {};
  }

  Logic logic_;
  const Program& base_;
  CheckOptions opts_;
};

}  // namespace detail

/// Validates one rule application given the conclusions of its premises.
inline RuleVerdict check_rule_instance(const Logic& logic, const Program& base, Rule rule, const Sequent& conclusion,
                                       const std::vector<Sequent>& premises, const Payload& payload,
                                       const CheckOptions& opts = {}) {
  return detail::RuleChecker(logic, base, opts).check(rule, conclusion, premises, payload);
}

namespace detail {
inline void check_tree(const RuleChecker& rc, const ProofNode& n, bool is_root, std::vector<std::size_t>& path,
                       CheckReport& rep) {
  if (rep.first_error) return;
  ++rep.nodes;
  auto fail = [&](const RuleVerdict& v) { rep.first_error = CheckReport::Failure{path, *v.error, v.detail}; };
  if (n.rule == Rule::CoFix && !is_root) {
    fail(RuleVerdict::fail(CheckError::CoFixNotAtRoot, "co-fix may only conclude the root"));
    return;
  }
  if (auto v = rc.fragment(n.conclusion); !v.ok()) return fail(v);
  std::vector<Sequent> prem;
  for (const auto& p : n.premises) prem.push_back(p.conclusion);
  RuleVerdict v = rc.check(n.rule, n.conclusion, prem, n.data);
  rep.fixbeta_budget_used += v.unfolds;
  if (!v.ok()) return fail(v);
  for (std::size_t i = 0; i < n.premises.size(); ++i) {
    path.push_back(i);
    check_tree(rc, n.premises[i], false, path, rep);
    path.pop_back();
    if (rep.first_error) return;
  }
}
}  // namespace detail

/// Checks a whole certificate. A coinductive proof has a ↬ root concluded by
/// co-fix; a tree rooted at an unguarded ⟶ sequent is checked as a plain
/// uniform proof (the shape of corollary certificates).
inline CheckReport check_proof(const Logic& logic, const Program& base, const ProofNode& tree,
                               const CheckOptions& opts = {}) {
  CheckReport rep;
  auto fail_root = [&](CheckError e, std::string d) {
    rep.first_error = CheckReport::Failure{{}, e, std::move(d)};
    return rep;
  };
  for (const auto& c : base.clauses)
    if (!is_closed(c) || !is_program_clause(logic, base.sig, c))
      return fail_root(CheckError::FragmentViolation, "program clause outside " + logic.name());
  for (const auto& l : base.lemmas)
    if (!is_closed(l) || !is_core(logic, base.sig, l))
      return fail_root(CheckError::FragmentViolation, "lemma is not a core formula of " + logic.name());

  const Sequent& root = tree.conclusion;
  if (root.kind == SequentKind::Root) {
    if (!root.eigen.empty() || !root.hyps.empty())
      return fail_root(CheckError::BadRuleInstance, "root sequent extends the program");
    if (tree.rule != Rule::CoFix) return fail_root(CheckError::BadRuleInstance, "a ↬ root must be concluded by co-fix");
  } else if (root.kind == SequentKind::Main) {
    if (root.goal.guarded) return fail_root(CheckError::GuardViolation, "plain proofs start from an unguarded goal");
    for (const auto& h : root.hyps)
      if (h.guarded) return fail_root(CheckError::GuardViolation, "plain proofs start without guarded hypotheses");
  } else {
    return fail_root(CheckError::BadRuleInstance, "a proof cannot start from a focused sequent");
  }

  detail::RuleChecker rc(logic, base, opts);
  std::vector<std::size_t> path;
  detail::check_tree(rc, tree, true, path, rep);
  rep.accepted = !rep.first_error;
  return rep;
}

/// Adds a proven core formula to the lemmas of `p`.
inline Program register_lemma(const Program& p, const Formula& proven_core, const ProofNode& certificate,
                              const CheckOptions& opts = {}) {
  if (certificate.conclusion.kind != SequentKind::Root || certificate.conclusion.goal.formula != proven_core)
    throw RejectedCertificate(CheckError::BadRuleInstance, "certificate proves a different formula");
  CheckReport rep = check_proof(p.logic, p, certificate, opts);
  if (!rep.accepted)
    throw RejectedCertificate(rep.first_error->code, rep.first_error->detail);
  Program out = p;
  out.lemmas.push_back(proven_core);
  return out;
}

}  // namespace coup
