#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coup/kernel.hpp"
#include "coup/search/candidates.hpp"
#include "coup/unify.hpp"

namespace coup {

struct SearchConfig {
  std::size_t depth_limit = 256;  // total rule applications
  std::size_t unfold_budget = kDefaultUnfoldBudget;
  std::size_t trace_limit = 32;
  std::vector<Provenance> heuristic_order{Provenance::Loop, Provenance::Generalize, Provenance::Conditional,
                                          Provenance::FixSynthesis};
};

struct SearchStats {
  std::size_t nodes_expanded = 0;
  double elapsed_ms = 0;
};

namespace detail {

// Predicates a program formula can conclude.
inline void clause_heads(const Formula& d, std::set<std::string>& out) {
  switch (d.kind()) {
    case FormulaKind::Atom:
      if (d.term().head().is(TermKind::Const)) out.insert(d.term().head().name());
      return;
    case FormulaKind::And:
      clause_heads(d.left(), out);
      clause_heads(d.right(), out);
      return;
    case FormulaKind::Implies:
      clause_heads(d.right(), out);
      return;
    case FormulaKind::Forall:
      clause_heads(d.raw_body(), out);
      return;
    default:
      return;
  }
}

/// Depth-bounded goal-directed search in continuation-passing style.
/// Witnesses start out as metavariables (free variables named `?N`), solved
/// by rational unification at initial steps; a metavariable may only be
/// instantiated with eigenvariables that were in scope when it was created.
class UniformSearch {
 public:
  UniformSearch(const Logic& logic, const Program& program, const SearchConfig& cfg)
      : logic_(logic), program_(program), cfg_(cfg), u_({}, cfg.unfold_budget) {}

  std::optional<ProofNode> run(const Sequent& start) {
    for (std::size_t bound = 1;; bound = std::min(bound < kStepwiseUpTo ? bound + 1 : 2 * bound, cfg_.depth_limit)) {
      reset();
      PNode root;
      bool found = false;
      K done = [&](std::size_t) { return finish(root); };
      if (start.kind == SequentKind::Root) {
        Sequent prem;
        try {
          prem = apply_cofix(logic_, program_.sig, start);
        } catch (const KernelError&) {
          return std::nullopt;
        }
        root.rule = Rule::CoFix;
        root.seq = start;
        root.prem.resize(1);
        ++expanded_;
        found = main(prem, root.prem[0], bound - 1, done);
      } else if (start.kind == SequentKind::Main) {
        found = main(start, root, bound, done);
      } else {
        return std::nullopt;
      }
      if (found) return result_;
      if (!cut_ || bound >= cfg_.depth_limit) break;  // !cut_: nothing was left unexplored
    }
    return std::nullopt;
  }

  std::size_t expanded() const { return expanded_; }

  static constexpr std::size_t kStepwiseUpTo = 32;

 private:
  struct PNode {
    Rule rule = Rule::TopR;
    Sequent seq;
    Payload data;
    std::vector<PNode> prem;
  };
  struct Meta {
    SimpleType type;
    std::map<std::string, SimpleType> allowed;
  };
  using K = std::function<bool(std::size_t)>;

  void reset() {
    u_ = RationalUnifier({}, cfg_.unfold_budget);
    metas_.clear();
    cut_ = false;
  }

  Term resolve(const Term& t) const { return beta_normalize(u_.resolve_term(t)); }
  Formula resolve(const Formula& f) const { return Formula(resolve(f.term())); }

  Term new_meta(const SimpleType& type, const std::vector<Eigenvariable>& eigen) {
    std::string name = "?m" + std::to_string(++meta_counter_);
    Meta m{type, {}};
    for (const auto& e : eigen) m.allowed.insert(e);
    metas_[name] = m;
    u_.declare(name, type);
    return Term::fvar(name);
  }

  std::string fresh_eigen(const std::string& hint, const Sequent& s) {
    std::string base;
    for (char c : hint)
      if (std::isalpha(static_cast<unsigned char>(c))) base += c;
    if (base.empty()) base = "x";
    base[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(base[0])));
    Signature sig = s.signature(program_.sig);
    auto taken = [&](const std::string& n) {
      if (sig.contains(n) || is_reserved_word(n)) return true;
      for (const auto& d : program_.definitions)
        if (d.name == n) return true;
      return false;
    };
    if (!taken(base)) return base;
    for (int i = 1;; ++i)
      if (!taken(base + std::to_string(i))) return base + std::to_string(i);
  }

  bool scope_ok() const {
    for (const auto& [name, m] : metas_) {
      if (!u_.is_bound(name)) continue;
      std::set<std::string> cs;
      collect_constants(u_.resolve_term(Term::fvar(name)), cs);
      for (const auto& c : cs)
        if (eigen_ever_.count(c) && !m.allowed.count(c)) return false;
    }
    return true;
  }

  bool main(const Sequent& s, PNode& out, std::size_t b, const K& k) {
    if (b == 0) {
      cut_ = true;
      return false;
    }
    ++expanded_;
    const bool g = s.goal.guarded;
    Formula goal = resolve(s.goal.formula);
    out.seq = s;
    out.data = {};
    out.prem.clear();
    switch (goal.kind()) {
      case FormulaKind::Top:
        if (g) return false;
        out.rule = Rule::TopR;
        return k(b - 1);
      case FormulaKind::And: {
        out.rule = g ? Rule::AndR_g : Rule::AndR;
        out.prem.resize(2);
        Sequent l = Sequent::main(s.eigen, s.hyps, {goal.left(), g});
        Sequent r = Sequent::main(s.eigen, s.hyps, {goal.right(), g});
        return main(l, out.prem[0], b - 1, [&](std::size_t b1) { return main(r, out.prem[1], b1, k); });
      }
      case FormulaKind::Or: {
        if (g) return false;
        out.prem.resize(1);
        out.rule = Rule::OrR_left;
        if (main(Sequent::main(s.eigen, s.hyps, {goal.left(), false}), out.prem[0], b - 1, k)) return true;
        out.rule = Rule::OrR_right;
        out.prem.assign(1, PNode{});
        return main(Sequent::main(s.eigen, s.hyps, {goal.right(), false}), out.prem[0], b - 1, k);
      }
      case FormulaKind::Implies: {
        out.rule = g ? Rule::ImpR_g : Rule::ImpR;
        auto hyps = s.hyps;
        hyps.push_back({goal.left(), g});
        out.prem.resize(1);
        return main(Sequent::main(s.eigen, hyps, {goal.right(), g}), out.prem[0], b - 1, k);
      }
      case FormulaKind::Forall: {
        out.rule = g ? Rule::ForallR_g : Rule::ForallR;
        std::string name = fresh_eigen(goal.binder_name(), s);
        eigen_ever_.insert(name);
        out.data.eigen = Eigenvariable{name, goal.binder_type()};
        auto eigen = s.eigen;
        eigen.emplace_back(name, goal.binder_type());
        out.prem.resize(1);
        return main(Sequent::main(eigen, s.hyps, {goal.instantiate(Term::constant(name)), g}), out.prem[0], b - 1, k);
      }
      case FormulaKind::Exists: {
        if (g) return false;
        out.rule = Rule::ExistsR;
        Term m = new_meta(goal.binder_type(), s.eigen);
        out.data.witness = m;
        out.prem.resize(1);
        return main(Sequent::main(s.eigen, s.hyps, {goal.instantiate(m), false}), out.prem[0], b - 1, k);
      }
      case FormulaKind::Atom:
        return decide(s, goal, out, b, k);
    }
    return false;
  }

  bool decide(const Sequent& s, const Formula& goal, PNode& out, std::size_t b, const K& k) {
    const Term& h = goal.term().head();
    if (!h.is(TermKind::Const)) return false;
    const bool g = s.goal.guarded;
    std::vector<std::pair<ClauseRef, Formula>> entries;
    for (std::size_t i = 0; i < program_.clauses.size(); ++i)
      entries.push_back({{ClauseRef::Source::Clause, i}, program_.clauses[i]});
    for (std::size_t i = 0; i < program_.lemmas.size(); ++i)
      entries.push_back({{ClauseRef::Source::Lemma, i}, program_.lemmas[i]});
    for (std::size_t i = 0; i < s.hyps.size(); ++i)
      if (!s.hyps[i].guarded) entries.push_back({{ClauseRef::Source::Hyp, i}, s.hyps[i].formula});
    for (const auto& [ref, d] : entries) {
      std::set<std::string> heads;
      clause_heads(d, heads);
      if (!heads.count(h.name())) continue;
      std::size_t m = u_.mark();
      out.rule = g ? Rule::Decide_g : Rule::Decide;
      out.seq = s;
      out.data = {};
      out.data.clause = ref;
      out.prem.assign(1, PNode{});
      if (focused(Sequent::focused(s.eigen, s.hyps, d, s.goal), out.prem[0], b - 1, k)) return true;
      u_.undo(m);
    }
    return false;
  }

  bool focused(const Sequent& s, PNode& out, std::size_t b, const K& k) {
    if (b == 0) {
      cut_ = true;
      return false;
    }
    ++expanded_;
    const bool g = s.goal.guarded;
    Formula d = resolve(s.focus);
    out.seq = s;
    out.data = {};
    out.prem.clear();
    switch (d.kind()) {
      case FormulaKind::Atom: {
        std::size_t m = u_.mark();
        out.rule = g ? Rule::Initial_g : Rule::Initial;
        if (u_.unify(d.term(), s.goal.formula.term()) == UnifyResult::Status::Unified && scope_ok() && k(b - 1))
          return true;
        u_.undo(m);
        return false;
      }
      case FormulaKind::And: {
        std::set<std::string> heads;
        const std::string want = resolve(s.goal.formula).term().head().name();
        for (int side = 0; side < 2; ++side) {
          Formula part = side == 0 ? d.left() : d.right();
          heads.clear();
          clause_heads(part, heads);
          if (!heads.count(want)) continue;
          out.rule = side == 0 ? (g ? Rule::AndL_left_g : Rule::AndL_left) : (g ? Rule::AndL_right_g : Rule::AndL_right);
          out.prem.assign(1, PNode{});
          if (focused(Sequent::focused(s.eigen, s.hyps, part, s.goal), out.prem[0], b - 1, k)) return true;
        }
        return false;
      }
      case FormulaKind::Forall: {
        out.rule = g ? Rule::ForallL_g : Rule::ForallL;
        Term m = new_meta(d.binder_type(), s.eigen);
        out.data.witness = m;
        out.prem.resize(1);
        return focused(Sequent::focused(s.eigen, s.hyps, d.instantiate(m), s.goal), out.prem[0], b - 1, k);
      }
      case FormulaKind::Implies: {
        out.prem.resize(2);
        if (g) {
          out.rule = Rule::ImpL_g;
          auto erased = erase_marks(s.hyps);
          Sequent f = Sequent::focused(s.eigen, erased, d.right(), {s.goal.formula, false});
          Sequent r = Sequent::main(s.eigen, erased, {d.left(), false});
          return focused(f, out.prem[0], b - 1, [&](std::size_t b1) { return main(r, out.prem[1], b1, k); });
        }
        out.rule = Rule::ImpL;
        Sequent f = Sequent::focused(s.eigen, s.hyps, d.right(), s.goal);
        Sequent r = Sequent::main(s.eigen, s.hyps, {d.left(), false});
        return focused(f, out.prem[0], b - 1, [&](std::size_t b1) { return main(r, out.prem[1], b1, k); });
      }
      default:
        return false;
    }
  }

  // Unconstrained metavariables become the first constant of their type that
  // is in scope.
  bool default_metas(const PNode& n) {
    std::vector<std::string> open;
    collect_open(n, open);
    for (const auto& v : open) {
      if (u_.is_bound(v)) continue;
      const Meta& m = metas_.at(v);
      std::optional<std::string> pick;
      for (const auto& [c, t] : program_.sig.constants())
        if (t == m.type) {
          pick = c;
          break;
        }
      if (!pick)
        for (const auto& [e, t] : m.allowed)
          if (t == m.type) {
            pick = e;
            break;
          }
      if (!pick) return false;
      if (u_.unify(Term::fvar(v), Term::constant(*pick)) != UnifyResult::Status::Unified) return false;
    }
    return true;
  }

  void collect_open(const PNode& n, std::vector<std::string>& out) const {
    auto add = [&](const Term& t) {
      std::set<std::string> fv;
      collect_fvars(resolve(t), fv);
      for (const auto& v : fv)
        if (metas_.count(v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (const auto& h : n.seq.hyps) add(h.formula.term());
    add(n.seq.goal.formula.term());
    if (n.seq.kind == SequentKind::Focused) add(n.seq.focus.term());
    if (n.data.witness) add(*n.data.witness);
    for (const auto& p : n.prem) collect_open(p, out);
  }

  Sequent resolve(const Sequent& s) const {
    Sequent r = s;
    for (auto& h : r.hyps) h.formula = resolve(h.formula);
    r.goal.formula = resolve(r.goal.formula);
    if (r.kind == SequentKind::Focused) r.focus = resolve(r.focus);
    return r;
  }

  ProofNode build(const PNode& n) const {
    ProofNode out;
    out.rule = n.rule;
    out.conclusion = resolve(n.seq);
    out.data = n.data;
    if (out.data.witness) out.data.witness = resolve(*out.data.witness);
    for (const auto& p : n.prem) out.premises.push_back(build(p));
    return out;
  }

  bool finish(const PNode& root) {
    std::size_t m = u_.mark();
    if (default_metas(root)) {
      ProofNode tree = build(root);
      CheckOptions opts;
      opts.unfold_budget = cfg_.unfold_budget;
      if (check_proof(logic_, program_, tree, opts).accepted) {
        result_ = std::move(tree);
        return true;
      }
    }
    u_.undo(m);
    return false;
  }

  Logic logic_;
  const Program& program_;
  SearchConfig cfg_;
  RationalUnifier u_;
  std::map<std::string, Meta> metas_;
  std::set<std::string> eigen_ever_;
  std::size_t meta_counter_ = 0;
  std::size_t expanded_ = 0;
  bool cut_ = false;
  ProofNode result_;
};

}  // namespace detail

/// Kernel-checked proof of a ↬ or ⟶ sequent within cfg.depth_limit rule
/// applications. The bound grows by one up to kStepwiseUpTo, so small proofs
/// come out minimal, and doubles after that.
inline std::optional<ProofNode> uniform_search(const Logic& logic, const Program& p, const Sequent& s,
                                               const SearchConfig& cfg = {}, SearchStats* stats = nullptr) {
  detail::UniformSearch us(logic, p, cfg);
  auto r = us.run(s);
  if (stats) stats->nodes_expanded += us.expanded();
  return r;
}

}  // namespace coup
