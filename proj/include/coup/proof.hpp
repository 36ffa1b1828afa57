#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coup/formula.hpp"

namespace coup {

/// A program entry or goal, optionally carrying the ⟨⟩ guard mark.
struct MarkedFormula {
  Formula formula;
  bool guarded = false;

  friend bool operator==(const MarkedFormula&, const MarkedFormula&) = default;
};

using Eigenvariable = std::pair<std::string, SimpleType>;

enum class SequentKind {
  Root,     // Σ;P ↬ M
  Main,     // Σ;P ⟶ G
  Focused,  // Σ;P -[D]-> A
};

/// A sequent relative to a base program (clauses and lemmas). Only what the
/// proof adds on top of the base is stored: eigenvariables, in introduction
/// order, and hypotheses, in insertion order.
struct Sequent {
  SequentKind kind = SequentKind::Main;
  std::vector<Eigenvariable> eigen;
  std::vector<MarkedFormula> hyps;
  Formula focus;  // Focused only
  MarkedFormula goal;

  static Sequent root(Formula core) {
    Sequent s;
    s.kind = SequentKind::Root;
    s.goal = {std::move(core), false};
    return s;
  }
  static Sequent main(std::vector<Eigenvariable> eigen, std::vector<MarkedFormula> hyps, MarkedFormula goal) {
    Sequent s;
    s.kind = SequentKind::Main;
    s.eigen = std::move(eigen);
    s.hyps = std::move(hyps);
    s.goal = std::move(goal);
    return s;
  }
  static Sequent focused(std::vector<Eigenvariable> eigen, std::vector<MarkedFormula> hyps, Formula focus,
                         MarkedFormula goal) {
    Sequent s = main(std::move(eigen), std::move(hyps), std::move(goal));
    s.kind = SequentKind::Focused;
    s.focus = std::move(focus);
    return s;
  }

  /// Σ extended with this sequent's eigenvariables.
  Signature signature(const Signature& base) const {
    Signature s = base;
    for (const auto& [n, t] : eigen) s.add_constant(n, t);
    return s;
  }

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.kind == b.kind && a.eigen == b.eigen && a.hyps == b.hyps && a.goal == b.goal &&
           (a.kind != SequentKind::Focused || a.focus == b.focus);
  }
};

inline std::vector<MarkedFormula> erase_marks(std::vector<MarkedFormula> program) {
  for (auto& m : program) m.guarded = false;
  return program;
}

enum class Rule {
  TopR,
  AndR,
  OrR_left,
  OrR_right,
  ImpR,
  ForallR,
  ExistsR,
  Decide,
  Initial,
  ImpL,
  AndL_left,
  AndL_right,
  ForallL,
  CoFix,
  ImpR_g,
  ForallR_g,
  AndR_g,
  ImpL_g,
  AndL_left_g,
  AndL_right_g,
  ForallL_g,
  Decide_g,
  Initial_g,
};

enum class PayloadKind { None, Witness, Eigenvariable, ClauseSelection };

struct RuleInfo {
  Rule rule;
  const char* label;
  std::size_t arity;
  PayloadKind payload;
  bool guarded;
};

inline constexpr RuleInfo kRules[] = {
    {Rule::TopR, "topR", 0, PayloadKind::None, false},
    {Rule::AndR, "andR", 2, PayloadKind::None, false},
    {Rule::OrR_left, "orR1", 1, PayloadKind::None, false},
    {Rule::OrR_right, "orR2", 1, PayloadKind::None, false},
    {Rule::ImpR, "impR", 1, PayloadKind::None, false},
    {Rule::ForallR, "forallR", 1, PayloadKind::Eigenvariable, false},
    {Rule::ExistsR, "existsR", 1, PayloadKind::Witness, false},
    {Rule::Decide, "decide", 1, PayloadKind::ClauseSelection, false},
    {Rule::Initial, "initial", 0, PayloadKind::None, false},
    {Rule::ImpL, "impL", 2, PayloadKind::None, false},
    {Rule::AndL_left, "andL1", 1, PayloadKind::None, false},
    {Rule::AndL_right, "andL2", 1, PayloadKind::None, false},
    {Rule::ForallL, "forallL", 1, PayloadKind::Witness, false},
    {Rule::CoFix, "co-fix", 1, PayloadKind::None, false},
    {Rule::ImpR_g, "impR<>", 1, PayloadKind::None, true},
    {Rule::ForallR_g, "forallR<>", 1, PayloadKind::Eigenvariable, true},
    {Rule::AndR_g, "andR<>", 2, PayloadKind::None, true},
    {Rule::ImpL_g, "impL<>", 2, PayloadKind::None, true},
    {Rule::AndL_left_g, "andL1<>", 1, PayloadKind::None, true},
    {Rule::AndL_right_g, "andL2<>", 1, PayloadKind::None, true},
    {Rule::ForallL_g, "forallL<>", 1, PayloadKind::Witness, true},
    {Rule::Decide_g, "decide<>", 1, PayloadKind::ClauseSelection, true},
    {Rule::Initial_g, "initial<>", 0, PayloadKind::None, true},
};

inline const RuleInfo& rule_info(Rule r) {
  for (const auto& i : kRules)
    if (i.rule == r) return i;
  return kRules[0];
}
inline std::string rule_label(Rule r) { return rule_info(r).label; }
inline std::optional<Rule> rule_from_label(const std::string& s) {
  for (const auto& i : kRules)
    if (s == i.label) return i.rule;
  return std::nullopt;
}

/// Which program entry a decide step selects.
struct ClauseRef {
  enum class Source { Clause, Lemma, Hyp };
  Source source = Source::Clause;
  std::size_t index = 0;

  friend bool operator==(const ClauseRef&, const ClauseRef&) = default;
};

struct Payload {
  std::optional<Term> witness;
  std::optional<Eigenvariable> eigen;
  std::optional<ClauseRef> clause;

  friend bool operator==(const Payload& a, const Payload& b) {
    return a.witness == b.witness && a.eigen == b.eigen && a.clause == b.clause;
  }
};

/// One rule application of a certificate, with its conclusion and premises.
struct ProofNode {
  Rule rule = Rule::TopR;
  Sequent conclusion;
  std::vector<ProofNode> premises;
  Payload data;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& p : premises) n += p.size();
    return n;
  }
  friend bool operator==(const ProofNode& a, const ProofNode& b) {
    return a.rule == b.rule && a.conclusion == b.conclusion && a.premises == b.premises && a.data == b.data;
  }
};

/// Rules in pre-order (root first, left premise before right).
inline std::vector<Rule> rule_sequence(const ProofNode& n) {
  std::vector<Rule> out{n.rule};
  for (const auto& p : n.premises) {
    auto sub = rule_sequence(p);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

}  // namespace coup
