#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "coup/kernel.hpp"
#include "coup/search/candidates.hpp"
#include "coup/search/trace.hpp"
#include "coup/search/uniform.hpp"

namespace coup {

struct SearchResult {
  InvariantCandidate invariant;
  ProofNode invariant_proof;
  /// Absent when the goal is the invariant itself.
  std::optional<ProofNode> corollary_proof;
  /// The input program, run in the requested logic, with the invariant registered as a lemma.
  Program program;
  SearchStats stats;
};

struct ProveAttempt {
  InvariantCandidate candidate;
  bool invariant_proved = false;
  bool corollary_proved = false;
};

/// What prove() looked at, for diagnostics.
struct ProveLog {
  std::vector<DerivationTrace> traces;
  std::vector<ProveAttempt> attempts;
};

namespace detail {

// ∃y. P ... y ... for a ground atom whose arguments contain fixpoint terms,
// so that a trace can observe how those arguments unfold.
inline std::optional<Formula> abstract_fix_arguments(const Signature& sig, const Formula& goal) {
  if (!goal.is(FormulaKind::Atom) || goal.term().has_free_vars()) return std::nullopt;
  std::vector<Term> args = goal.term().args();
  Term atom = goal.term().head();
  std::vector<std::pair<std::string, SimpleType>> opened;
  for (const auto& a : args) {
    if (a.has_fix()) {
      std::string v = "#arg" + std::to_string(opened.size());
      opened.emplace_back(v, typecheck(sig, {}, a));
      atom = Term::app(atom, Term::fvar(v));
    } else {
      atom = Term::app(atom, a);
    }
  }
  if (opened.empty()) return std::nullopt;
  static const char* hints[] = {"y", "z", "w", "u", "v"};
  for (std::size_t i = opened.size(); i-- > 0;)
    atom = Term::app(Term::constant("exists"),
                     Term::lam(i < 5 ? hints[i] : "y", opened[i].second, abstract_fvar(atom, opened[i].first)));
  return Formula(atom);
}

inline std::optional<DerivationTrace> try_trace(const Program& p, const Formula& goal, const SearchConfig& cfg) {
  try {
    return sld_trace(p, goal, cfg.trace_limit, cfg.unfold_budget);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Tries the goal itself when it is a core formula, then invariant candidates
/// from derivation traces in cfg.heuristic_order; a proven candidate is
/// registered as a lemma and the goal is proved from it.
inline std::optional<SearchResult> prove(const Logic& logic, const Program& program, const Formula& goal,
                                         const SearchConfig& cfg = {}, ProveLog* log = nullptr) {
  auto t0 = std::chrono::steady_clock::now();
  Program p = program;
  p.logic = logic;
  SearchStats stats;
  CheckOptions copts;
  copts.unfold_budget = cfg.unfold_budget;

  auto finish = [&](SearchResult r) {
    r.stats = stats;
    r.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  auto attempt = [&](const InvariantCandidate& c) -> std::optional<SearchResult> {
    ProveAttempt rec{c};
    std::optional<SearchResult> out;
    if (auto inv = uniform_search(logic, p, Sequent::root(c.formula), cfg, &stats);
        inv && check_proof(logic, p, *inv, copts).accepted) {
      rec.invariant_proved = true;
      Program with = register_lemma(p, c.formula, *inv, copts);
      if (c.formula == goal) {
        out = SearchResult{c, *inv, std::nullopt, with, {}};
      } else if (auto cor = uniform_search(logic, with, Sequent::main({}, {}, {goal, false}), cfg, &stats);
                 cor && check_proof(logic, with, *cor, copts).accepted) {
        rec.corollary_proved = true;
        out = SearchResult{c, *inv, *cor, with, {}};
      }
    }
    if (log) log->attempts.push_back(rec);
    return out;
  };

  if (is_core(logic, p.sig, goal)) {
    if (auto c = make_candidate(p, goal, Provenance::Goal))
      if (auto r = attempt(*c)) return finish(*r);
  }

  std::vector<DerivationTrace> traces;
  if (auto tr = detail::try_trace(p, goal, cfg)) traces.push_back(*tr);
  if (auto aux = detail::abstract_fix_arguments(p.sig, goal))
    if (auto tr = detail::try_trace(p, *aux, cfg)) traces.push_back(*tr);
  if (log) log->traces = traces;

  std::vector<Formula> tried;
  for (Provenance prov : cfg.heuristic_order) {
    std::vector<InvariantCandidate> cs;
    for (const auto& tr : traces) {
      switch (prov) {
        case Provenance::Loop:
          if (auto c = detect_loop(tr, p)) cs.push_back(*c);
          break;
        case Provenance::Generalize:
        case Provenance::Conditional:
          for (const auto& c : generalize_invariant(tr, p))
            if (c.provenance == prov) cs.push_back(c);
          break;
        case Provenance::FixSynthesis:
          for (const auto& c : synthesize_fix_args(tr, p)) cs.push_back(c);
          break;
        case Provenance::Goal:
          break;
      }
    }
    for (const auto& c : cs) {
      if (!is_core(logic, p.sig, c.formula)) continue;
      if (std::find(tried.begin(), tried.end(), c.formula) != tried.end()) continue;
      tried.push_back(c.formula);
      if (auto r = attempt(c)) return finish(*r);
    }
  }
  return std::nullopt;
}

}  // namespace coup
