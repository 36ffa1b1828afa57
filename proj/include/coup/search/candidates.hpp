#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coup/formula.hpp"
#include "coup/search/trace.hpp"

namespace coup {

enum class Provenance {
  Loop,
  Generalize,
  Conditional,
  FixSynthesis,
  Goal,  // the goal is itself a core formula and is tried as its own invariant
};

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Loop:
      return "Loop";
    case Provenance::Generalize:
      return "Generalize";
    case Provenance::Conditional:
      return "Conditional";
    case Provenance::FixSynthesis:
      return "FixSynthesis";
    case Provenance::Goal:
      return "Goal";
  }
  return "?";
}
inline std::optional<Provenance> parse_provenance(const std::string& s) {
  for (Provenance p : {Provenance::Loop, Provenance::Generalize, Provenance::Conditional, Provenance::FixSynthesis,
                       Provenance::Goal})
    if (s == provenance_name(p)) return p;
  return std::nullopt;
}

struct InvariantCandidate {
  Formula formula;
  Fragment fragment = Fragment::CoFohc;
  bool uses_fix = false;
  Provenance provenance = Provenance::Loop;
};

/// Free variables in order of first occurrence (left to right).
inline void ordered_fvars(const Term& t, std::vector<std::string>& out) {
  if (!t.has_free_vars()) return;
  switch (t.kind()) {
    case TermKind::FVar:
      if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
      return;
    case TermKind::App:
      ordered_fvars(t.fun(), out);
      ordered_fvars(t.arg(), out);
      return;
    case TermKind::Lam:
    case TermKind::Fix:
      ordered_fvars(t.body(), out);
      return;
    default:
      return;
  }
}

/// ∀-closes every free variable, leftmost outermost, with readable binder hints.
inline Formula close_universally(const Formula& f, const TypeContext& types) {
  static const char* hints[] = {"x", "y", "z", "w", "u", "v"};
  std::vector<std::string> vars;
  ordered_fvars(f.term(), vars);
  Term body = f.term();
  for (std::size_t i = vars.size(); i-- > 0;) {
    std::string hint = i < 6 ? hints[i] : "x" + std::to_string(i);
    body = Term::app(Term::constant("forall"), Term::lam(hint, types.at(vars[i]), abstract_fvar(body, vars[i])));
  }
  return Formula(body);
}

inline std::optional<InvariantCandidate> make_candidate(const Program& p, const Formula& f, Provenance prov) {
  if (!is_closed(f)) return std::nullopt;
  bool fix = f.term().has_fix();
  if (fix && !all_fix_guarded(f.term())) return std::nullopt;
  auto frag = minimal_core_fragment(p.sig, f, fix);
  if (!frag) return std::nullopt;
  return InvariantCandidate{f, *frag, fix, prov};
}

// ---------------------------------------------------------------------------
// Anti-unification

/// First-order least general generalization of several term lists at once.
/// Disagreeing tuples of subterms map to one shared variable, so repeated
/// disagreements generalize to the same variable. Fix-headed and λ subterms
/// are compared as wholes.
class Generalizer {
 public:
  explicit Generalizer(const Signature& sig, TypeContext types) : sig_(sig), types_(std::move(types)) {}

  Term lgg(const std::vector<Term>& ts) {
    bool all_same = true;
    for (const auto& t : ts) all_same = all_same && t == ts[0];
    if (all_same) return ts[0];
    const Term& h0 = ts[0].head();
    bool rigid = h0.is(TermKind::Const);
    std::size_t n = ts[0].args().size();
    for (const auto& t : ts) {
      const Term& h = t.head();
      rigid = rigid && h.is(TermKind::Const) && h.name() == h0.name() && t.args().size() == n;
    }
    if (rigid && n > 0) {
      std::vector<std::vector<Term>> cols(n);
      for (const auto& t : ts) {
        auto as = t.args();
        for (std::size_t i = 0; i < n; ++i) cols[i].push_back(as[i]);
      }
      Term out = h0;
      for (auto& c : cols) out = Term::app(out, lgg(c));
      return out;
    }
    std::string key;
    for (const auto& t : ts) key += term_key(t) + "\x1f";
    auto it = table_.find(key);
    if (it != table_.end()) return Term::fvar(it->second);
    std::string v = "_g" + std::to_string(table_.size());
    table_[key] = v;
    types_[v] = typecheck(sig_, types_, ts[0]);
    instances_[v] = ts;
    return Term::fvar(v);
  }

  const TypeContext& types() const { return types_; }
  /// Instances each generalization variable stands for, in input order.
  const std::map<std::string, std::vector<Term>>& instances() const { return instances_; }

 private:
  const Signature& sig_;
  TypeContext types_;
  std::map<std::string, std::string> table_;
  std::map<std::string, std::vector<Term>> instances_;
};

// ---------------------------------------------------------------------------
// Candidate generators

/// The looping atom of a LoopFound trace, ∀-closed over what remains free.
inline std::optional<InvariantCandidate> detect_loop(const DerivationTrace& tr, const Program& p) {
  if (tr.verdict != TraceVerdict::LoopFound || !tr.loop_atom.valid()) return std::nullopt;
  return make_candidate(p, close_universally(Formula(tr.loop_atom), tr.var_types), Provenance::Loop);
}

namespace detail {

inline std::string predicate_of(const Term& atom) {
  const Term& h = atom.head();
  return h.is(TermKind::Const) ? h.name() : std::string();
}

// Steps that resolved an atom of the trace's main predicate.
inline std::vector<const TraceStep*> periods(const DerivationTrace& tr) {
  std::vector<const TraceStep*> out;
  if (tr.steps.empty()) return out;
  std::string main = predicate_of(tr.steps[0].selected);
  for (const auto& s : tr.steps)
    if (s.clause && predicate_of(s.selected) == main) out.push_back(&s);
  return out;
}

}  // namespace detail

/// lgg of the main predicate's resolved instances, then the same guarded by
/// the side predicates introduced in every period.
inline std::vector<InvariantCandidate> generalize_invariant(const DerivationTrace& tr, const Program& p) {
  std::vector<InvariantCandidate> out;
  auto per = detail::periods(tr);
  if (per.size() < 2) return out;

  {
    Generalizer g(p.sig, tr.var_types);
    std::vector<Term> inst;
    for (const auto* s : per) inst.push_back(s->selected);
    Term gen = g.lgg(inst);
    if (auto c = make_candidate(p, close_universally(Formula(gen), g.types()), Provenance::Generalize))
      out.push_back(*c);
  }

  std::string main = detail::predicate_of(per[0]->selected);
  std::vector<std::string> sides;
  for (const auto& a : per[0]->introduced) {
    std::string q = detail::predicate_of(a);
    if (q.empty() || q == main || std::find(sides.begin(), sides.end(), q) != sides.end()) continue;
    bool everywhere = true;
    for (const auto* s : per) {
      bool found = false;
      for (const auto& b : s->introduced) found = found || detail::predicate_of(b) == q;
      everywhere = everywhere && found;
    }
    if (everywhere) sides.push_back(q);
  }
  if (sides.empty()) return out;

  // Joint lgg over (main atom, first side atom of each side predicate).
  Generalizer g(p.sig, tr.var_types);
  std::vector<Term> tuples;
  Term tuple_head = Term::constant("#tuple");
  for (const auto* s : per) {
    std::vector<Term> parts{s->selected};
    for (const auto& q : sides)
      for (const auto& b : s->introduced)
        if (detail::predicate_of(b) == q) {
          parts.push_back(b);
          break;
        }
    tuples.push_back(Term::apps(tuple_head, parts));
  }
  Term gen = g.lgg(tuples);
  auto parts = gen.args();
  if (parts.size() != sides.size() + 1) return out;
  Formula cond(parts[1]);
  for (std::size_t i = 2; i < parts.size(); ++i) cond = Formula::conj(cond, Formula(parts[i]));
  Formula body = Formula::implies(cond, Formula(parts[0]));
  if (auto c = make_candidate(p, close_universally(body, g.types()), Provenance::Conditional)) out.push_back(*c);
  return out;
}

namespace detail {

// t = C[w] for a single occurrence of a variable w, with no other free variables.
inline std::optional<std::pair<std::string, Term>> one_hole(const Term& t) {
  std::vector<std::string> vs;
  ordered_fvars(t, vs);
  if (vs.size() != 1 || t.is(TermKind::FVar)) return std::nullopt;
  return std::make_pair(vs[0], t);
}

// Replaces every subterm α-equal to `what` by `by`.
inline Term replace_subterm(const Term& t, const Term& what, const Term& by) {
  if (t == what) return by;
  switch (t.kind()) {
    case TermKind::App:
      return Term::app(replace_subterm(t.fun(), what, by), replace_subterm(t.arg(), what, by));
    default:
      return t;
  }
}

}  // namespace detail

/// Solves constructor recurrences on the bindings of the query's existential
/// variables: x_i ↦ C(x_{i+1}) gives fix λx. C x, and x_i ↦ C(t_i, x_{i+1})
/// with t_{i+1} = G(t_i) gives ∀n A(n, F n) for F = fix λf. λn. C(n, f (G n)).
inline std::vector<InvariantCandidate> synthesize_fix_args(const DerivationTrace& tr, const Program& p) {
  std::vector<InvariantCandidate> out;
  if (tr.steps.empty() || tr.query_vars.empty()) return out;
  std::vector<Term> goal_atoms;
  for (const auto& g : tr.steps[0].goals) goal_atoms.push_back(g.term());

  for (const auto& x : tr.query_vars) {
    auto xt = tr.var_types.find(x);
    if (xt == tr.var_types.end()) continue;
    // Follow the chain x ↦ C0[w1], w1 ↦ C1[w2], ...
    std::vector<Term> contexts;  // each C_i with its hole as the placeholder variable
    const Term hole = Term::fvar("#hole");
    std::string cur = x;
    for (const auto& s : tr.steps) {
      const Term* b = s.subst.find(cur);
      if (!b) continue;
      auto h = detail::one_hole(*b);
      if (!h) break;
      Substitution plug;
      plug.bind(h->first, hole);
      contexts.push_back(apply_subst(plug, *b));
      cur = h->first;
    }
    if (contexts.empty()) continue;

    auto atoms_with = [&](const std::string& var, const Term& val) {
      Term conj;
      for (const auto& a : goal_atoms) {
        Substitution s;
        s.bind(var, val);
        Term t = beta_normalize(apply_subst(s, a));
        conj = conj.valid() ? Formula::conj(Formula(conj), Formula(t)).term() : t;
      }
      return conj;
    };

    bool self_similar = true;
    for (const auto& c : contexts) self_similar = self_similar && c == contexts[0];
    if (self_similar) {
      Term fx = Term::fix("x", xt->second, abstract_fvar(contexts[0], "#hole"));
      if (!check_guarded(fx)) continue;
      Formula f(atoms_with(x, fx));
      if (auto c = make_candidate(p, close_universally(f, tr.var_types), Provenance::FixSynthesis)) out.push_back(*c);
      continue;
    }

    if (contexts.size() < 2) continue;
    TypeContext with_hole = tr.var_types;
    with_hole["#hole"] = xt->second;
    Generalizer g(p.sig, with_hole);
    Term shape = g.lgg(contexts);
    if (g.instances().size() != 1) continue;
    const auto& [n, ts] = *g.instances().begin();
    // G from the first two parameters, checked on the rest.
    Term gen_step = detail::replace_subterm(ts[1], ts[0], Term::fvar("#n"));
    if (gen_step == ts[1] || gen_step.is(TermKind::FVar)) continue;
    bool follows = true;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      Substitution s;
      s.bind("#n", ts[i]);
      follows = follows && apply_subst(s, gen_step) == ts[i + 1];
    }
    if (!follows) continue;
    SimpleType nt = g.types().at(n);
    SimpleType ft = SimpleType::arrow(nt, xt->second);
    // fix λf. λn. shape[n, f (G n)]
    Term rec = Term::app(Term::fvar("#f"), detail::replace_subterm(gen_step, Term::fvar("#n"), Term::fvar(n)));
    Substitution fill;
    fill.bind("#hole", rec);
    Term body = apply_subst(fill, shape);
    Term fterm = Term::fix("f", ft, abstract_fvar(Term::lam("n", nt, abstract_fvar(body, n)), "#f"));
    if (!check_guarded(fterm)) continue;
    Term start = ts[0];
    Term conj;
    for (const auto& a : goal_atoms) {
      Substitution s;
      s.bind(x, Term::app(Term::fvar("#param"), start));
      Term t = detail::replace_subterm(apply_subst(s, a), start, Term::fvar(n));
      Substitution s2;
      s2.bind("#param", fterm);
      t = beta_normalize(apply_subst(s2, t));
      conj = conj.valid() ? Formula::conj(Formula(conj), Formula(t)).term() : t;
    }
    TypeContext types = tr.var_types;
    types[n] = nt;
    if (auto c = make_candidate(p, close_universally(Formula(conj), types), Provenance::FixSynthesis)) out.push_back(*c);
  }
  return out;
}

}  // namespace coup
