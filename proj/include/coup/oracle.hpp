#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "coup/fixbeta.hpp"
#include "coup/formula.hpp"
#include "coup/search/trace.hpp"
#include "coup/unify.hpp"

namespace coup {

struct MembershipVerdict {
  enum class Kind { In, Out, Unknown };
  enum class Reason { None, Budget, Irrational };
  Kind kind = Kind::Unknown;
  Reason reason = Reason::None;

  static MembershipVerdict in() { return {Kind::In, Reason::None}; }
  static MembershipVerdict out() { return {Kind::Out, Reason::None}; }
  static MembershipVerdict unknown(Reason r = Reason::Budget) { return {Kind::Unknown, r}; }
  bool is_in() const { return kind == Kind::In; }
  bool is_out() const { return kind == Kind::Out; }
  friend bool operator==(const MembershipVerdict&, const MembershipVerdict&) = default;
};

inline std::string verdict_name(const MembershipVerdict& v) {
  switch (v.kind) {
    case MembershipVerdict::Kind::In:
      return "In";
    case MembershipVerdict::Kind::Out:
      return "Out";
    case MembershipVerdict::Kind::Unknown:
      return v.reason == MembershipVerdict::Reason::Irrational ? "Unknown(irrational)" : "Unknown(budget)";
  }
  return "?";
}

struct OracleConfig {
  std::size_t assume_budget = 64;  // distinct atoms assumed at once
  std::size_t depth_budget = 24;   // nested atom resolutions
  /// Depth of the ground terms tried for variables that occur only in a clause body.
  std::size_t enum_depth = 2;
  std::size_t step_budget = 200000;
  std::size_t unfold_budget = kDefaultUnfoldBudget;
};

namespace detail {

inline bool applies_fixpoint(const Term& t) {
  switch (t.kind()) {
    case TermKind::App:
      return t.head().is(TermKind::Fix) || applies_fixpoint(t.fun()) || applies_fixpoint(t.arg());
    case TermKind::Lam:
    case TermKind::Fix:
      return applies_fixpoint(t.body());
    default:
      return false;
  }
}

/// Ground terms of each individual type, up to a constructor depth, plus the
/// guarded fixpoints `fix λx. C[x]` whose context C has that depth.
class GroundUniverse {
 public:
  GroundUniverse(const Signature& sig, std::size_t depth, std::size_t unfold_budget)
      : sig_(sig), depth_(depth), unfold_(unfold_budget) {}

  const std::vector<Term>& finite(const SimpleType& t) {
    auto it = finite_.find(t.name());
    if (it != finite_.end()) return it->second;
    return finite_[t.name()] = build(t, nullptr);
  }

  const std::vector<Term>& fixpoints(const SimpleType& t) {
    auto it = fix_.find(t.name());
    if (it != fix_.end()) return it->second;
    std::vector<Term> out;
    for (const Term& ctx : build(t, &t)) {
      if (!mentions_constant(ctx, kHole) || ctx.is(TermKind::Const)) continue;
      Term f = Term::fix("x", t, abstract_const(ctx, kHole));
      bool dup = false;
      for (const auto& g : out)
        if (fixbeta_equal(f, g, unfold_).equal()) dup = true;
      if (!dup) out.push_back(f);
    }
    return fix_[t.name()] = out;
  }

  std::vector<Term> all(const SimpleType& t) {
    std::vector<Term> out = finite(t);
    const auto& f = fixpoints(t);
    out.insert(out.end(), f.begin(), f.end());
    return out;
  }

  /// Whether the finite part is cut off by the depth bound.
  bool truncated(const SimpleType& t) const {
    for (const auto& [c, ty] : sig_.constants())
      if (ty.is_arrow() && ty.target() == t) return true;
    return false;
  }

 private:
  static constexpr const char* kHole = "#hole";

  // With `hole`, a constant of that type is added at depth 0.
  std::vector<Term> build(const SimpleType& t, const SimpleType* hole) {
    std::map<std::string, std::vector<Term>> level;
    std::set<std::string> seen;
    auto add = [&](const std::string& ty, const Term& term) {
      if (seen.insert(ty + "|" + term_key(term)).second) level[ty].push_back(term);
    };
    if (hole) add(hole->name(), Term::constant(kHole));
    for (const auto& [c, ty] : sig_.constants())
      if (ty.is_individual()) add(ty.name(), Term::constant(c));
    for (std::size_t d = 1; d <= depth_; ++d) {
      auto prev = level;
      for (const auto& [c, ty] : sig_.constants()) {
        if (!ty.is_arrow() || !ty.target().is_individual()) continue;
        auto args = ty.arguments();
        bool ok = true;
        for (const auto& a : args)
          if (!a.is_individual()) ok = false;
        if (!ok) continue;
        std::vector<std::size_t> idx(args.size(), 0);
        std::vector<const std::vector<Term>*> pools;
        for (const auto& a : args) {
          pools.push_back(&prev[a.name()]);
          if (pools.back()->empty()) ok = false;
        }
        if (!ok) continue;
        for (;;) {
          Term term = Term::constant(c);
          for (std::size_t i = 0; i < args.size(); ++i) term = Term::app(term, (*pools[i])[idx[i]]);
          add(ty.target().name(), term);
          std::size_t k = 0;
          while (k < idx.size() && ++idx[k] == pools[k]->size()) idx[k++] = 0;
          if (k == idx.size()) break;
        }
      }
    }
    return level[t.name()];
  }

  const Signature& sig_;
  std::size_t depth_;
  std::size_t unfold_;
  std::map<std::string, std::vector<Term>> finite_, fix_;
};

class HerbrandOracle {
 public:
  HerbrandOracle(const Program& p, const OracleConfig& cfg)
      : p_(p), cfg_(cfg), universe_(p.sig, cfg.enum_depth, cfg.unfold_budget) {
    for (std::size_t i = 0; i < p.clauses.size(); ++i) horn_instances(i, p.clauses[i], vs_, types_, {}, clauses_);
    for (std::size_t i = 0; i < p.lemmas.size(); ++i) horn_instances(i, p.lemmas[i], vs_, types_, {}, clauses_);
  }

  MembershipVerdict member(const Term& atom) {
    steps_ = 0;
    MembershipVerdict v = solve(beta_normalize(atom), {}, {}, 0, true);
    if (v.kind == MembershipVerdict::Kind::Unknown && applies_fixpoint(atom))
      v.reason = MembershipVerdict::Reason::Irrational;
    return v;
  }

 private:
  using V = MembershipVerdict;

  // Assumptions are atoms whose free variables are pattern variables.
  bool matches(const Term& pattern, const Term& atom) const {
    RationalUnifier u({}, cfg_.unfold_budget);
    return u.unify(pattern, atom) == UnifyResult::Status::Unified;
  }

  Term lgg(const Term& a, const Term& b, std::map<std::pair<std::string, std::string>, std::string>& vars) const {
    if (a == b) return a;
    if (a.is(TermKind::App) && b.is(TermKind::App) && a.head() == b.head()) {
      auto xs = a.args(), ys = b.args();
      if (xs.size() == ys.size()) {
        Term out = a.head();
        for (std::size_t i = 0; i < xs.size(); ++i) out = Term::app(out, lgg(xs[i], ys[i], vars));
        return out;
      }
    }
    auto key = std::make_pair(term_key(a), term_key(b));
    auto it = vars.find(key);
    if (it != vars.end()) return Term::fvar(it->second);
    std::string v = "#g" + std::to_string(vars.size() + 1);
    vars[key] = v;
    return Term::fvar(v);
  }

  // With `pattern`, `atom` is a rigid instance of it and the pattern becomes
  // an assumption only below the first resolution step.
  V solve(const Term& atom, std::vector<Term> assumed, const std::vector<Term>& ancestors, std::size_t depth,
          bool may_generalize, const Term* pattern = nullptr) {
    if (!pattern)
      for (const auto& a : assumed)
        if (matches(a, atom)) return V::in();
    const std::string key = term_key(atom);
    if (out_.count(key)) return V::out();
    if (depth >= cfg_.depth_budget || assumed.size() >= cfg_.assume_budget || ++steps_ > cfg_.step_budget)
      return V::unknown();

    // Coinductive generalization: if an ancestor and this atom share a
    // pattern, show the pattern for fresh rigid constants assuming all of
    // its instances. Only a success is conclusive.
    if (may_generalize && !pattern) {
      for (auto it = ancestors.rbegin(); it != ancestors.rend(); ++it) {
        if (!same_predicate(*it, atom)) continue;
        std::map<std::pair<std::string, std::string>, std::string> vars;
        Term pattern = lgg(*it, atom, vars);
        if (vars.empty()) continue;
        Term rigid = pattern;
        for (const auto& [_, v] : vars) rigid = replace_fvar(rigid, v, Term::constant(v + "'"));
        if (solve(rigid, assumed, {}, depth + 1, false, &pattern).is_in()) return V::in();
      }
    }

    assumed.push_back(pattern ? *pattern : atom);
    auto anc = ancestors;
    anc.push_back(atom);
    bool unknown = false;
    for (const auto& hc : clauses_) {
      if (!same_predicate(hc.head, atom)) continue;
      RationalUnifier u(types_, cfg_.unfold_budget);
      auto st = u.unify(hc.head, atom);
      if (st == UnifyResult::Status::BudgetExhausted) unknown = true;
      if (st != UnifyResult::Status::Unified) continue;
      std::vector<Term> body;
      std::set<std::string> open;
      for (const auto& b : hc.body) {
        body.push_back(beta_normalize(u.resolve_term(b)));
        collect_fvars(body.back(), open);
      }
      std::vector<std::pair<std::string, std::vector<Term>>> choices;
      for (const auto& v : open) {
        const SimpleType& ty = types_.at(v);
        if (!ty.is_individual()) {
          unknown = true;
          choices.clear();
          break;
        }
        if (universe_.truncated(ty)) unknown = true;
        choices.emplace_back(v, universe_.all(ty));
      }
      if (!open.empty() && choices.empty()) continue;
      std::vector<std::size_t> idx(choices.size(), 0);
      bool empty_pool = false;
      for (const auto& c : choices)
        if (c.second.empty()) empty_pool = true;
      if (empty_pool) continue;
      for (;;) {
        std::vector<Term> inst = body;
        for (std::size_t i = 0; i < choices.size(); ++i)
          for (auto& b : inst) b = replace_fvar(b, choices[i].first, choices[i].second[idx[i]]);
        V r = V::in();
        for (const auto& b : inst) {
          V s = solve(beta_normalize(b), assumed, anc, depth + 1, may_generalize);
          if (s.is_out()) {
            r = s;
            break;
          }
          if (!s.is_in()) r = s;
        }
        if (r.is_in()) return r;
        if (!r.is_out()) unknown = true;
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == choices[k].second.size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
    if (unknown) return V::unknown();
    out_.insert(key);
    return V::out();
  }

  static Term replace_fvar(const Term& t, const std::string& v, const Term& by) {
    return instantiate(abstract_fvar(t, v), by);
  }

  const Program& p_;
  OracleConfig cfg_;
  GroundUniverse universe_;
  VarSupply vs_;
  TypeContext types_;
  std::vector<HornClause> clauses_;
  std::size_t steps_ = 0;
  // An Out verdict never rests on an assumption, so it holds in any context.
  std::set<std::string> out_;
};

}  // namespace detail

/// Three-valued membership of a ground atom in the greatest Herbrand model.
/// In: a coinductive derivation exists (atoms met again count as derived).
/// Out: every clause instance fails finitely. Unknown otherwise.
inline MembershipVerdict gfp_member(const Program& p, const Term& atom, const OracleConfig& cfg = {}) {
  return detail::HerbrandOracle(p, cfg).member(atom);
}
inline MembershipVerdict gfp_member(const Program& p, const Formula& atom, const OracleConfig& cfg = {}) {
  return gfp_member(p, atom.term(), cfg);
}

/// Every atom over the signature's predicates whose arguments are ground terms
/// of depth ≤ depth or guarded fixpoints of that depth, that gfp_member
/// reports In.
inline std::vector<Formula> enumerate_model(const Program& p, std::size_t depth, const OracleConfig& cfg = {}) {
  detail::GroundUniverse u(p.sig, depth, cfg.unfold_budget);
  detail::HerbrandOracle oracle(p, cfg);
  std::vector<Formula> out;
  for (const auto& [c, ty] : p.sig.constants()) {
    if (!ty.target().is_formula()) continue;
    auto args = ty.arguments();
    std::vector<std::vector<Term>> pools;
    bool ok = true;
    for (const auto& a : args) {
      if (!a.is_individual()) ok = false;
      else pools.push_back(u.all(a));
      if (ok && pools.back().empty()) ok = false;
    }
    if (!ok) continue;
    std::vector<std::size_t> idx(args.size(), 0);
    for (;;) {
      Term atom = Term::constant(c);
      for (std::size_t i = 0; i < args.size(); ++i) atom = Term::app(atom, pools[i][idx[i]]);
      if (oracle.member(atom).is_in()) out.emplace_back(atom);
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == pools[k].size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  return out;
}

}  // namespace coup
