#pragma once

#include <random>
#include <string>
#include <vector>

#include "coup/coup.hpp"

namespace coup::testing {

inline std::string theory_path(const std::string& name) { return std::string(COUP_THEORY_DIR) + "/" + name; }

inline syntax::TheoryDocument load_doc(const std::string& name) {
  return syntax::parse_theory(syntax::read_file(theory_path(name + ".th")));
}
inline Program load(const std::string& name) { return load_doc(name).program(); }

/// A term over p's signature and definitions; unknown names become free variables.
inline Term term(const Program& p, const std::string& text) {
  syntax::ExprParser ps(syntax::tokenize(text), p.sig, p.definitions, syntax::FreeNames::Variables);
  Term t = ps.parse_term();
  if (!ps.at_end()) throw std::runtime_error("trailing input in " + text);
  return beta_normalize(t);
}
inline Formula formula(const Program& p, const std::string& text) { return Formula(term(p, text)); }

inline std::string show(const Program& p, const Term& t) { return syntax::print_term(t, {&p.sig, &p.definitions}); }
inline std::string show(const Program& p, const Formula& f) { return show(p, f.term()); }

inline const SimpleType& I() {
  static const SimpleType t = SimpleType::base("i");
  return t;
}
inline SimpleType arrow(const SimpleType& a, const SimpleType& b) { return SimpleType::arrow(a, b); }

// ---------------------------------------------------------------------------
// Random generation for property suites

/// Signature with individuals a, b : i, f, g : i -> i, h : i -> i -> i and
/// predicates p, q : i -> o, r : i -> i -> o.
inline Signature random_signature() {
  Signature s;
  s.add_kind("i");
  s.add_constant("a", I());
  s.add_constant("b", I());
  s.add_constant("f", arrow(I(), I()));
  s.add_constant("g", arrow(I(), I()));
  s.add_constant("h", arrow(I(), arrow(I(), I())));
  s.add_constant("p", arrow(I(), SimpleType::formula()));
  s.add_constant("q", arrow(I(), SimpleType::formula()));
  s.add_constant("r", arrow(I(), arrow(I(), SimpleType::formula())));
  return s;
}

class Gen {
 public:
  explicit Gen(std::uint32_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// First-order individual term over a, b, f, g, h and the given variables.
  Term individual(std::size_t depth, const std::vector<std::string>& vars = {}) {
    if (depth == 0 || coin(0.3)) {
      std::size_t n = 2 + vars.size();
      std::size_t k = below(n);
      if (k < 2) return Term::constant(k == 0 ? "a" : "b");
      return Term::fvar(vars[k - 2]);
    }
    switch (below(3)) {
      case 0:
        return Term::app(Term::constant("f"), individual(depth - 1, vars));
      case 1:
        return Term::app(Term::constant("g"), individual(depth - 1, vars));
      default:
        return Term::app(Term::app(Term::constant("h"), individual(depth - 1, vars)), individual(depth - 1, vars));
    }
  }

  /// A guarded fixpoint of type i, `fix λx. C[x]` with x under a constructor.
  Term fixpoint(std::size_t depth) {
    Term body = Term::fvar("#self");
    std::size_t layers = 1 + below(std::max<std::size_t>(depth, 1));
    for (std::size_t k = 0; k < layers; ++k) {
      switch (below(3)) {
        case 0:
          body = Term::app(Term::constant("f"), body);
          break;
        case 1:
          body = Term::app(Term::constant("g"), body);
          break;
        default:
          body = coin() ? Term::app(Term::app(Term::constant("h"), individual(1)), body)
                        : Term::app(Term::app(Term::constant("h"), body), individual(1));
      }
    }
    return Term::fix("x", I(), abstract_fvar(body, "#self"));
  }

  /// Individual term that may contain guarded fixpoints.
  Term rational(std::size_t depth) {
    if (depth == 0 || coin(0.25)) return coin(0.5) ? fixpoint(2) : individual(0);
    switch (below(3)) {
      case 0:
        return Term::app(Term::constant("f"), rational(depth - 1));
      case 1:
        return Term::app(Term::constant("g"), rational(depth - 1));
      default:
        return Term::app(Term::app(Term::constant("h"), rational(depth - 1)), rational(depth - 1));
    }
  }

  Term atom(std::size_t depth, const std::vector<std::string>& vars = {}) {
    switch (below(3)) {
      case 0:
        return Term::app(Term::constant("p"), individual(depth, vars));
      case 1:
        return Term::app(Term::constant("q"), individual(depth, vars));
      default:
        return Term::app(Term::app(Term::constant("r"), individual(depth, vars)), individual(depth, vars));
    }
  }

  /// Arbitrary formula over the random signature: quantifiers bind fresh
  /// variables, atoms may be flexible (a bound predicate variable applied).
  Formula formula(std::size_t depth, std::vector<std::string> vars = {}, bool higher = true) {
    if (depth == 0 || coin(0.25)) {
      if (coin(0.1)) return Formula::top();
      return Formula(atom(2, vars));
    }
    switch (below(higher ? 7 : 6)) {
      case 0:
        return Formula::conj(formula(depth - 1, vars, higher), formula(depth - 1, vars, higher));
      case 1:
        return Formula::disj(formula(depth - 1, vars, higher), formula(depth - 1, vars, higher));
      case 2:
        return Formula::implies(formula(depth - 1, vars, higher), formula(depth - 1, vars, higher));
      case 3:
      case 4: {
        std::string v = "v" + std::to_string(vars.size());
        vars.push_back(v);
        Formula body = formula(depth - 1, vars, higher);
        return below(2) == 0 ? Formula::forall(v, I(), body) : Formula::exists(v, I(), body);
      }
      case 5:
        return Formula(atom(2, vars));
      default: {
        // ∀P:i->o. ... P t ...
        std::string v = "P" + std::to_string(vars.size());
        Formula inner = Formula(Term::app(Term::fvar(v), individual(1, vars)));
        Formula body = coin() ? Formula::implies(inner, formula(depth - 1, vars, higher))
                              : Formula::conj(formula(depth - 1, vars, higher), inner);
        return Formula::forall(v, arrow(I(), SimpleType::formula()), body);
      }
    }
  }

  std::mt19937& engine() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace coup::testing
