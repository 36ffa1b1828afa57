#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coup/formula.hpp"
#include "coup/syntax/lexer.hpp"
#include "coup/term.hpp"

namespace coup::syntax {

/// What to do with identifiers that are neither bound, defined, nor declared.
enum class FreeNames {
  Reject,       // parse error
  Variables,    // become free variables
  Capitalized,  // capitalized ones become free variables, others are errors
};

/// Recursive-descent parser for types, terms and formulas over a token
/// stream. Formulas are terms of type o built from the logical constants.
class ExprParser {
 public:
  ExprParser(std::vector<Token> toks, const Signature& sig, const std::vector<Definition>& defs,
             FreeNames free = FreeNames::Reject)
      : toks_(std::move(toks)), sig_(sig), defs_(defs), free_(free) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::End; }
  std::size_t position() const { return pos_; }
  void seek(std::size_t p) { pos_ = std::min(p, toks_.size() - 1); }
  bool accept(const char* p) {
    if (peek().is(p)) {
      next();
      return true;
    }
    return false;
  }
  void expect(const char* p) {
    if (!accept(p)) fail(peek(), std::string("expected '") + p + "'");
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident) fail(peek(), "expected an identifier");
    return next().text;
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg,
                                SyntaxErrorCode code = SyntaxErrorCode::ParseError) {
    std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(code, t.line, t.column, msg + " near " + near);
  }

  /// Free variables in order of first occurrence.
  const std::vector<std::string>& free_names() const { return free_order_; }
  /// Allows `,` as conjunction (off inside sequent lists).
  void set_comma_conjunction(bool on) { comma_and_ = on; }

  SimpleType parse_type() {
    SimpleType dom;
    if (accept("(")) {
      dom = parse_type();
      expect(")");
    } else {
      const Token& t = peek();
      std::string n = expect_ident();
      if (!sig_.has_kind(n)) fail(t, "unknown type '" + n + "'");
      dom = SimpleType::base(n);
    }
    if (accept("->")) return SimpleType::arrow(dom, parse_type());
    return dom;
  }

  Term parse_term() { return expr(); }

 private:
  bool starts_binder() const {
    return peek().is("\\") || peek().is_word("fix") || peek().is_word("forall") || peek().is_word("exists");
  }
  bool starts_atom() const {
    const Token& t = peek();
    if (t.is("(")) return true;
    if (t.kind != Tok::Ident) return false;
    return !(t.text == "fix" || t.text == "forall" || t.text == "exists");
  }

  Term expr() {
    if (starts_binder()) return binder();
    Term lhs = disj();
    if (accept("=>")) {
      Term rhs = expr();
      return Term::apps(Term::constant("=>"), {lhs, rhs});
    }
    return lhs;
  }

  Term binder() {
    std::string kind;
    if (accept("\\")) {
      kind = "lam";
    } else if (peek().is_word("fix")) {
      next();
      expect("\\");
      kind = "fix";
    } else {
      kind = next().text;  // forall / exists
    }
    std::string name = expect_ident();
    expect(":");
    SimpleType ty = parse_type();
    expect(".");
    bound_.push_back(name);
    Term body = expr();
    bound_.pop_back();
    if (kind == "lam") return Term::lam(name, ty, body);
    if (kind == "fix") return Term::fix(name, ty, body);
    return Term::app(Term::constant(kind), Term::lam(name, ty, body));
  }

  Term disj() {
    Term l = conj();
    while (peek().is(";")) {
      next();
      Term r = starts_binder() ? binder() : conj();
      l = Term::apps(Term::constant(";"), {l, r});
    }
    return l;
  }

  Term conj() {
    Term l = app();
    while (peek().is("&") || (comma_and_ && peek().is(","))) {
      next();
      Term r = starts_binder() ? binder() : app();
      l = Term::apps(Term::constant("&"), {l, r});
    }
    return l;
  }

  Term app() {
    if (!starts_atom()) fail(peek(), "expected a term");
    Term h = atom();
    while (starts_atom() || starts_binder()) {
      if (starts_binder()) {
        h = Term::app(h, binder());
        break;
      }
      h = Term::app(h, atom());
    }
    return h;
  }

  Term atom() {
    if (accept("(")) {
      bool saved = comma_and_;
      comma_and_ = true;
      Term t = expr();
      comma_and_ = saved;
      expect(")");
      return t;
    }
    const Token& tok = peek();
    std::string n = expect_ident();
    if (n == "true") return Term::constant("true");
    for (std::size_t i = bound_.size(); i-- > 0;)
      if (bound_[i] == n) return Term::bvar(static_cast<std::uint32_t>(bound_.size() - 1 - i));
    for (const auto& d : defs_)
      if (d.name == n) return d.body;
    if (sig_.contains(n)) return Term::constant(n);
    if (is_reserved_word(n)) fail(tok, "reserved word '" + n + "' used as a term");
    bool capital = std::isupper(static_cast<unsigned char>(n[0])) || n[0] == '_';
    if (free_ == FreeNames::Variables || (free_ == FreeNames::Capitalized && capital)) {
      if (std::find(free_order_.begin(), free_order_.end(), n) == free_order_.end()) free_order_.push_back(n);
      return Term::fvar(n);
    }
    fail(tok, "unbound name '" + n + "'", SyntaxErrorCode::FragmentViolation);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& sig_;
  const std::vector<Definition>& defs_;
  FreeNames free_;
  std::vector<std::string> bound_;
  std::vector<std::string> free_order_;
  bool comma_and_ = true;
};

// ---------------------------------------------------------------------------
// Type inference for implicitly quantified variables

/// Infers types for the free variables of `t` (which must have type o).
/// Type variables are base types named `'N`.
class FreeVarTyper {
 public:
  explicit FreeVarTyper(const Signature& sig) : sig_(sig) {}

  TypeContext infer_formula(const Term& t) {
    std::vector<SimpleType> bound;
    unify(infer(t, bound), SimpleType::formula());
    TypeContext out;
    for (const auto& [n, ty] : env_) {
      SimpleType r = resolve(ty);
      if (has_tvar(r)) throw std::runtime_error("cannot infer the type of '" + n + "'");
      out[n] = r;
    }
    return out;
  }

 private:
  static bool is_tvar(const SimpleType& t) { return t.is_base() && !t.name().empty() && t.name()[0] == '\''; }
  static bool has_tvar(const SimpleType& t) {
    return t.is_arrow() ? has_tvar(t.domain()) || has_tvar(t.codomain()) : is_tvar(t);
  }
  SimpleType fresh() { return SimpleType::base("'" + std::to_string(counter_++)); }

  SimpleType resolve(const SimpleType& t) const {
    if (t.is_arrow()) return SimpleType::arrow(resolve(t.domain()), resolve(t.codomain()));
    if (is_tvar(t)) {
      auto it = subst_.find(t.name());
      if (it != subst_.end()) return resolve(it->second);
    }
    return t;
  }
  bool occurs(const std::string& v, const SimpleType& t) const {
    SimpleType r = resolve(t);
    if (r.is_arrow()) return occurs(v, r.domain()) || occurs(v, r.codomain());
    return is_tvar(r) && r.name() == v;
  }
  void unify(const SimpleType& a0, const SimpleType& b0) {
    SimpleType a = resolve(a0), b = resolve(b0);
    if (a == b) return;
    if (is_tvar(a)) {
      if (occurs(a.name(), b)) throw std::runtime_error("cyclic type");
      subst_[a.name()] = b;
      return;
    }
    if (is_tvar(b)) return unify(b, a);
    if (a.is_arrow() && b.is_arrow()) {
      unify(a.domain(), b.domain());
      unify(a.codomain(), b.codomain());
      return;
    }
    throw std::runtime_error("type " + a.to_string() + " does not match " + b.to_string());
  }

  SimpleType infer(const Term& t, std::vector<SimpleType>& bound) {
    const SimpleType o = SimpleType::formula();
    switch (t.kind()) {
      case TermKind::BVar:
        return bound[bound.size() - 1 - t.index()];
      case TermKind::FVar: {
        auto it = env_.find(t.name());
        if (it == env_.end()) it = env_.emplace(t.name(), fresh()).first;
        return it->second;
      }
      case TermKind::Const: {
        const std::string& n = t.name();
        if (n == "true") return o;
        if (n == "&" || n == ";" || n == "=>") return SimpleType::arrow(o, SimpleType::arrow(o, o));
        if (n == "forall" || n == "exists") {
          SimpleType a = fresh();
          return SimpleType::arrow(SimpleType::arrow(a, o), o);
        }
        auto ty = sig_.lookup(n);
        if (!ty) throw std::runtime_error("unknown constant '" + n + "'");
        return *ty;
      }
      case TermKind::App: {
        SimpleType f = infer(t.fun(), bound);
        SimpleType a = infer(t.arg(), bound);
        SimpleType r = fresh();
        unify(f, SimpleType::arrow(a, r));
        return r;
      }
      case TermKind::Lam:
      case TermKind::Fix: {
        bound.push_back(t.binder_type());
        SimpleType b = infer(t.body(), bound);
        bound.pop_back();
        if (t.is(TermKind::Fix)) {
          unify(b, t.binder_type());
          return b;
        }
        return SimpleType::arrow(t.binder_type(), b);
      }
    }
    return o;
  }

  const Signature& sig_;
  std::map<std::string, SimpleType> env_;
  std::map<std::string, SimpleType> subst_;
  int counter_ = 0;
};

}  // namespace coup::syntax
