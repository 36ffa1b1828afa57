#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coup/formula.hpp"
#include "coup/syntax/lexer.hpp"
#include "coup/syntax/parser.hpp"
#include "coup/syntax/printer.hpp"

namespace coup::syntax {

struct TheoryDocument {
  std::vector<std::string> kinds;
  std::vector<std::pair<std::string, SimpleType>> constants;
  Logic logic;
  std::vector<Definition> definitions;
  std::vector<Formula> clauses;

  Signature signature() const {
    Signature s;
    for (const auto& k : kinds) s.add_kind(k);
    for (const auto& [n, t] : constants) s.add_constant(n, t);
    return s;
  }
  Program program() const { return Program{signature(), logic, clauses, {}, definitions}; }

  friend bool operator==(const TheoryDocument& a, const TheoryDocument& b) {
    if (a.kinds != b.kinds || a.constants != b.constants || !(a.logic == b.logic) || a.clauses != b.clauses ||
        a.definitions.size() != b.definitions.size())
      return false;
    for (std::size_t i = 0; i < a.definitions.size(); ++i) {
      const auto &x = a.definitions[i], &y = b.definitions[i];
      if (x.name != y.name || x.type != y.type || !(x.body == y.body)) return false;
    }
    return true;
  }
};

struct ParseOptions {
  /// ∀-close capitalized free identifiers of clauses (in order of first occurrence).
  bool autoclose = false;
};

namespace detail {

inline TypeContext infer_free_types(const Signature& sig, const Term& t, const Token& at) {
  try {
    return FreeVarTyper(sig).infer_formula(t);
  } catch (const std::exception& e) {
    throw SyntaxError(SyntaxErrorCode::TypeError, at.line, at.column, e.what());
  }
}

inline void expect_formula_type(const Signature& sig, const TypeContext& ctx, const Term& t, const Token& at) {
  SimpleType ty;
  try {
    ty = typecheck(sig, ctx, t);
  } catch (const TypeError& e) {
    throw SyntaxError(SyntaxErrorCode::TypeError, at.line, at.column, e.what());
  }
  if (!ty.is_formula())
    throw SyntaxError(SyntaxErrorCode::TypeError, at.line, at.column, "expected a formula, got type " + ty.to_string());
}

}  // namespace detail

/// Statements, each ending in `.`:
///   kind NAME type.           const NAME : TYPE.
///   fragment co-hohh [+fix].  define NAME : TYPE := TERM.
///   FORMULA.                  (a program clause)
inline TheoryDocument parse_theory(const std::string& text, const ParseOptions& opts = {}) {
  TheoryDocument doc;
  Signature sig;
  std::vector<std::pair<Token, Formula>> pending;
  std::vector<Definition> defs;
  ExprParser ps(tokenize(text), sig, defs, opts.autoclose ? FreeNames::Capitalized : FreeNames::Reject);

  while (!ps.at_end()) {
    Token start = ps.peek();
    if (start.is_word("kind")) {
      ps.next();
      std::string n = ps.expect_ident();
      if (!ps.peek().is_word("type")) ExprParser::fail(ps.peek(), "expected 'type'");
      ps.next();
      ps.expect(".");
      if (is_reserved_word(n)) ExprParser::fail(start, "reserved word '" + n + "' used as a type name");
      sig.add_kind(n);
      if (n != "o" && std::find(doc.kinds.begin(), doc.kinds.end(), n) == doc.kinds.end()) doc.kinds.push_back(n);
    } else if (start.is_word("const")) {
      ps.next();
      Token nt = ps.peek();
      std::string n = ps.expect_ident();
      ps.expect(":");
      SimpleType ty = ps.parse_type();
      ps.expect(".");
      try {
        sig.add_constant(n, ty);
      } catch (const SignatureError& e) {
        throw SyntaxError(SyntaxErrorCode::ParseError, nt.line, nt.column, e.what());
      }
      doc.constants.emplace_back(n, ty);
    } else if (start.is_word("fragment")) {
      ps.next();
      Token ft = ps.peek();
      auto frag = parse_fragment(ps.expect_ident());
      if (!frag) ExprParser::fail(ft, "unknown fragment");
      doc.logic.fragment = *frag;
      doc.logic.allow_fix = false;
      if (ps.accept("+")) {
        if (!ps.peek().is_word("fix")) ExprParser::fail(ps.peek(), "expected 'fix'");
        ps.next();
        doc.logic.allow_fix = true;
      }
      ps.expect(".");
    } else if (start.is_word("define")) {
      ps.next();
      Token nt = ps.peek();
      std::string n = ps.expect_ident();
      if (is_reserved_word(n) || sig.contains(n))
        throw SyntaxError(SyntaxErrorCode::ParseError, nt.line, nt.column, "name '" + n + "' is already in use");
      for (const auto& d : defs)
        if (d.name == n) throw SyntaxError(SyntaxErrorCode::ParseError, nt.line, nt.column, "duplicate definition");
      ps.expect(":");
      SimpleType ty = ps.parse_type();
      ps.expect(":=");
      Token bt = ps.peek();
      std::size_t nfree = ps.free_names().size();
      Term body = ps.parse_term();
      ps.expect(".");
      if (ps.free_names().size() != nfree || body.has_free_vars())
        throw SyntaxError(SyntaxErrorCode::FragmentViolation, bt.line, bt.column, "definition body is not closed");
      try {
        if (typecheck(sig, {}, body) != ty)
          throw SyntaxError(SyntaxErrorCode::TypeError, bt.line, bt.column, "definition body does not have type " + ty.to_string());
      } catch (const TypeError& e) {
        throw SyntaxError(SyntaxErrorCode::TypeError, bt.line, bt.column, e.what());
      }
      if (!all_fix_guarded(body))
        throw SyntaxError(SyntaxErrorCode::TypeError, bt.line, bt.column, "unguarded fixpoint term");
      defs.push_back({n, ty, body});
    } else {
      std::size_t nfree = ps.free_names().size();
      Term t = ps.parse_term();
      ps.expect(".");
      std::vector<std::string> names(ps.free_names().begin() + static_cast<std::ptrdiff_t>(nfree), ps.free_names().end());
      TypeContext ctx = detail::infer_free_types(sig, t, start);
      detail::expect_formula_type(sig, ctx, t, start);
      std::vector<std::pair<std::string, SimpleType>> vars;
      std::set<std::string> present = free_vars(t);
      for (const auto& n : names)
        if (present.count(n)) vars.emplace_back(n, ctx.at(n));
      Formula f = forall_close(Formula(beta_normalize(t)), vars);
      if (!all_fix_guarded(f.term()))
        throw SyntaxError(SyntaxErrorCode::TypeError, start.line, start.column, "unguarded fixpoint term");
      pending.emplace_back(start, f);
    }
  }
  doc.definitions = defs;
  for (const auto& [tok, f] : pending) {
    if (!is_program_clause(doc.logic, sig, f))
      throw SyntaxError(SyntaxErrorCode::FragmentViolation, tok.line, tok.column,
                        "clause is not a program clause of " + doc.logic.name());
    doc.clauses.push_back(f);
  }
  return doc;
}

inline std::string print_theory(const TheoryDocument& doc) {
  std::ostringstream out;
  for (const auto& k : doc.kinds) out << "kind " << k << " type.\n";
  for (const auto& [n, t] : doc.constants) out << "const " << n << " : " << t.to_string() << ".\n";
  out << "fragment " << fragment_name(doc.logic.fragment) << (doc.logic.allow_fix ? " +fix" : "") << ".\n";
  Signature sig = doc.signature();
  std::vector<Definition> earlier;
  for (const auto& d : doc.definitions) {
    out << "define " << d.name << " : " << d.type.to_string() << " := " << print_term(d.body, {&sig, &earlier})
        << ".\n";
    earlier.push_back(d);
  }
  for (const auto& c : doc.clauses) out << print_formula(c, {&sig, &doc.definitions}) << ".\n";
  return out.str();
}

/// A closed goal or atom over the theory's signature and definitions.
inline Formula parse_goal(const std::string& text, const Signature& sig, const std::vector<Definition>& defs = {}) {
  ExprParser ps(tokenize(text), sig, defs, FreeNames::Reject);
  Token start = ps.peek();
  Term t = ps.parse_term();
  if (!ps.at_end()) ExprParser::fail(ps.peek(), "trailing input");
  detail::expect_formula_type(sig, {}, t, start);
  return Formula(beta_normalize(t));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace coup::syntax
