#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "coup/kernel.hpp"
#include "coup/proof.hpp"
#include "coup/syntax/lexer.hpp"
#include "coup/syntax/parser.hpp"
#include "coup/syntax/printer.hpp"

namespace coup::syntax {

/// Lemma proofs (each a co-fix tree, checked and registered in order) followed
/// by the main proof.
struct Certificate {
  std::vector<ProofNode> lemmas;
  ProofNode main;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

// ---------------------------------------------------------------------------
// Sequents
//
//   Z:i, S; P, <M>, h --> <G>        main sequent, newest eigenvariable first
//   Z:i, S; P, <M> -[ D ]-> A        focused sequent
//   S; P ~> M                        coinductive root

namespace detail {

/// Σ plus eigenvariables, tolerating names that clash (the kernel reports those).
inline Signature lenient_extension(const Signature& base, const std::vector<Eigenvariable>& eigen) {
  Signature s = base;
  for (const auto& [n, t] : eigen) {
    if (s.contains(n) || is_reserved_word(n)) continue;
    try {
      s.add_constant(n, t);
    } catch (const SignatureError&) {
    }
  }
  return s;
}

inline std::string print_marked(const MarkedFormula& m, const PrintContext& ctx) {
  std::string s = print_formula(m.formula, ctx);
  return m.guarded ? "<" + s + ">" : s;
}

}  // namespace detail

inline std::string print_sequent(const Sequent& s, const Program& base) {
  Signature sig = detail::lenient_extension(base.sig, s.eigen);
  PrintContext ctx{&sig, &base.definitions};
  std::string out;
  for (auto it = s.eigen.rbegin(); it != s.eigen.rend(); ++it) out += it->first + ":" + it->second.to_string() + ", ";
  out += "S; P";
  for (const auto& h : s.hyps) out += ", " + detail::print_marked(h, ctx);
  switch (s.kind) {
    case SequentKind::Root:
      out += " ~> " + print_formula(s.goal.formula, ctx);
      break;
    case SequentKind::Main:
      out += " --> " + detail::print_marked(s.goal, ctx);
      break;
    case SequentKind::Focused:
      out += " -[ " + print_formula(s.focus, ctx) + " ]-> " + detail::print_marked(s.goal, ctx);
      break;
  }
  return out;
}

namespace detail {

class SequentReader {
 public:
  SequentReader(const Token& str, const Program& base) : base_(base), str_(str) {}

  Sequent read() {
    auto toks = tokenize(str_.text, str_.line, str_.column + 1);
    std::vector<Eigenvariable> eigen;
    std::size_t i = 0;
    ExprParser tp(toks, base_.sig, base_.definitions);
    while (toks[i].kind == Tok::Ident && toks[i].text != "S" && toks[i + 1].is(":")) {
      tp.seek(i + 2);
      SimpleType ty = tp.parse_type();
      eigen.emplace_back(toks[i].text, ty);
      i = tp.position();
      if (!toks[i].is(",")) ExprParser::fail(toks[i], "expected ','");
      ++i;
    }
    std::reverse(eigen.begin(), eigen.end());
    Signature sig = lenient_extension(base_.sig, eigen);
    ExprParser ps(std::vector<Token>(toks.begin() + static_cast<std::ptrdiff_t>(i), toks.end()), sig,
                  base_.definitions, FreeNames::Variables);
    ps.set_comma_conjunction(false);
    if (!ps.peek().is_word("S")) ExprParser::fail(ps.peek(), "expected 'S'");
    ps.next();
    ps.expect(";");
    if (!ps.peek().is_word("P")) ExprParser::fail(ps.peek(), "expected 'P'");
    ps.next();
    std::vector<MarkedFormula> hyps;
    while (ps.accept(",")) hyps.push_back(marked(ps));
    Sequent s;
    if (ps.accept("~>")) {
      s = Sequent::root(formula(ps));
      s.hyps = hyps;
      s.eigen = eigen;
    } else if (ps.accept("-->")) {
      s = Sequent::main(eigen, hyps, marked(ps));
    } else if (ps.accept("-[")) {
      Formula focus = formula(ps);
      ps.expect("]->");
      s = Sequent::focused(eigen, hyps, focus, marked(ps));
    } else {
      ExprParser::fail(ps.peek(), "expected '-->', '~>' or '-['");
    }
    if (!ps.at_end()) ExprParser::fail(ps.peek(), "trailing input in sequent");
    return s;
  }

 private:
  static Formula formula(ExprParser& ps) { return Formula(beta_normalize(ps.parse_term())); }
  static MarkedFormula marked(ExprParser& ps) {
    if (ps.accept("<")) {
      Formula f = formula(ps);
      ps.expect(">");
      return {f, true};
    }
    return {formula(ps), false};
  }

  const Program& base_;
  const Token& str_;
};

}  // namespace detail

inline Sequent parse_sequent(const std::string& text, const Program& base) {
  Token t;
  t.kind = Tok::String;
  t.text = text;
  t.column = 0;
  return detail::SequentReader(t, base).read();
}

// ---------------------------------------------------------------------------
// Proof trees:  (LABEL {payload} "sequent" premise...)
// payload: {} | {clause:N} | {lemma:N} | {hyp:N} | {witness:"TERM"} | {eigen:"NAME:TYPE"}

namespace detail {

inline std::string print_payload(const Payload& p, const Sequent& concl, const Program& base) {
  if (p.clause) {
    const char* tag = p.clause->source == ClauseRef::Source::Clause  ? "clause"
                      : p.clause->source == ClauseRef::Source::Lemma ? "lemma"
                                                                     : "hyp";
    return std::string("{") + tag + ":" + std::to_string(p.clause->index) + "}";
  }
  if (p.eigen) return "{eigen:\"" + p.eigen->first + ":" + p.eigen->second.to_string() + "\"}";
  if (p.witness) {
    Signature sig = lenient_extension(base.sig, concl.eigen);
    return "{witness:\"" + print_term(*p.witness, {&sig, &base.definitions}) + "\"}";
  }
  return "{}";
}

inline void print_node(const ProofNode& n, const Program& base, int indent, std::ostringstream& out) {
  out << std::string(static_cast<std::size_t>(indent), ' ') << "(" << rule_label(n.rule) << " "
      << print_payload(n.data, n.conclusion, base) << " \"" << print_sequent(n.conclusion, base) << "\"";
  for (const auto& p : n.premises) {
    out << "\n";
    print_node(p, base, indent + 2, out);
  }
  out << ")";
}

class CertificateReader {
 public:
  CertificateReader(const std::string& text, const Program& base) : toks_(tokenize(text)), base_(base) {}

  Certificate read() {
    Certificate c;
    while (peek().is("(") && peek(1).is_word("lemma")) {
      pos_ += 2;
      c.lemmas.push_back(node());
      expect(")");
    }
    c.main = node();
    if (peek().kind != Tok::End) ExprParser::fail(peek(), "trailing input after the proof tree");
    return c;
  }

  ProofNode node() {
    expect("(");
    const Token& lt = peek();
    if (lt.kind != Tok::Ident) ExprParser::fail(lt, "expected a rule label");
    std::string label = lt.text;
    ++pos_;
    if (peek().is("<") && peek(1).is(">")) {
      label += "<>";
      pos_ += 2;
    }
    auto rule = rule_from_label(label);
    if (!rule) throw SyntaxError(SyntaxErrorCode::UnknownRuleLabel, lt.line, lt.column, "unknown rule label '" + label + "'");
    ProofNode n;
    n.rule = *rule;

    expect("{");
    std::string key;
    Token value;
    if (!peek().is("}")) {
      if (peek().kind != Tok::Ident) ExprParser::fail(peek(), "expected a payload key");
      key = toks_[pos_++].text;
      expect(":");
      value = toks_[pos_++];
    }
    expect("}");

    if (peek().kind != Tok::String) ExprParser::fail(peek(), "expected a quoted sequent");
    const Token& st = toks_[pos_++];
    n.conclusion = SequentReader(st, base_).read();

    if (key == "clause" || key == "lemma" || key == "hyp") {
      if (value.kind != Tok::Ident || value.text.empty() ||
          !std::all_of(value.text.begin(), value.text.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        ExprParser::fail(value, "expected an index");
      ClauseRef r;
      r.source = key == "clause" ? ClauseRef::Source::Clause
                 : key == "lemma" ? ClauseRef::Source::Lemma
                                  : ClauseRef::Source::Hyp;
      r.index = std::stoul(value.text);
      n.data.clause = r;
    } else if (key == "witness") {
      if (value.kind != Tok::String) ExprParser::fail(value, "expected a quoted witness");
      Signature sig = lenient_extension(base_.sig, n.conclusion.eigen);
      ExprParser wp(tokenize(value.text, value.line, value.column + 1), sig, base_.definitions, FreeNames::Variables);
      Term w = beta_normalize(wp.parse_term());
      if (!wp.at_end()) ExprParser::fail(wp.peek(), "trailing input in witness");
      n.data.witness = w;
    } else if (key == "eigen") {
      if (value.kind != Tok::String) ExprParser::fail(value, "expected a quoted eigenvariable");
      ExprParser ep(tokenize(value.text, value.line, value.column + 1), base_.sig, base_.definitions);
      std::string name = ep.expect_ident();
      ep.expect(":");
      SimpleType ty = ep.parse_type();
      if (!ep.at_end()) ExprParser::fail(ep.peek(), "trailing input in eigenvariable");
      n.data.eigen = Eigenvariable{name, ty};
    } else if (!key.empty()) {
      ExprParser::fail(value, "unknown payload key '" + key + "'");
    }

    while (peek().is("(")) n.premises.push_back(node());
    expect(")");
    return n;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  void expect(const char* p) {
    if (!peek().is(p)) ExprParser::fail(peek(), std::string("expected '") + p + "'");
    ++pos_;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Program& base_;
};

}  // namespace detail

inline std::string print_proof(const ProofNode& n, const Program& base) {
  std::ostringstream out;
  detail::print_node(n, base, 0, out);
  return out.str();
}

inline std::string print_certificate(const Certificate& c, const Program& base) {
  std::ostringstream out;
  for (const auto& l : c.lemmas) {
    out << "(lemma\n";
    detail::print_node(l, base, 2, out);
    out << ")\n";
  }
  detail::print_node(c.main, base, 0, out);
  out << "\n";
  return out.str();
}

inline Certificate parse_certificate(const std::string& text, const Program& base) {
  return detail::CertificateReader(text, base).read();
}

inline ProofNode parse_proof(const std::string& text, const Program& base) {
  Certificate c = parse_certificate(text, base);
  return c.main;
}

/// Checks each lemma proof in order, registering it, then the main proof.
inline CheckReport check_certificate(const Program& base, const Certificate& cert, const CheckOptions& opts = {}) {
  Program p = base;
  for (const auto& l : cert.lemmas) {
    CheckReport r = check_proof(p.logic, p, l, opts);
    if (!r.accepted) return r;
    p = register_lemma(p, l.conclusion.goal.formula, l, opts);
  }
  return check_proof(p.logic, p, cert.main, opts);
}

}  // namespace coup::syntax
