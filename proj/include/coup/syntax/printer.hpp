#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "coup/formula.hpp"
#include "coup/term.hpp"

namespace coup::syntax {

/// Names the printer must not reuse for binders, plus definitions to fold.
struct PrintContext {
  const Signature* sig = nullptr;
  const std::vector<Definition>* definitions = nullptr;
};

namespace detail {

enum Level { kExpr = 0, kDisj = 1, kConj = 2, kApp = 3, kArg = 4 };

class TermPrinter {
 public:
  TermPrinter(const PrintContext& ctx, const Term& whole) : ctx_(ctx) {
    collect_fvars(whole, taken_);
    if (ctx.sig)
      for (const auto& [n, _] : ctx.sig->constants()) taken_.insert(n);
    if (ctx.definitions)
      for (const auto& d : *ctx.definitions) taken_.insert(d.name);
  }

  std::string print(const Term& t, int level) {
    if (auto d = folded(t)) return *d;
    Formula f(t);
    switch (f.kind()) {
      case FormulaKind::Top:
        return "true";
      case FormulaKind::Implies:
        return paren(level > kExpr, print(f.left().term(), kDisj) + " => " + print(f.right().term(), kExpr));
      case FormulaKind::Or:
        return paren(level > kDisj, print(f.left().term(), kDisj) + " ; " + print(f.right().term(), kConj));
      case FormulaKind::And:
        return paren(level > kConj, print(f.left().term(), kConj) + " & " + print(f.right().term(), kApp));
      case FormulaKind::Forall:
      case FormulaKind::Exists:
        if (t.arg().is(TermKind::Lam))
          return binder(f.is(FormulaKind::Forall) ? "forall " : "exists ", t.arg(), level);
        break;
      case FormulaKind::Atom:
        break;
    }
    switch (t.kind()) {
      case TermKind::BVar:
        return names_[names_.size() - 1 - t.index()];
      case TermKind::FVar:
      case TermKind::Const:
        return t.name();
      case TermKind::Lam:
        return binder("\\", t, level);
      case TermKind::Fix:
        return binder("fix \\", t, level);
      case TermKind::App: {
        std::string s = print(t.head(), kApp);
        for (const auto& a : t.args()) s += " " + print(a, kArg);
        return paren(level > kApp, s);
      }
    }
    return "?";
  }

 private:
  static std::string paren(bool on, const std::string& s) { return on ? "(" + s + ")" : s; }

  std::optional<std::string> folded(const Term& t) const {
    if (!ctx_.definitions || !t.has_fix() || t.loose_bound() != 0) return std::nullopt;
    for (const auto& d : *ctx_.definitions)
      if (d.body.size() == t.size() && d.body == t) return d.name;
    return std::nullopt;
  }

  std::string fresh(const std::string& hint) {
    std::string base;
    for (char c : hint)
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') base += c;
    if (base.empty() || !(std::isalpha(static_cast<unsigned char>(base[0])) || base[0] == '_')) base = "x";
    auto clash = [&](const std::string& n) {
      if (taken_.count(n) || is_reserved_word(n) || n == "lemma") return true;
      for (const auto& s : names_)
        if (s == n) return true;
      return false;
    };
    if (!clash(base)) return base;
    for (int i = 1;; ++i)
      if (!clash(base + std::to_string(i))) return base + std::to_string(i);
  }

  std::string binder(const char* intro, const Term& b, int level) {
    std::string n = fresh(b.name());
    std::string head = std::string(intro) + n + ":" + b.binder_type().to_string() + ". ";
    names_.push_back(n);
    std::string body = print(b.body(), kExpr);
    names_.pop_back();
    return paren(level > kExpr, head + body);
  }

  const PrintContext& ctx_;
  std::set<std::string> taken_;
  std::vector<std::string> names_;
};

}  // namespace detail

/// Surface syntax for a closed-or-free term (loose bound indices are not
/// allowed). Binder names are chosen so the output parses back to an
/// α-equivalent term.
inline std::string print_term(const Term& t, const PrintContext& ctx = {}) {
  return detail::TermPrinter(ctx, t).print(t, detail::kExpr);
}
inline std::string print_formula(const Formula& f, const PrintContext& ctx = {}) { return print_term(f.term(), ctx); }

}  // namespace coup::syntax
