#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace coup::syntax {

enum class SyntaxErrorCode { ParseError, TypeError, FragmentViolation, UnknownRuleLabel };

inline const char* error_name(SyntaxErrorCode c) {
  switch (c) {
    case SyntaxErrorCode::ParseError:
      return "ParseError";
    case SyntaxErrorCode::TypeError:
      return "TypeError";
    case SyntaxErrorCode::FragmentViolation:
      return "FragmentViolation";
    case SyntaxErrorCode::UnknownRuleLabel:
      return "UnknownRuleLabel";
  }
  return "?";
}

/// Diagnostic carrying the position of the first offending token.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(SyntaxErrorCode code, int line, int column, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + error_name(code) + ": " + msg),
        code_(code),
        line_(line),
        column_(column),
        message_(msg) {}

  SyntaxErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  SyntaxErrorCode code_;
  int line_, column_;
  std::string message_;
};

enum class Tok { Ident, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, column = 1;

  bool is(const char* p) const { return kind == Tok::Punct && text == p; }
  bool is_word(const char* w) const { return kind == Tok::Ident && text == w; }
};

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

/// Identifiers are `[a-zA-Z_][a-zA-Z0-9_']*` or a run of digits (numerals
/// such as `0` are ordinary constants). `%` starts a line comment.
inline std::vector<Token> tokenize(const std::string& src, int line0 = 1, int col0 = 1) {
  static const char* puncts[] = {"-->", "]->", "~>", "-[", "->", "=>", ":=", "(", ")", "{", "}", ".", ":",
                                 "&",   ",",   ";",  "\\", "<", ">", "*", "+"};
  std::vector<Token> out;
  int line = line0, col = col0;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (is_ident_start(c)) {
      std::size_t j = i;
      // Hyphenated words such as `co-fix` or `co-hohh` are single identifiers.
      while (j < src.size() && (is_ident_char(src[j]) ||
                                (src[j] == '-' && j + 1 < src.size() && std::isalpha(static_cast<unsigned char>(src[j + 1])))))
        ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      std::string s;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < src.size() && (src[j + 1] == '"' || src[j + 1] == '\\')) ++j;
        s += src[j++];
      }
      if (j >= src.size()) throw SyntaxError(SyntaxErrorCode::ParseError, line, col, "unterminated string");
      t.kind = Tok::String;
      t.text = std::move(s);
      // Keep the position of the string body for nested diagnostics.
      advance(j + 1 - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const char* p : puncts) {
      std::string ps(p);
      if (src.compare(i, ps.size(), ps) == 0) {
        t.kind = Tok::Punct;
        t.text = ps;
        advance(ps.size());
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError(SyntaxErrorCode::ParseError, line, col, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

}  // namespace coup::syntax
