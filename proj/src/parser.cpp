#include "pbisim/parser.hpp"

#include <cctype>

namespace pbisim {

ParseError::ParseError(std::size_t line, std::size_t column, std::string token, const std::string& what)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + " near '" +
                         token + "': " + what),
      line_(line), column_(column), token_(std::move(token)) {}

namespace {

class Parser {
public:
  explicit Parser(std::string_view s) : s_(s) {}

  NdTerm nd_top() {
    NdTerm e = ndterm();
    expect_end();
    return e;
  }
  PTerm p_top() {
    PTerm p = pterm();
    expect_end();
    return p;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string token_at(std::size_t p) const {
    if (p >= s_.size()) return "<end>";
    char c = s_[p];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t q = p;
      while (q < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[q])) || s_[q] == '_' || s_[q] == '/')) ++q;
      return std::string(s_.substr(p, q - p));
    }
    if (c == '+' && p + 1 < s_.size() && s_[p + 1] == '[') return "+[";
    return std::string(1, c);
  }

  [[noreturn]] void fail_at(std::size_t p, const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < p && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    ParseError err(line, col, token_at(p), what);
    err.set_offset(p);
    throw err;
  }
  [[noreturn]] void fail(const std::string& what) {
    skip();
    fail_at(pos_, what);
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool peek2(char a, char b) {
    skip();
    return pos_ + 1 < s_.size() && s_[pos_] == a && s_[pos_ + 1] == b;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void expect_end() {
    if (peek() != '\0') fail("unexpected trailing input");
  }

  NdTerm ndterm() {
    NdTerm first = summand();
    if (peek() == '+' && !peek2('+', '[')) {
      ++pos_;
      NdTerm rest = ndterm();
      return NdTerm::sum(first, rest);
    }
    return first;
  }

  NdTerm summand() {
    char c = peek();
    if (c == '0') {
      std::size_t start = pos_;
      ++pos_;
      if (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) fail_at(start, "expected summand");
      return NdTerm::zero();
    }
    if (c == '(') {
      ++pos_;
      NdTerm e = ndterm();
      expect(')');
      return e;
    }
    if (c >= 'a' && c <= 'z') {
      Action a = action();
      expect('.');
      PTerm body = patom();
      return NdTerm::prefix(a, body);
    }
    fail("expected summand ('0', action prefix or '(')");
  }

  Action action() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::islower(static_cast<unsigned char>(s_[pos_])) ||
                                std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name(s_.substr(start, pos_ - start));
    if (name == "tau") return Action::tau();
    return Action(name);
  }

  PTerm patom() {
    char c = peek();
    if (c == 'D') {
      ++pos_;
      expect('(');
      NdTerm e = ndterm();
      expect(')');
      return PTerm::dirac(e);
    }
    if (c == '(') {
      ++pos_;
      PTerm p = pterm();
      expect(')');
      return p;
    }
    fail("expected 'D(' or '('");
  }

  PTerm pterm() {
    PTerm first = patom();
    if (peek2('+', '[')) {
      pos_ += 2;
      skip();
      std::size_t rstart = pos_;
      Rational r = rational();
      if (r.sign() <= 0 || r >= Rational(1)) fail_at(rstart, "choice weight must lie strictly between 0 and 1");
      expect(']');
      PTerm rest = pterm();
      return PTerm::choice(first, r, rest);
    }
    return first;
  }

  Rational rational() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
    std::string_view txt = s_.substr(start, pos_ - start);
    try {
      return Rational::parse(txt);
    } catch (const std::exception&) {
      fail_at(start, "malformed rational");
    }
  }
};

}  // namespace

NdTerm parse_nd(std::string_view text) { return Parser(text).nd_top(); }
PTerm parse_p(std::string_view text) { return Parser(text).p_top(); }

std::variant<NdTerm, PTerm> parse_any(std::string_view text) {
  try {
    return parse_p(text);
  } catch (const ParseError& pe) {
    try {
      return parse_nd(text);
    } catch (const ParseError& ne) {
      if (pe.offset() >= ne.offset()) throw pe;
      throw;
    }
  }
}

}  // namespace pbisim
