#pragma once

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppkit/exactalg/poly.hpp"

namespace ppkit::cli {

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grammar:
//   expr    := ['+'|'-'] term (('+'|'-') term)*
//   term    := factor (('*' factor) | ('/' literal))*
//   factor  := primary ['^' integer]
//   primary := literal | name | '(' expr ')'
//   literal := integer ['/' integer]
class ExprParser {
 public:
  explicit ExprParser(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = i;
  }

  std::size_t nvars() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  Poly parse(const std::string& text) const {
    State st{text, 0};
    skip(st);
    if (st.pos == text.size()) fail(st, "empty expression");
    Poly p = expr(st);
    skip(st);
    if (st.pos != text.size()) fail(st, std::string("unexpected '") + text[st.pos] + "'");
    return p;
  }

  Q parse_rational(const std::string& text) const {
    Poly p = ExprParser({}).parse(text);
    return p.is_zero() ? Q(0) : p.constant_term();
  }

 private:
  struct State {
    const std::string& s;
    std::size_t pos;
  };

  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;

  [[noreturn]] static void fail(const State& st, const std::string& what) {
    throw ExprError(what + " at column " + std::to_string(st.pos + 1) + " in \"" + st.s + "\"");
  }

  static void skip(State& st) {
    while (st.pos < st.s.size() && std::isspace(static_cast<unsigned char>(st.s[st.pos]))) ++st.pos;
  }

  static bool eat(State& st, char c) {
    skip(st);
    if (st.pos < st.s.size() && st.s[st.pos] == c) {
      ++st.pos;
      return true;
    }
    return false;
  }

  static bool at_digit(const State& st) { return st.pos < st.s.size() && std::isdigit(static_cast<unsigned char>(st.s[st.pos])); }

  static mpz_class integer(State& st) {
    skip(st);
    if (!at_digit(st)) fail(st, "expected an integer");
    std::size_t b = st.pos;
    while (at_digit(st)) ++st.pos;
    if (st.pos < st.s.size() && (st.s[st.pos] == '.' || st.s[st.pos] == 'e' || st.s[st.pos] == 'E'))
      fail(st, "non-rational literal");
    return mpz_class(st.s.substr(b, st.pos - b));
  }

  Q literal(State& st) const {
    Q v(integer(st));
    std::size_t save = st.pos;
    if (eat(st, '/')) {
      skip(st);
      if (!at_digit(st)) {
        st.pos = save;
        return v;
      }
      mpz_class d = integer(st);
      if (d == 0) fail(st, "division by zero");
      v /= Q(d);
      v.canonicalize();
    }
    return v;
  }

  Poly expr(State& st) const {
    Poly acc(nvars());
    bool neg = false;
    skip(st);
    if (eat(st, '-')) neg = true;
    else eat(st, '+');
    Poly t = term(st);
    acc += neg ? -t : t;
    for (;;) {
      if (eat(st, '+')) acc += term(st);
      else if (eat(st, '-')) acc -= term(st);
      else return acc;
    }
  }

  Poly term(State& st) const {
    Poly acc = factor(st);
    for (;;) {
      if (eat(st, '*')) {
        acc = acc * factor(st);
      } else if (eat(st, '/')) {
        skip(st);
        if (!at_digit(st)) fail(st, "division by a non-constant");
        Q d = literal(st);
        if (d == 0) fail(st, "division by zero");
        acc *= Q(1) / d;
      } else {
        return acc;
      }
    }
  }

  Poly factor(State& st) const {
    Poly base = primary(st);
    if (eat(st, '^')) {
      skip(st);
      if (!at_digit(st)) fail(st, "non-polynomial exponent");
      mpz_class e = integer(st);
      std::size_t save = st.pos;
      if (eat(st, '/') || eat(st, '.')) {
        st.pos = save;
        fail(st, "non-polynomial exponent");
      }
      if (e > 64) fail(st, "exponent too large");
      base = base.pow(static_cast<unsigned>(e.get_ui()));
    }
    return base;
  }

  Poly primary(State& st) const {
    skip(st);
    if (st.pos >= st.s.size()) fail(st, "unexpected end of expression");
    char c = st.s[st.pos];
    if (c == '(') {
      ++st.pos;
      Poly p = expr(st);
      if (!eat(st, ')')) fail(st, "expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Poly::constant(nvars(), literal(st));
    if (c == '.') fail(st, "non-rational literal");
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = st.pos;
      while (st.pos < st.s.size() && (std::isalnum(static_cast<unsigned char>(st.s[st.pos])) || st.s[st.pos] == '_')) ++st.pos;
      std::string name = st.s.substr(b, st.pos - b);
      auto it = index_.find(name);
      if (it == index_.end()) {
        st.pos = b;
        fail(st, "unknown variable '" + name + "'");
      }
      return Poly::variable(nvars(), it->second);
    }
    fail(st, std::string("unexpected '") + c + "'");
  }
};

}  // namespace ppkit::cli
