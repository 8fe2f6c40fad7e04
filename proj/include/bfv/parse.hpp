#pragma once

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "bfv/element.hpp"
#include "bfv/poly.hpp"

namespace bfv {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

/// Recursive-descent parser over the shared expression grammar:
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := atom ['^' uint]
///   atom   := uint ['/' uint] | variable | e{i,..} | eps{j,..} | '(' expr ')'
/// Rational literals only; '^' takes a non-negative integer literal.
class ElementParser {
 public:
  ElementParser(std::string text, VarTablePtr table)
      : text_(std::move(text)), table_(std::move(table)) {}

  BFVElement parse() {
    BFVElement e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  BFVElement parse_expr() {
    skip_ws();
    bool negate = false;
    if (peek() == '+' || peek() == '-') negate = (take() == '-');
    BFVElement acc = parse_term();
    if (negate) acc = -acc;
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') break;
      take();
      BFVElement t = parse_term();
      if (c == '-')
        acc -= t;
      else
        acc += t;
    }
    return acc;
  }

  BFVElement parse_term() {
    BFVElement acc = parse_factor();
    for (;;) {
      skip_ws();
      if (peek() != '*') break;
      take();
      acc = acc * parse_factor();
    }
    return acc;
  }

  BFVElement parse_factor() {
    BFVElement base = parse_atom();
    skip_ws();
    if (peek() != '^') return base;
    take();
    skip_ws();
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("exponent must be an integer literal");
    std::uint64_t e = parse_uint();
    if (peek() == '/') fail("non-integer exponent");
    if (e > kMaxTotalDegree) fail("exponent exceeds degree cap");
    BFVElement acc = BFVElement::unit(table_);
    for (std::uint64_t i = 0; i < e; ++i) acc = acc * base;
    return acc;
  }

  BFVElement parse_atom() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      take();
      BFVElement e = parse_expr();
      skip_ws();
      if (peek() != ')') fail("expected ')'");
      take();
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Integer num(parse_uint_str());
      skip_ws();
      if (peek() == '/') {
        take();
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected denominator");
        Integer den(parse_uint_str());
        if (den == 0) fail("zero denominator");
        return BFVElement::from_poly(
            table_, Poly::constant(table_->var_count(), Rational(num, den)));
      }
      return BFVElement::from_poly(table_,
                                   Poly::constant(table_->var_count(), Rational(num)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = parse_name();
      if ((name == "e" || name == "eps") && peek() == '{') return parse_ghost(name == "eps");
      auto idx = table_->index_of(name);
      if (!idx) fail("unknown variable: " + name);
      return BFVElement::from_poly(table_, Poly::variable(table_->var_count(), *idx));
    }
    fail(std::string("unexpected character '") + (c ? std::string(1, c) : "<end>") + "'");
  }

  BFVElement parse_ghost(bool momentum) {
    take();  // '{'
    GhostWord w;
    std::uint32_t prev = 0;
    bool any = false;
    for (;;) {
      skip_ws();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected ghost index");
      std::uint64_t i = parse_uint();
      if (i < 1 || i > table_->fiber_count()) fail("ghost index out of range: " + std::to_string(i));
      if (any && i <= prev) fail("ghost indices must be strictly increasing");
      prev = static_cast<std::uint32_t>(i);
      any = true;
      (momentum ? w.momenta : w.ghosts) |= 1u << (i - 1);
      skip_ws();
      if (peek() == ',') {
        take();
        continue;
      }
      if (peek() == '}') {
        take();
        break;
      }
      fail("expected ',' or '}' in ghost index list");
    }
    BFVElement e(table_);
    e.add_term(w, Poly::constant(table_->var_count(), Rational(1)));
    return e;
  }

  std::string parse_uint_str() {
    std::string s;
    while (std::isdigit(static_cast<unsigned char>(peek()))) s += take();
    return s;
  }

  std::uint64_t parse_uint() {
    std::string s = parse_uint_str();
    if (s.size() > 18) fail("integer literal too large");
    return std::stoull(s);
  }

  std::string parse_name() {
    std::string s;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') s += take();
    return s;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char take() { return text_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " (at position " + std::to_string(pos_) + " in \"" + text_ + "\")");
  }

  std::string text_;
  VarTablePtr table_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline BFVElement element_parse(const std::string& text, VarTablePtr table) {
  return detail::ElementParser(text, std::move(table)).parse();
}

inline Poly poly_parse(const std::string& text, const VarTablePtr& table) {
  BFVElement e = element_parse(text, table);
  for (const auto& [w, c] : e.terms())
    if (!w.empty()) throw ParseError("ghost generator in polynomial context: " + text);
  return e.coefficient(GhostWord{});
}

}  // namespace bfv
