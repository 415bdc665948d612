#pragma once

// Text forms of polynomials and Moebius transforms.
//
//   polynomial := ['+'|'-'] term (('+'|'-') term)*
//   term       := integer ['*'] var ['^' integer] | integer | var ['^' integer]
//   var        := 'x' | 'T'   (one variable per polynomial)
//
// Whitespace is ignored between tokens. Columns in error messages are 1-based.

#include <cctype>
#include <map>
#include <string>
#include <string_view>

#include "nagaolab/error.hpp"
#include "nagaolab/polynomial.hpp"
#include "nagaolab/twist_surface.hpp"

namespace nagaolab {

namespace detail {

class PolynomialScanner {
 public:
  explicit PolynomialScanner(std::string_view text) : text_(text) {}

  IntPolynomial parse() {
    skip_ws();
    if (at_end()) fail("empty polynomial");
    std::map<std::size_t, BigInt> terms;
    bool first = true;
    while (true) {
      skip_ws();
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      auto [coeff, power] = term();
      terms[power] += sign * coeff;
      first = false;
      skip_ws();
      if (at_end()) break;
    }
    std::vector<BigInt> c(terms.empty() ? 0 : terms.rbegin()->first + 1);
    for (auto& [k, v] : terms) c[k] = v;
    return IntPolynomial(std::move(c));
  }

  char variable() const noexcept { return var_; }

 private:
  std::pair<BigInt, std::size_t> term() {
    BigInt coeff = 1;
    bool have_coeff = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coeff = integer("coefficient");
      have_coeff = true;
      skip_ws();
      if (peek() == '.') fail("non-integer coefficient");
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (!is_var(peek())) fail("expected variable after '*'");
      }
    }
    if (!is_var(peek())) {
      if (!have_coeff) fail(at_end() ? "unexpected end of input" : std::string("unexpected '") + peek() + "'");
      return {coeff, 0};
    }
    if (var_ == 0) var_ = peek();
    if (peek() != var_) fail(std::string("mixed variables '") + var_ + "' and '" + peek() + "'");
    ++pos_;
    skip_ws();
    std::size_t power = 1;
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t exponent_col = pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a non-negative integer exponent");
      const BigInt e = integer("exponent");
      if (peek() == '.') fail_at(exponent_col, "exponent must be a non-negative integer");
      if (e > 4096) fail_at(exponent_col, "exponent too large");
      power = e.convert_to<std::size_t>();
    }
    return {coeff, power};
  }

  BigInt integer(const char* what) {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return BigInt(std::string(text_.substr(start, pos_ - start)));
  }

  static bool is_var(char c) { return c == 'x' || c == 'T'; }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& msg) const {
    throw Error(ErrorKind::parse, "syntax error at column " + std::to_string(pos + 1) + ": " + msg + " in \"" +
                                      std::string(text_) + "\"");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  char var_ = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string_view strip_parens(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') return trim(s.substr(1, s.size() - 2));
  return s;
}

}  // namespace detail

inline IntPolynomial parse_polynomial(std::string_view text) { return detail::PolynomialScanner(text).parse(); }

// "(a x + b)/(c x + d)", or any linear numerator/denominator such as "1/x".
// A missing denominator means 1.
inline MobiusTransform parse_mobius(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view top = detail::strip_parens(text.substr(0, slash));
  const std::string_view bottom = slash == std::string_view::npos ? "1" : detail::strip_parens(text.substr(slash + 1));
  const IntPolynomial num = parse_polynomial(top);
  const IntPolynomial den = parse_polynomial(bottom);
  if (num.degree() > 1 || den.degree() > 1)
    throw Error(ErrorKind::parse, "transform \"" + std::string(text) + "\" must be a ratio of linear forms");
  if (den.is_zero()) throw Error(ErrorKind::parse, "transform \"" + std::string(text) + "\" has zero denominator");
  try {
    return MobiusTransform::make(num.coeff(1), num.coeff(0), den.coeff(1), den.coeff(0));
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, "transform \"" + std::string(text) + "\": " + e.what());
  }
}

}  // namespace nagaolab
