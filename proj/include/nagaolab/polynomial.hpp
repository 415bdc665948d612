#pragma once

// Exact univariate polynomials over Z and Q.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "nagaolab/error.hpp"
#include "nagaolab/finite_field.hpp"

namespace nagaolab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Integer polynomial, constant term first. Trailing zero coefficients are
// stripped on construction, so the zero polynomial has no coefficients.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }
  IntPolynomial(std::initializer_list<i64> coeffs) {
    for (i64 v : coeffs) c_.emplace_back(v);
    trim();
  }

  static IntPolynomial monomial(const BigInt& coeff, std::size_t k) {
    std::vector<BigInt> c(k + 1);
    c[k] = coeff;
    return IntPolynomial(std::move(c));
  }

  bool is_zero() const noexcept { return c_.empty(); }
  // Degree of the zero polynomial is reported as -1.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  const std::vector<BigInt>& coefficients() const noexcept { return c_; }
  BigInt coeff(std::size_t k) const { return k < c_.size() ? c_[k] : BigInt(0); }
  const BigInt& leading() const {
    if (c_.empty()) throw Error(ErrorKind::domain, "zero polynomial has no leading coefficient");
    return c_.back();
  }

  IntPolynomial derivative() const {
    std::vector<BigInt> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * static_cast<unsigned>(k));
    return IntPolynomial(std::move(d));
  }

  BigInt evaluate(const BigInt& x) const {
    BigInt acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  // Coefficients reduced into [0, p).
  std::vector<u64> reduce_mod(u64 p) const {
    std::vector<u64> out(c_.size());
    const BigInt bp = p;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      BigInt r = c_[k] % bp;
      if (r < 0) r += bp;
      out[k] = r.convert_to<u64>();
    }
    return out;
  }

  // Canonical text form, e.g. "x^5 - 3*x + 1".
  std::string to_string(char var = 'x') const {
    if (c_.empty()) return "0";
    std::string out;
    for (int k = degree(); k >= 0; --k) {
      const BigInt& a = c_[static_cast<std::size_t>(k)];
      if (a == 0) continue;
      const bool negative = a < 0;
      const BigInt mag = negative ? BigInt(-a) : a;
      if (out.empty())
        out += negative ? "-" : "";
      else
        out += negative ? " - " : " + ";
      const bool unit = mag == 1 && k > 0;
      if (!unit) out += mag.str();
      if (k > 0) {
        if (!unit) out += '*';
        out += var;
        if (k > 1) out += '^' + std::to_string(k);
      }
    }
    return out;
  }

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return IntPolynomial(std::move(c));
  }

  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
    std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
    return IntPolynomial(std::move(c));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<BigInt> c_;
};

// f(x) mod p by Horner's rule.
inline u64 poly_eval_mod(const IntPolynomial& f, u64 x, u64 p) {
  const auto reduced = f.reduce_mod(p);
  return horner_mod(reduced, x % p, p);
}

// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
inline BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

// Res(f, g) as the determinant of the Sylvester matrix.
inline BigInt resultant(const IntPolynomial& f, const IntPolynomial& g) {
  const int m = f.degree();
  const int n = g.degree();
  if (m < 0 || n < 0) return 0;
  if (m == 0 && n == 0) return 1;
  const std::size_t size = static_cast<std::size_t>(m + n);
  std::vector<std::vector<BigInt>> s(size, std::vector<BigInt>(size));
  // Rows hold coefficients highest degree first.
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= m; ++k) s[row][row + k] = f.coeff(static_cast<std::size_t>(m - k));
  for (int row = 0; row < m; ++row)
    for (int k = 0; k <= n; ++k) s[n + row][row + k] = g.coeff(static_cast<std::size_t>(n - k));
  return bareiss_determinant(std::move(s));
}

// disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lead(f).
inline BigInt discriminant(const IntPolynomial& f) {
  const int n = f.degree();
  if (n < 1) throw Error(ErrorKind::domain, "discriminant needs degree >= 1");
  if (n == 1) return 1;
  BigInt r = resultant(f, f.derivative()) / f.leading();
  return ((n * (n - 1) / 2) % 2) ? BigInt(-r) : r;
}

// Rational polynomial, constant term first.
class RatPolynomial {
 public:
  RatPolynomial() = default;
  explicit RatPolynomial(std::vector<BigRational> coeffs) : c_(std::move(coeffs)) { trim(); }
  explicit RatPolynomial(const IntPolynomial& f) {
    for (const auto& a : f.coefficients()) c_.emplace_back(a);
  }

  bool is_zero() const noexcept { return c_.empty(); }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  const std::vector<BigRational>& coefficients() const noexcept { return c_; }
  BigRational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : BigRational(0); }

  BigRational evaluate(const BigRational& x) const {
    BigRational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  friend RatPolynomial operator*(const RatPolynomial& a, const RatPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigRational> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return RatPolynomial(std::move(c));
  }

  friend RatPolynomial operator+(const RatPolynomial& a, const RatPolynomial& b) {
    std::vector<BigRational> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
    return RatPolynomial(std::move(c));
  }

  friend RatPolynomial operator*(const BigRational& s, const RatPolynomial& a) {
    std::vector<BigRational> c(a.c_);
    for (auto& x : c) x *= s;
    return RatPolynomial(std::move(c));
  }

  friend bool operator==(const RatPolynomial&, const RatPolynomial&) = default;

  // f(g(x)) by Horner's rule in the polynomial ring.
  RatPolynomial compose(const RatPolynomial& g) const {
    RatPolynomial acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * g + RatPolynomial(std::vector<BigRational>{*it});
    return acc;
  }

  // Least common multiple of the coefficient denominators.
  BigInt denominator_lcm() const {
    BigInt l = 1;
    for (const auto& a : c_) {
      const BigInt d = boost::multiprecision::denominator(a);
      l = l / boost::multiprecision::gcd(l, d) * d;
    }
    return l;
  }

  // Exact conversion; throws if any coefficient is not integral.
  IntPolynomial to_integral() const {
    std::vector<BigInt> out;
    for (const auto& a : c_) {
      if (boost::multiprecision::denominator(a) != 1)
        throw Error(ErrorKind::domain, "polynomial has non-integral coefficients");
      out.push_back(boost::multiprecision::numerator(a));
    }
    return IntPolynomial(std::move(out));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<BigRational> c_;
};

}  // namespace nagaolab
