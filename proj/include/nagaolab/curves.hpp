#pragma once

// Hyperelliptic models y^2 = f(x), their bad primes, Frobenius traces and
// genus-2 L-polynomials.
//
// Trace convention: a_p = p + 1 - #C(F_p) for the smooth projective model,
// in both genera. The stored value is the sum of the Frobenius eigenvalues,
// i.e. minus the linear coefficient of det(1 - T Frob).

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nagaolab/error.hpp"
#include "nagaolab/finite_field.hpp"
#include "nagaolab/polynomial.hpp"
#include "nagaolab/sweep.hpp"

namespace nagaolab {

// Why a prime was excluded from a sweep.
enum class BadReason { two, leading, discriminant };

inline const char* to_string(BadReason r) {
  switch (r) {
    case BadReason::two: return "p=2";
    case BadReason::leading: return "lead";
    case BadReason::discriminant: return "disc";
  }
  return "?";
}

// y^2 = f(x) with f squarefree over Q. The bad set S is every prime dividing
// 2 * lead(f) * disc(f); it is represented by a membership test rather than
// an explicit factorisation of the discriminant.
class CurveSpec {
 public:
  const IntPolynomial& f() const noexcept { return f_; }
  int degree() const noexcept { return f_.degree(); }
  int genus() const noexcept { return (f_.degree() - 1) / 2; }
  const BigInt& discriminant() const noexcept { return disc_; }

  std::optional<BadReason> bad_reason(u64 p) const {
    if (p == 2) return BadReason::two;
    const BigInt bp = p;
    if (f_.leading() % bp == 0) return BadReason::leading;
    if (disc_ % bp == 0) return BadReason::discriminant;
    return std::nullopt;
  }

  bool is_bad(u64 p) const { return bad_reason(p).has_value(); }

  // Bad primes below the bound, ascending.
  std::vector<Prime> bad_primes_below(u64 bound) const {
    std::vector<Prime> out;
    for (Prime p : primes_in(2, bound))
      if (is_bad(p)) out.push_back(p);
    return out;
  }

  // Models of any degree >= 3; used for the twisting curve y^2 = D(T).
  static CurveSpec hyperelliptic(IntPolynomial f) {
    if (f.degree() < 3)
      throw Error(ErrorKind::bad_curve, "curve needs deg f >= 3, got " + std::to_string(f.degree()));
    BigInt disc = nagaolab::discriminant(f);
    if (disc == 0)
      throw Error(ErrorKind::bad_curve, "f = " + f.to_string() + " has a repeated root (discriminant 0)");
    return CurveSpec(std::move(f), std::move(disc));
  }

 private:
  CurveSpec(IntPolynomial f, BigInt disc) : f_(std::move(f)), disc_(std::move(disc)) {}

  IntPolynomial f_;
  BigInt disc_;
};

// Genus 1 or 2 curve from a polynomial of degree 3..6.
inline CurveSpec curve_from_poly(IntPolynomial f) {
  const int d = f.degree();
  if (d < 3 || d > 6)
    throw Error(ErrorKind::bad_curve, "curve polynomial must have degree 3..6, got " + std::to_string(d));
  return CurveSpec::hyperelliptic(std::move(f));
}

struct TraceRecord {
  Prime p;
  i64 a;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

namespace detail {

inline void require_good(const CurveSpec& c, u64 p) {
  if (auto r = c.bad_reason(p))
    throw Error(ErrorKind::bad_prime,
                "p = " + std::to_string(p) + " is a bad prime (" + to_string(*r) + ") for y^2 = " + c.f().to_string());
}

// Hasse-Weil: |a| <= 2g sqrt(p), checked in integers as a^2 <= 4 g^2 p.
inline void check_weil_bound(const CurveSpec& c, u64 p, i64 a) {
  const u128 g = static_cast<u128>(c.genus());
  const u128 lhs = static_cast<u128>(a < 0 ? -a : a) * static_cast<u128>(a < 0 ? -a : a);
  if (lhs > 4 * g * g * p)
    throw Error(ErrorKind::internal, "trace " + std::to_string(a) + " at p = " + std::to_string(p) +
                                         " violates the Weil bound; point count is wrong");
}

}  // namespace detail

// Trace at a good odd prime from the character sum
//   a = -sum_x chi(f(x)) - [deg f even] chi(lead f),
// the second term counting the 1 + chi(lead) points at infinity of an even
// degree model. The residue table must belong to p.
inline i64 trace_with_table(const CurveSpec& c, const ResidueTable& table) {
  const u64 p = table.modulus();
  const auto coeffs = c.f().reduce_mod(p);
  i64 a = -character_sum_reduced(coeffs, table);
  if (c.degree() % 2 == 0) a -= table.chi(coeffs.back());
  return a;
}

inline TraceRecord trace(const CurveSpec& c, Prime p) {
  detail::require_good(c, p);
  const auto table = ResidueTable::make(p);
  const i64 a = trace_with_table(c, table);
  detail::check_weil_bound(c, p, a);
  return {p, a};
}

inline TraceRecord trace_elliptic(const CurveSpec& c, Prime p) {
  if (c.genus() != 1) throw Error(ErrorKind::domain, "trace_elliptic needs a genus 1 curve");
  return trace(c, p);
}

inline TraceRecord trace_genus2(const CurveSpec& c, Prime p) {
  if (c.genus() != 2) throw Error(ErrorKind::domain, "trace_genus2 needs a genus 2 curve");
  return trace(c, p);
}

// Traces at every good odd prime in [lo, hi), ascending.
inline std::vector<TraceRecord> trace_sweep(const CurveSpec& c, u64 lo, u64 hi, unsigned workers = 1) {
  const auto primes = primes_in(std::max<u64>(lo, 3), hi);
  auto res = sweep_primes<TraceRecord>(primes, workers, [&](Prime p) -> std::optional<TraceRecord> {
    if (c.is_bad(p)) return std::nullopt;
    const i64 a = trace_with_table(c, ResidueTable::make(p));
    detail::check_weil_bound(c, p, a);
    return TraceRecord{p, a};
  });
  return std::move(res.values);
}

// Point count by brute force over every pair (x, y), plus the points at
// infinity found by solving y^2 = lead(f) directly for even degree. Shares no
// code with the character-sum path. Test oracle: O(p^2).
inline TraceRecord trace_oracle_exhaustive(const CurveSpec& c, Prime p) {
  if (p.value() >= 10000) throw Error(ErrorKind::cap_exceeded, "exhaustive oracle limited to p < 10^4");
  detail::require_good(c, p);
  const u64 q = p.value();
  std::vector<u64> square_of(q);
  for (u64 y = 0; y < q; ++y) square_of[y] = y * y % q;
  const auto coeffs = c.f().reduce_mod(q);
  u64 count = 0;
  for (u64 x = 0; x < q; ++x) {
    u64 fx = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) fx = (fx * x + *it) % q;
    for (u64 y = 0; y < q; ++y)
      if (square_of[y] == fx) ++count;
  }
  if (c.degree() % 2 == 1) {
    count += 1;
  } else {
    const u64 lead = coeffs.back();
    for (u64 y = 0; y < q; ++y)
      if (square_of[y] == lead) ++count;
  }
  return {p, static_cast<i64>(q + 1) - static_cast<i64>(count)};
}

// theta in [0, pi] with cos(theta) = a / (2 sqrt p). Genus 1 only.
inline double normalized_angle(const TraceRecord& t) {
  const double p = static_cast<double>(t.p.value());
  if (static_cast<u128>(t.a < 0 ? -t.a : t.a) * static_cast<u128>(t.a < 0 ? -t.a : t.a) > 4 * static_cast<u128>(t.p.value()))
    throw Error(ErrorKind::internal,
                "trace " + std::to_string(t.a) + " exceeds 2 sqrt(" + std::to_string(t.p.value()) + ")");
  return std::acos(std::clamp(static_cast<double>(t.a) / (2.0 * std::sqrt(p)), -1.0, 1.0));
}

// L_p(T) = 1 - a T + b T^2 - p a T^3 + p^2 T^4, with a the sum of the four
// Frobenius eigenvalues and b the sum of their pairwise products.
struct LPolynomial2 {
  Prime p;
  i64 a;
  i64 b;

  // Coefficients of det(1 - T Frob), constant term first.
  std::array<i64, 5> l_coefficients() const {
    const i64 q = static_cast<i64>(p.value());
    return {1, -a, b, -q * a, q * q};
  }

  // The characteristic polynomial x^4 - a x^3 + b x^2 - p a x + p^2 splits as
  // (x^2 - s1 x + p)(x^2 - s2 x + p) with s1 + s2 = a, s1 s2 = b - 2p. All four
  // roots have modulus sqrt(p) iff s1, s2 are real and lie in [-2 sqrt p, 2 sqrt p].
  bool satisfies_weil_bounds(double tol = 1e-9) const {
    const double q = static_cast<double>(p.value());
    const double disc = static_cast<double>(a) * a - 4.0 * (static_cast<double>(b) - 2.0 * q);
    if (disc < -tol) return false;
    const double r = std::sqrt(std::max(disc, 0.0));
    const double bound = 2.0 * std::sqrt(q) * (1 + tol);
    return std::abs((a + r) / 2) <= bound && std::abs((a - r) / 2) <= bound;
  }

  friend bool operator==(const LPolynomial2&, const LPolynomial2&) = default;
};

inline constexpr u64 kDefaultLPolyCap = 10000;

namespace detail {

// F_p[s]/(s^2 - n) for a non-residue n.
struct QuadraticExtension {
  u64 p;
  u64 n;

  struct Elem {
    u64 u, v;  // u + v s
  };

  Elem mul(Elem x, Elem y) const {
    return {add_mod(mul_mod(x.u, y.u, p), mul_mod(n, mul_mod(x.v, y.v, p), p), p),
            add_mod(mul_mod(x.u, y.v, p), mul_mod(x.v, y.u, p), p)};
  }
  Elem add(Elem x, u64 c) const { return {add_mod(x.u, c, p), x.v}; }
  u64 norm(Elem x) const { return sub_mod(mul_mod(x.u, x.u, p), mul_mod(n, mul_mod(x.v, x.v, p), p), p); }
};

inline u64 least_nonresidue(const ResidueTable& table) {
  for (u64 n = 2; n < table.modulus(); ++n)
    if (table.chi(n) == -1) return n;
  throw Error(ErrorKind::internal, "no quadratic non-residue found");
}

}  // namespace detail

// #C(F_{p^2}) by exhaustive evaluation over the degree-2 extension. An
// element z is a square in F_{p^2} iff its norm is a square in F_p.
inline u64 count_points_quadratic_extension(const CurveSpec& c, const ResidueTable& table) {
  const u64 p = table.modulus();
  const detail::QuadraticExtension ext{p, detail::least_nonresidue(table)};
  const auto coeffs = c.f().reduce_mod(p);
  i64 char_sum = 0;
  for (u64 u = 0; u < p; ++u) {
    for (u64 v = 0; v < p; ++v) {
      detail::QuadraticExtension::Elem z{u, v}, acc{0, 0};
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = ext.add(ext.mul(acc, z), *it);
      char_sum += table.chi(ext.norm(acc));
    }
  }
  // lead(f) lies in F_p and is therefore a square in F_{p^2}.
  const u64 at_infinity = c.degree() % 2 == 1 ? 1 : 2;
  return static_cast<u64>(static_cast<i64>(p * p) + char_sum) + at_infinity;
}

inline LPolynomial2 l_polynomial_genus2(const CurveSpec& c, Prime p, u64 cap = kDefaultLPolyCap) {
  if (c.genus() != 2) throw Error(ErrorKind::domain, "l_polynomial_genus2 needs a genus 2 curve");
  detail::require_good(c, p);
  if (p.value() > cap)
    throw Error(ErrorKind::cap_exceeded,
                "p = " + std::to_string(p.value()) + " exceeds the L-polynomial cap " + std::to_string(cap));
  const auto table = ResidueTable::make(p);
  const i64 a = trace_with_table(c, table);
  detail::check_weil_bound(c, p, a);
  const i64 q = static_cast<i64>(p.value());
  const i64 n2 = static_cast<i64>(count_points_quadratic_extension(c, table));
  // sum of squared eigenvalues = p^2 + 1 - #C(F_{p^2}) = a^2 - 2b
  const i64 power_sum2 = q * q + 1 - n2;
  const i64 twice_b = a * a - power_sum2;
  if (twice_b % 2 != 0) throw Error(ErrorKind::internal, "odd 2b in L-polynomial; point counts inconsistent");
  return {p, a, twice_b / 2};
}

}  // namespace nagaolab
