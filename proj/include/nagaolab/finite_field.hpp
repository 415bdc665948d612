#pragma once

// Word-size modular arithmetic, quadratic characters and prime generation.
// Every modulus handled here is below 2^62, so a sum of two residues never
// overflows 64 bits and products go through 128-bit intermediates.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nagaolab/error.hpp"

namespace nagaolab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline constexpr u64 kPrimeLimit = u64{1} << 62;

inline constexpr u64 mul_mod(u64 a, u64 b, u64 m) {
  if (m <= (u64{1} << 32)) return a * b % m;  // operands < 2^32, product fits
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline constexpr u64 add_mod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  return s >= m ? s - m : s;
}

inline constexpr u64 sub_mod(u64 a, u64 b, u64 m) {
  return a >= b ? a - b : a + m - b;
}

inline constexpr u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Reduces a signed integer into [0, m).
inline constexpr u64 reduce_signed(i64 a, u64 m) {
  if (a >= 0) return static_cast<u64>(a) % m;
  u64 r = static_cast<u64>(-(a + 1)) % m;  // avoids negating INT64_MIN
  return r == m - 1 ? 0 : m - 1 - r;
}

// Deterministic Miller-Rabin. The first twelve prime bases are a proven
// witness set for every n < 3.3e24, which covers all of u64.
inline constexpr bool is_prime(u64 n) {
  if (n < 2) return false;
  constexpr std::array<u64, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 b : bases) {
    if (n == b) return true;
    if (n % b == 0) return false;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 b : bases) {
    u64 x = pow_mod(b, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// A certified prime below 2^62. Trace routines additionally require it to be
// odd; 2 is representable so that prime ranges can be returned verbatim.
class Prime {
 public:
  static Prime make(u64 value) {
    if (value >= kPrimeLimit || !is_prime(value))
      throw Error(ErrorKind::domain, std::to_string(value) + " is not a prime below 2^62");
    return Prime(value);
  }

  // For values already known prime (sieve output).
  static constexpr Prime unchecked(u64 value) { return Prime(value); }

  constexpr u64 value() const noexcept { return value_; }
  constexpr operator u64() const noexcept { return value_; }
  constexpr bool is_odd() const noexcept { return (value_ & 1) != 0; }

  friend constexpr auto operator<=>(Prime, Prime) = default;

 private:
  constexpr explicit Prime(u64 v) : value_(v) {}
  u64 value_;
};

inline u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

namespace detail {

inline std::vector<u64> simple_sieve(u64 limit) {  // primes <= limit
  std::vector<u64> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

}  // namespace detail

// Primes in [lo, hi), ascending. A segmented sieve handles ranges whose
// square-root base fits comfortably in memory; beyond that each odd
// candidate is tested with Miller-Rabin.
inline std::vector<Prime> primes_in(u64 lo, u64 hi) {
  std::vector<Prime> out;
  lo = std::max<u64>(lo, 2);
  hi = std::min(hi, kPrimeLimit);
  if (lo >= hi) return out;

  constexpr u64 kSieveRootCap = u64{1} << 24;
  const u64 root = isqrt(hi - 1);
  if (root > kSieveRootCap) {
    for (u64 n = lo; n < hi; ++n)
      if (is_prime(n)) out.push_back(Prime::unchecked(n));
    return out;
  }

  const std::vector<u64> base = detail::simple_sieve(root);
  constexpr u64 kSegment = u64{1} << 18;
  std::vector<bool> composite;
  for (u64 start = lo; start < hi; start += kSegment) {
    const u64 end = std::min(hi, start + kSegment);
    composite.assign(end - start, false);
    for (u64 q : base) {
      if (q * q >= end) break;
      u64 first = std::max(q * q, (start + q - 1) / q * q);
      for (u64 m = first; m < end; m += q) composite[m - start] = true;
    }
    for (u64 n = start; n < end; ++n)
      if (!composite[n - start]) out.push_back(Prime::unchecked(n));
  }
  return out;
}

// Legendre symbol (a/p) for odd prime p, with (0/p) = 0. Binary Jacobi
// algorithm: strip factors of two, then flip by quadratic reciprocity.
inline int legendre(u64 a, u64 p) {
  if (!(p & 1)) throw Error(ErrorKind::domain, "legendre: modulus must be odd");
  a %= p;
  u64 n = p;
  int sign = 1;
  while (a != 0) {
    const int tz = std::countr_zero(a);
    a >>= tz;
    if ((tz & 1) && ((n & 7) == 3 || (n & 7) == 5)) sign = -sign;
    if ((a & 3) == 3 && (n & 3) == 3) sign = -sign;
    std::swap(a, n);
    a %= n;
  }
  return n == 1 ? sign : 0;
}

inline int legendre(i64 a, u64 p) { return legendre(reduce_signed(a, p), p); }
inline int legendre(int a, u64 p) { return legendre(static_cast<i64>(a), p); }

// Square/non-square classification of every residue mod p, packed one bit
// per residue. Index 0 is kept clear and reported as character value 0.
class ResidueTable {
 public:
  static constexpr u64 kDefaultCap = u64{1} << 31;

  static ResidueTable make(Prime p, u64 cap = kDefaultCap) {
    if (p.value() >= cap)
      throw Error(ErrorKind::cap_exceeded,
                  "residue table too large for p = " + std::to_string(p.value()) +
                      "; use per-element legendre() instead");
    if (!p.is_odd()) throw Error(ErrorKind::domain, "residue table needs an odd prime");
    return ResidueTable(p.value());
  }

  u64 modulus() const noexcept { return p_; }

  bool is_square(u64 a) const noexcept { return (bits_[a >> 6] >> (a & 63)) & 1; }

  // chi_p(a) for a already reduced into [0, p).
  int chi(u64 a) const noexcept { return a == 0 ? 0 : (is_square(a) ? 1 : -1); }

  u64 nonzero_square_count() const noexcept {
    u64 n = 0;
    for (u64 w : bits_) n += static_cast<u64>(std::popcount(w));
    return n;
  }

 private:
  explicit ResidueTable(u64 p) : p_(p), bits_((p + 63) / 64, 0) {
    // x^2 walks through the squares with (x+1)^2 = x^2 + 2x + 1.
    u64 sq = 0;
    u64 step = 1;
    for (u64 x = 1; x <= (p - 1) / 2; ++x) {
      sq = add_mod(sq, step, p);
      step = add_mod(step, 2, p);
      bits_[sq >> 6] |= u64{1} << (sq & 63);
    }
  }

  u64 p_;
  std::vector<u64> bits_;
};

// Horner evaluation of a polynomial whose coefficients (constant term first)
// are already reduced mod p.
inline u64 horner_mod(std::span<const u64> coeffs, u64 x, u64 p) {
  u64 acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = add_mod(mul_mod(acc, x, p), *it, p);
  return acc;
}

// Enumerates f(0), f(1), ..., f(p-1) mod p using a forward-difference table,
// so each step costs deg(f) modular additions and no multiplications.
class ValueWalker {
 public:
  ValueWalker(std::span<const u64> coeffs, u64 p) : p_(p) {
    std::size_t n = coeffs.size();
    while (n > 1 && coeffs[n - 1] == 0) --n;
    diffs_.resize(std::max<std::size_t>(n, 1));
    for (std::size_t k = 0; k < diffs_.size(); ++k) diffs_[k] = horner_mod(coeffs.first(n), k % p, p);
    // In-place conversion of f(0..d) to the leading diagonal of the difference table.
    for (std::size_t level = 1; level < diffs_.size(); ++level)
      for (std::size_t k = diffs_.size() - 1; k >= level; --k) diffs_[k] = sub_mod(diffs_[k], diffs_[k - 1], p);
  }

  u64 value() const noexcept { return diffs_[0]; }

  void advance() noexcept {
    const std::size_t last = diffs_.size() - 1;
    for (std::size_t k = 0; k < last; ++k) diffs_[k] = add_mod(diffs_[k], diffs_[k + 1], p_);
  }

 private:
  u64 p_;
  std::vector<u64> diffs_;
};

// Sum of chi_p(f(t)) over t in F_p, for reduced coefficients.
inline i64 character_sum_reduced(std::span<const u64> coeffs, const ResidueTable& table) {
  const u64 p = table.modulus();
  ValueWalker walk(coeffs, p);
  i64 total = 0;
  for (u64 t = 0; t < p; ++t) {
    total += table.chi(walk.value());
    walk.advance();
  }
  return total;
}

}  // namespace nagaolab
