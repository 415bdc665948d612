#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the character-sum, difference-table or residue-table code.

#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Plain sieve of Eratosthenes: number of primes <= n.
inline std::size_t prime_count(u64 n) {
  std::vector<char> composite(n + 1, 0);
  std::size_t count = 0;
  for (u64 i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    ++count;
    for (u64 j = i * i; j <= n; j += i) composite[j] = 1;
  }
  return count;
}

inline u64 slow_pow(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = static_cast<u64>(static_cast<unsigned __int128>(r) * b % m);
    b = static_cast<u64>(static_cast<unsigned __int128>(b) * b % m);
    e >>= 1;
  }
  return r;
}

// Euler's criterion, mapped to {-1, 0, 1}.
inline int euler_symbol(u64 a, u64 p) {
  const u64 r = slow_pow(a % p, (p - 1) / 2, p);
  return r == 0 ? 0 : (r == 1 ? 1 : -1);
}

inline bool is_square_by_enumeration(u64 a, u64 p) {
  for (u64 x = 0; x < p; ++x)
    if (x * x % p == a % p) return true;
  return false;
}

inline u64 eval_mod(const std::vector<i64>& c, u64 x, u64 p) {
  i64 acc = 0;
  const i64 q = static_cast<i64>(p);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = ((acc * static_cast<i64>(x) + *it) % q + q) % q;
  return static_cast<u64>(acc);
}

// Projective point count of d y^2 = f(x) over F_p by enumerating (x, y), plus
// the points at infinity of the smooth model (1 for odd degree, the number of
// y with d y^2 = lead(f) for even degree). f is constant term first.
inline u64 count_twisted(const std::vector<i64>& f, u64 d, u64 p) {
  u64 count = 0;
  for (u64 x = 0; x < p; ++x) {
    const u64 fx = eval_mod(f, x, p);
    for (u64 y = 0; y < p; ++y)
      if (d % p * (y * y % p) % p == fx) ++count;
  }
  if ((f.size() - 1) % 2 == 1) return count + 1;
  const u64 lead = static_cast<u64>(((f.back() % static_cast<i64>(p)) + static_cast<i64>(p)) % static_cast<i64>(p));
  for (u64 y = 0; y < p; ++y)
    if (d % p * (y * y % p) % p == lead) ++count;
  return count;
}

// F_{p^2} as F_p[s]/(s^2 - n) with n the LARGEST non-residue (the library
// uses the least one), and #C(F_{p^2}) by enumerating all (x, y) pairs.
inline u64 count_points_fp2_bruteforce(const std::vector<i64>& f, u64 p) {
  u64 n = p - 1;
  while (is_square_by_enumeration(n, p)) --n;
  struct E {
    u64 u, v;
  };
  auto mul = [&](E a, E b) {
    return E{(a.u * b.u + n * (a.v * b.v % p)) % p, (a.u * b.v + a.v * b.u) % p};
  };
  std::vector<u64> square_count(p * p, 0);  // index u * p + v
  for (u64 u = 0; u < p; ++u)
    for (u64 v = 0; v < p; ++v) {
      E y{u, v};
      E s = mul(y, y);
      ++square_count[s.u * p + s.v];
    }
  u64 count = 0;
  for (u64 u = 0; u < p; ++u)
    for (u64 v = 0; v < p; ++v) {
      E x{u, v}, acc{0, 0};
      for (auto it = f.rbegin(); it != f.rend(); ++it) {
        acc = mul(acc, x);
        const i64 c = ((*it % static_cast<i64>(p)) + static_cast<i64>(p)) % static_cast<i64>(p);
        acc.u = (acc.u + static_cast<u64>(c)) % p;
      }
      count += square_count[acc.u * p + acc.v];
    }
  const bool odd = (f.size() - 1) % 2 == 1;
  return count + (odd ? 1 : 2);  // lead(f) in F_p is a square in F_{p^2}
}

// All complex roots of a monic polynomial (constant term first) by the
// Durand-Kerner iteration in 50-digit arithmetic, so that repeated roots
// still come out to about 25 digits.
inline std::vector<boost::multiprecision::cpp_complex_50> roots(const std::vector<double>& monic) {
  using C = boost::multiprecision::cpp_complex_50;
  using R = boost::multiprecision::cpp_bin_float_50;
  const std::size_t n = monic.size() - 1;
  std::vector<C> z(n);
  const C seed(R("0.4"), R("0.9"));
  R radius = 1;
  for (double c : monic) radius = std::max(radius, R(std::abs(c)));
  C power(1);
  for (std::size_t i = 0; i < n; ++i, power *= seed) z[i] = radius * power;
  auto eval = [&](const C& x) {
    C acc(0);
    for (auto it = monic.rbegin(); it != monic.rend(); ++it) acc = acc * x + C(*it);
    return acc;
  };
  const R stop = radius * R("1e-45");
  for (int iter = 0; iter < 5000; ++iter) {
    R change = 0;
    for (std::size_t i = 0; i < n; ++i) {
      C denom(1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      const C step = eval(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, R(abs(step)));
    }
    if (change < stop) break;
  }
  return z;
}

// Inverse of a continuous increasing CDF on [0, pi] by bisection.
inline double quantile(const std::function<double(double)>& cdf, double u) {
  double lo = 0, hi = M_PI;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace oracle
