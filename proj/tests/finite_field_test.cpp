#include <gtest/gtest.h>

#include <random>
#include <set>

#include "nagaolab/finite_field.hpp"
#include "nagaolab/polynomial.hpp"
#include "oracles.hpp"

using namespace nagaolab;

namespace {

std::vector<u64> values(const std::vector<Prime>& ps) {
  std::vector<u64> out;
  for (Prime p : ps) out.push_back(p.value());
  return out;
}

}  // namespace

TEST(PrimesIn, SmallRanges) {
  EXPECT_EQ(values(primes_in(2, 12)), (std::vector<u64>{2, 3, 5, 7, 11}));
  EXPECT_TRUE(primes_in(10, 11).empty());
  EXPECT_TRUE(primes_in(20, 20).empty());
  EXPECT_EQ(values(primes_in(11, 12)), (std::vector<u64>{11}));
}

TEST(PrimesIn, CountBelowOneHundredThousand) {
  // pi(10^5) from the plain sieve oracle, frozen: 9592.
  ASSERT_EQ(oracle::prime_count(100000), 9592u);
  EXPECT_EQ(primes_in(2, 100001).size(), 9592u);
}

TEST(PrimesIn, SegmentBoundariesAgreeWithPlainSieve) {
  // Windows straddling the 2^18 segment size.
  const u64 seg = u64{1} << 18;
  for (u64 lo : {seg - 100, 2 * seg - 7, 5 * seg + 3}) {
    const auto got = primes_in(lo, lo + 5000);
    std::size_t expected = oracle::prime_count(lo + 4999) - oracle::prime_count(lo - 1);
    EXPECT_EQ(got.size(), expected) << lo;
    for (Prime p : got) EXPECT_TRUE(is_prime(p));
  }
}

TEST(PrimesIn, LargeRangesUseMillerRabin) {
  const u64 lo = (u64{1} << 61) - 100;
  const auto got = primes_in(lo, (u64{1} << 61));
  ASSERT_FALSE(got.empty());
  EXPECT_EQ(got.back().value(), (u64{1} << 61) - 1);  // Mersenne prime M61
}

TEST(IsPrime, PseudoprimesAreRejected) {
  for (u64 n : {561ull, 1105ull, 3215031751ull, 2152302898747ull, 3825123056546413051ull}) EXPECT_FALSE(is_prime(n)) << n;
  for (u64 n : {2ull, 3ull, 65537ull, 2147483647ull, 2305843009213693951ull}) EXPECT_TRUE(is_prime(n)) << n;
  EXPECT_THROW(Prime::make(91), Error);
  EXPECT_THROW(Prime::make(u64{1} << 62), Error);
}

TEST(Legendre, Examples) {
  EXPECT_EQ(legendre(0, 7), 0);
  EXPECT_EQ(legendre(4, 5), 1);
  EXPECT_EQ(legendre(2, 5), -1);  // squares mod 5 are {1, 4}
  EXPECT_EQ(legendre(i64{-1}, 7), -1);
  EXPECT_EQ(legendre(i64{-1}, 13), 1);
  EXPECT_THROW(legendre(u64{3}, u64{8}), Error);
}

TEST(Legendre, EulerCriterionOnRandomPairs) {
  std::mt19937_64 rng(20261018);
  const auto primes = primes_in(3, 1'000'000);
  for (int i = 0; i < 10000; ++i) {
    const u64 p = primes[rng() % primes.size()];
    const u64 a = rng();
    ASSERT_EQ(legendre(a, p), oracle::euler_symbol(a, p)) << a << " mod " << p;
  }
  // Moduli near 2^62 exercise the 128-bit product path.
  for (Prime p : primes_in((u64{1} << 62) - 2000, u64{1} << 62))
    for (int i = 0; i < 20; ++i) {
      const u64 a = rng();
      ASSERT_EQ(legendre(a, p), oracle::euler_symbol(a, p));
    }
}

TEST(Legendre, PeriodicBalancedAndMultiplicative) {
  for (Prime p : primes_in(3, 200)) {
    i64 total = 0;
    for (u64 a = 0; a < p; ++a) {
      total += legendre(a, p);
      EXPECT_EQ(legendre(a + 3 * p, p), legendre(a, p));
      for (u64 b = 0; b < p; ++b) ASSERT_EQ(legendre(a, p) * legendre(b, p), legendre(a * b, p));
    }
    EXPECT_EQ(total, 0) << p;
  }
}

TEST(ResidueTable, SmallSquareSets) {
  auto squares = [](u64 p) {
    const auto t = ResidueTable::make(Prime::make(p));
    std::set<u64> s;
    for (u64 a = 1; a < p; ++a)
      if (t.is_square(a)) s.insert(a);
    EXPECT_EQ(t.chi(0), 0);
    return s;
  };
  EXPECT_EQ(squares(5), (std::set<u64>{1, 4}));
  EXPECT_EQ(squares(3), (std::set<u64>{1}));
}

TEST(ResidueTable, AgreesWithLegendreForAllPrimesBelowTenThousand) {
  for (Prime p : primes_in(3, 10000)) {
    const auto t = ResidueTable::make(p);
    ASSERT_EQ(t.nonzero_square_count(), (p - 1) / 2);
    for (u64 a = 0; a < p; ++a) ASSERT_EQ(t.chi(a), legendre(a, p)) << a << " mod " << p;
  }
}

TEST(ResidueTable, CapIsEnforced) {
  try {
    ResidueTable::make(Prime::make(10007), 10000);
    FAIL() << "expected cap error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cap_exceeded);
    EXPECT_NE(std::string(e.what()).find("legendre"), std::string::npos);
  }
}

TEST(PolyEvalMod, Examples) {
  const IntPolynomial cubic{0, 1, 0, 1};  // x^3 + x
  EXPECT_EQ(poly_eval_mod(cubic, 2, 5), 0u);
  EXPECT_EQ(poly_eval_mod(cubic, 1, 5), 2u);
  EXPECT_EQ(poly_eval_mod(IntPolynomial{0, -1, 0, 0, 0, 1}, 2, 3), 0u);  // 32 - 2 = 30
  EXPECT_EQ(poly_eval_mod(IntPolynomial{-7}, 0, 5), 3u);
}

TEST(ValueWalker, MatchesHornerForRandomPolynomials) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto primes = primes_in(3, 400);
    const u64 p = primes[rng() % primes.size()];
    std::vector<u64> c(1 + rng() % 11);
    for (auto& x : c) x = rng() % p;
    ValueWalker w(c, p);
    for (u64 t = 0; t < p; ++t) {
      ASSERT_EQ(w.value(), horner_mod(c, t, p));
      w.advance();
    }
  }
}
