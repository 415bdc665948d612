#pragma once

// Quadratic-twist surfaces D(T) y^2 = f(x) over P^1, their fibral traces and
// the average-trace (Nagao) series.

#include <atomic>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nagaolab/curves.hpp"
#include "nagaolab/error.hpp"
#include "nagaolab/finite_field.hpp"
#include "nagaolab/polynomial.hpp"
#include "nagaolab/sweep.hpp"

namespace nagaolab {

enum class TwistMode { fast_twist, fiberwise };

// D(T) y^2 = f(x). Bad primes are the union of those of y^2 = f and of the
// polynomial D (2, lead(D), disc(D)).
class TwistSurfaceSpec {
 public:
  static TwistSurfaceSpec make(IntPolynomial f, IntPolynomial D, TwistMode mode = TwistMode::fast_twist) {
    CurveSpec fiber = curve_from_poly(std::move(f));
    if (D.degree() < 1) throw Error(ErrorKind::bad_curve, "twisting polynomial D must be non-constant");
    BigInt disc_d = nagaolab::discriminant(D);
    if (disc_d == 0)
      throw Error(ErrorKind::bad_curve, "D = " + D.to_string('T') + " has a repeated root (discriminant 0)");
    return TwistSurfaceSpec(std::move(fiber), std::move(D), std::move(disc_d), mode);
  }

  const CurveSpec& fiber_curve() const noexcept { return fiber_; }
  const IntPolynomial& f() const noexcept { return fiber_.f(); }
  const IntPolynomial& D() const noexcept { return d_; }
  TwistMode mode() const noexcept { return mode_; }

  TwistSurfaceSpec with_mode(TwistMode m) const {
    TwistSurfaceSpec s = *this;
    s.mode_ = m;
    return s;
  }

  std::optional<BadReason> bad_reason(u64 p) const {
    if (auto r = fiber_.bad_reason(p)) return r;
    const BigInt bp = p;
    if (d_.leading() % bp == 0) return BadReason::leading;
    if (disc_d_ % bp == 0) return BadReason::discriminant;
    return std::nullopt;
  }

  bool is_bad(u64 p) const { return bad_reason(p).has_value(); }

 private:
  TwistSurfaceSpec(CurveSpec fiber, IntPolynomial D, BigInt disc_d, TwistMode mode)
      : fiber_(std::move(fiber)), d_(std::move(D)), disc_d_(std::move(disc_d)), mode_(mode) {}

  CurveSpec fiber_;
  IntPolynomial d_;
  BigInt disc_d_;
  TwistMode mode_;
};

namespace detail {

inline void require_good(const TwistSurfaceSpec& s, u64 p) {
  if (auto r = s.bad_reason(p))
    throw Error(ErrorKind::bad_prime, "p = " + std::to_string(p) + " is a bad prime (" + to_string(*r) +
                                          ") for the surface (" + s.D().to_string('T') + ") y^2 = " +
                                          s.f().to_string());
}

}  // namespace detail

// sum_{t in F_p} chi_p(D(t)). Uses a residue table below its cap and falls
// back to one Jacobi-symbol evaluation per point above it.
inline i64 char_sum(const IntPolynomial& D, Prime p, u64 table_cap = ResidueTable::kDefaultCap) {
  if (!p.is_odd()) throw Error(ErrorKind::domain, "char_sum needs an odd prime");
  const auto coeffs = D.reduce_mod(p);
  if (p.value() < table_cap) return character_sum_reduced(coeffs, ResidueTable::make(p, table_cap));
  ValueWalker walk(coeffs, p);
  i64 total = 0;
  for (u64 t = 0; t < p.value(); ++t) {
    total += legendre(walk.value(), p.value());
    walk.advance();
  }
  return total;
}

// Trace of the fiber D(t) y^2 = f(x) at a good prime: chi_p(D(t)) a_p(f),
// which is 0 when p | D(t).
inline i64 fiber_trace(const TwistSurfaceSpec& s, Prime p, u64 t) {
  detail::require_good(s, p);
  const i64 a = trace(s.fiber_curve(), p).a;
  return legendre(poly_eval_mod(s.D(), t, p), p.value()) * a;
}

// A_p = (1/p) sum_t a_p(fiber t), held exactly as numerator / p.
struct AverageTrace {
  Prime p;
  i64 numerator;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(p.value()); }
  friend bool operator==(const AverageTrace&, const AverageTrace&) = default;
};

// p A_p from an already computed a_p(f). The fast-twist route multiplies a_p(f)
// by the character sum of D; the fiberwise route sums the fiber traces one
// fiber at a time.
inline i64 scaled_average_trace(const TwistSurfaceSpec& s, const ResidueTable& table, i64 fiber_a) {
  const auto coeffs = s.D().reduce_mod(table.modulus());
  if (s.mode() == TwistMode::fast_twist) return fiber_a * character_sum_reduced(coeffs, table);
  i64 total = 0;
  for (u64 t = 0; t < table.modulus(); ++t)
    total += table.chi(horner_mod(coeffs, t, table.modulus())) * fiber_a;
  return total;
}

inline AverageTrace average_trace(const TwistSurfaceSpec& s, Prime p) {
  detail::require_good(s, p);
  const auto table = ResidueTable::make(p);
  const i64 a = trace_with_table(s.fiber_curve(), table);
  return {p, scaled_average_trace(s, table, a)};
}

inline constexpr u64 kDefaultNagaoCap = 10'000'000;

// Geometric grid of k cutoffs from min(lo, hi) to hi, rounded to integers and
// deduplicated; the last point is always hi.
inline std::vector<u64> geometric_grid(u64 hi, std::size_t k = 20, u64 lo = 1000) {
  if (hi < 2) throw Error(ErrorKind::domain, "grid upper bound must be >= 2");
  lo = std::min(lo, hi);
  std::vector<u64> grid;
  if (k <= 1 || lo == hi) return {hi};
  const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo));
  for (std::size_t i = 0; i < k; ++i) {
    const double x = static_cast<double>(lo) * std::exp(ratio * static_cast<double>(i) / static_cast<double>(k - 1));
    const u64 n = i + 1 == k ? hi : std::clamp<u64>(static_cast<u64>(std::llround(x)), lo, hi);
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  return grid;
}

struct NagaoSeries {
  std::vector<u64> grid;
  std::vector<double> s1;  // (1/N) sum_{p<=N} -A_p log p
  std::vector<double> s2;  // (1/n) sum_{p<=N} -A_p, n = number of good primes <= N
  std::vector<std::size_t> n_primes;
  std::vector<AverageTrace> records;  // ascending in p, good primes only
};

namespace detail {

// Kahan-Babuska compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

inline void validate_grid(std::span<const u64> grid, u64 n_max, u64 cap) {
  if (n_max > cap)
    throw Error(ErrorKind::cap_exceeded, "N = " + std::to_string(n_max) + " exceeds the cap " + std::to_string(cap));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2 || grid[i] > n_max)
      throw Error(ErrorKind::domain, "grid point " + std::to_string(grid[i]) + " outside [2, N]");
    if (i > 0 && grid[i] <= grid[i - 1]) throw Error(ErrorKind::domain, "grid must be strictly ascending");
  }
}

}  // namespace detail

// Both estimators at every grid point from ascending per-prime averages.
inline NagaoSeries nagao_series_from_records(std::vector<AverageTrace> records, std::vector<u64> grid) {
  NagaoSeries out;
  out.grid = std::move(grid);
  out.records = std::move(records);
  detail::CompensatedSum weighted, plain;
  std::size_t count = 0;
  std::size_t next = 0;
  for (u64 cutoff : out.grid) {
    while (next < out.records.size() && out.records[next].p.value() <= cutoff) {
      const AverageTrace& r = out.records[next++];
      const double minus_a = -r.value();
      weighted.add(minus_a * std::log(static_cast<double>(r.p.value())));
      plain.add(minus_a);
      ++count;
    }
    out.s1.push_back(weighted.value() / static_cast<double>(cutoff));
    out.s2.push_back(count == 0 ? 0.0 : plain.value() / static_cast<double>(count));
    out.n_primes.push_back(count);
  }
  return out;
}

// Averages A_p from precomputed fiber traces a_p(f) (ascending, good primes of
// f). Primes bad for D are dropped.
inline std::vector<AverageTrace> average_traces_from(const TwistSurfaceSpec& s, std::span<const TraceRecord> fiber,
                                                     unsigned workers = 1,
                                                     const std::atomic<bool>* cancel = nullptr) {
  std::vector<Prime> primes;
  primes.reserve(fiber.size());
  for (const auto& r : fiber) primes.push_back(r.p);
  auto result = sweep_primes<AverageTrace>(
      primes, workers,
      [&](Prime p) -> std::optional<AverageTrace> {
        if (s.is_bad(p)) return std::nullopt;
        const auto it = std::lower_bound(fiber.begin(), fiber.end(), p,
                                         [](const TraceRecord& r, Prime q) { return r.p < q; });
        const auto table = ResidueTable::make(p);
        return AverageTrace{p, scaled_average_trace(s, table, it->a)};
      },
      cancel);
  if (result.primes_done != primes.size()) throw Error(ErrorKind::internal, "average-trace sweep cancelled");
  return std::move(result.values);
}

inline NagaoSeries nagao_series(const TwistSurfaceSpec& s, u64 n_max, std::vector<u64> grid, unsigned workers = 1,
                                u64 cap = kDefaultNagaoCap) {
  detail::validate_grid(grid, n_max, cap);
  const auto primes = primes_in(3, n_max + 1);
  auto sweep = sweep_primes<AverageTrace>(primes, workers, [&](Prime p) -> std::optional<AverageTrace> {
    if (s.is_bad(p)) return std::nullopt;
    const auto table = ResidueTable::make(p);
    const i64 a = trace_with_table(s.fiber_curve(), table);
    detail::check_weil_bound(s.fiber_curve(), p, a);
    return AverageTrace{p, scaled_average_trace(s, table, a)};
  });
  return nagao_series_from_records(std::move(sweep.values), std::move(grid));
}

// sigma(x) = (a x + b) / (c x + d) in PGL_2(Q), integer representative.
class MobiusTransform {
 public:
  static MobiusTransform make(BigInt a, BigInt b, BigInt c, BigInt d) {
    if (a * d - b * c == 0) throw Error(ErrorKind::domain, "degenerate transform: ad - bc = 0");
    return MobiusTransform(std::move(a), std::move(b), std::move(c), std::move(d));
  }

  const BigInt& a() const noexcept { return a_; }
  const BigInt& b() const noexcept { return b_; }
  const BigInt& c() const noexcept { return c_; }
  const BigInt& d() const noexcept { return d_; }

  bool has_pole_at_infinity() const noexcept { return c_ == 0; }

  // sigma(infinity) = a / c and sigma^{-1}(infinity) = -d / c, for c != 0.
  BigRational image_of_infinity() const { return BigRational(a_) / c_; }
  BigRational preimage_of_infinity() const { return BigRational(-d_) / c_; }

  std::string to_string() const {
    return "(" + a_.str() + "x + " + b_.str() + ")/(" + c_.str() + "x + " + d_.str() + ")";
  }

  friend bool operator==(const MobiusTransform&, const MobiusTransform&) = default;

 private:
  MobiusTransform(BigInt a, BigInt b, BigInt c, BigInt d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {}

  BigInt a_, b_, c_, d_;
};

// Numerator of f(sigma(x)) after clearing (c x + d)^deg f:
// sum_i f_i (a x + b)^i (c x + d)^(n - i).
inline IntPolynomial mobius_numerator(const IntPolynomial& f, const MobiusTransform& s) {
  const int n = f.degree();
  const IntPolynomial num{0}, lin_top = IntPolynomial(std::vector<BigInt>{s.b(), s.a()}),
                      lin_bot = IntPolynomial(std::vector<BigInt>{s.d(), s.c()});
  IntPolynomial total = num;
  for (int i = 0; i <= n; ++i) {
    IntPolynomial term = IntPolynomial(std::vector<BigInt>{f.coeff(static_cast<std::size_t>(i))});
    for (int k = 0; k < i; ++k) term = term * lin_top;
    for (int k = i; k < n; ++k) term = term * lin_bot;
    total = total + term;
  }
  return total;
}

// sigma permutes the roots of f iff the numerator of f(sigma(x)) is a scalar
// multiple of f of the same degree.
inline bool permutes_roots(const IntPolynomial& f, const MobiusTransform& s) {
  const IntPolynomial num = mobius_numerator(f, s);
  if (num.degree() != f.degree()) return false;
  const IntPolynomial lhs = num * IntPolynomial(std::vector<BigInt>{f.leading()});
  const IntPolynomial rhs = f * IntPolynomial(std::vector<BigInt>{num.leading()});
  return lhs == rhs;
}

struct PetersonCurve {
  RatPolynomial rational;  // f(T^2 / f(sigma(inf)) + sigma^{-1}(inf))
  BigInt denominator_lcm;  // L; the integral model is L^2 times the rational one
  IntPolynomial integral;
};

inline PetersonCurve peterson_D(const IntPolynomial& f, const MobiusTransform& sigma) {
  if (f.degree() != 3 && f.degree() != 5)
    throw Error(ErrorKind::domain, "peterson construction needs deg f in {3, 5}");
  if (sigma.has_pole_at_infinity()) throw Error(ErrorKind::domain, "sigma has a pole at infinity (c = 0)");
  const RatPolynomial fq(f);
  const BigRational f_at_image = fq.evaluate(sigma.image_of_infinity());
  if (f_at_image == 0) throw Error(ErrorKind::domain, "f(sigma(infinity)) = 0");
  if (!permutes_roots(f, sigma))
    throw Error(ErrorKind::domain, "sigma " + sigma.to_string() + " does not permute the roots of " + f.to_string());
  const RatPolynomial inner(std::vector<BigRational>{sigma.preimage_of_infinity(), 0, 1 / f_at_image});
  PetersonCurve out;
  out.rational = fq.compose(inner);
  out.denominator_lcm = out.rational.denominator_lcm();
  const BigRational scale = BigRational(out.denominator_lcm * out.denominator_lcm);
  out.integral = (scale * out.rational).to_integral();
  return out;
}

struct FactorizationReport {
  bool pass = true;
  std::optional<Prime> first_failure;
  i64 lhs = 0;  // a_p(J_D) at the failing prime
  i64 rhs = 0;  // predicted combination of the factor traces
  std::size_t primes_checked = 0;
};

// Checks a_p(y^2 = D) = r a_p(y^2 = f) + sum_i a_p(E_i) exactly for every
// prime p <= n that is good for all curves involved. This is a necessary
// condition for J_D ~ J_f^r x prod E_i, not a proof of the isogeny. Blocks
// are processed in ascending order so the reported failure is the least one.
inline FactorizationReport verify_mixed_factorization(const IntPolynomial& D, const IntPolynomial& f, i64 r,
                                                      const std::vector<IntPolynomial>& others, u64 n,
                                                      unsigned workers = 1) {
  const CurveSpec jd = CurveSpec::hyperelliptic(D);
  const CurveSpec jf = curve_from_poly(f);
  std::vector<CurveSpec> extra;
  for (const auto& e : others) {
    extra.push_back(curve_from_poly(e));
    if (extra.back().genus() != 1) throw Error(ErrorKind::domain, "additional factors must be genus 1 curves");
  }
  struct Mismatch {
    Prime p;
    i64 lhs, rhs;
  };
  const auto primes = primes_in(3, n + 1);
  FactorizationReport report;
  const std::size_t chunk = kSweepBlock * std::max(1u, workers);
  for (std::size_t start = 0; start < primes.size(); start += chunk) {
    const auto span = std::span<const Prime>(primes).subspan(start, std::min(chunk, primes.size() - start));
    auto res = sweep_primes<std::optional<Mismatch>>(span, workers, [&](Prime p) -> std::optional<std::optional<Mismatch>> {
      if (jd.is_bad(p) || jf.is_bad(p)) return std::nullopt;
      for (const auto& e : extra)
        if (e.is_bad(p)) return std::nullopt;
      const auto table = ResidueTable::make(p);
      const i64 lhs = trace_with_table(jd, table);
      i64 rhs = r * trace_with_table(jf, table);
      for (const auto& e : extra) rhs += trace_with_table(e, table);
      return lhs == rhs ? std::optional<Mismatch>{} : std::optional<Mismatch>{Mismatch{p, lhs, rhs}};
    });
    for (const auto& m : res.values) {
      ++report.primes_checked;
      if (m) {
        report.pass = false;
        report.first_failure = m->p;
        report.lhs = m->lhs;
        report.rhs = m->rhs;
        return report;
      }
    }
  }
  return report;
}

inline FactorizationReport verify_factorization(const IntPolynomial& D, const IntPolynomial& f, i64 r, u64 n,
                                                unsigned workers = 1) {
  return verify_mixed_factorization(D, f, r, {}, n, workers);
}

}  // namespace nagaolab
