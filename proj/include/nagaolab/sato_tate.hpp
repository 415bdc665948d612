#pragma once

// Empirical Sato-Tate statistics, Haar-measure moment integrals, the table of
// Sato-Tate groups of abelian surfaces over Q, and rank prediction for the
// self-twist surface f(T) y^2 = f(x).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nagaolab/curves.hpp"
#include "nagaolab/error.hpp"
#include "nagaolab/parse.hpp"

namespace nagaolab {

struct MomentReport {
  u64 n = 0;  // cutoff: largest prime considered
  std::size_t n_primes = 0;
  double second_moment = 0;  // mean of a^2 / p
  double fourth_moment = 0;  // mean of a^4 / p^2; diagnostic only
  double zero_fraction = 0;
};

// Moments of the normalized traces a / sqrt(p). Records are summed in
// ascending (p, a) order so the result does not depend on input order.
inline MomentReport empirical_moments(std::vector<TraceRecord> traces, u64 cutoff = 0) {
  if (traces.empty()) throw Error(ErrorKind::domain, "empirical_moments needs at least one trace");
  std::sort(traces.begin(), traces.end(),
            [](const TraceRecord& x, const TraceRecord& y) { return x.p != y.p ? x.p < y.p : x.a < y.a; });
  // Integer parts are exact; only the fractional remainders go through doubles.
  i64 whole2 = 0;
  long double frac2 = 0, m4 = 0;
  std::size_t zeros = 0;
  for (const auto& t : traces) {
    const i64 p = static_cast<i64>(t.p.value());
    const i64 sq = t.a * t.a;
    whole2 += sq / p;
    frac2 += static_cast<long double>(sq % p) / static_cast<long double>(p);
    const long double r = static_cast<long double>(sq) / static_cast<long double>(p);
    m4 += r * r;
    if (t.a == 0) ++zeros;
  }
  MomentReport out;
  out.n = cutoff ? cutoff : traces.back().p.value();
  out.n_primes = traces.size();
  const long double count = static_cast<long double>(traces.size());
  out.second_moment = static_cast<double>((static_cast<long double>(whole2) + frac2) / count);
  out.fourth_moment = static_cast<double>(m4 / count);
  out.zero_fraction = static_cast<double>(static_cast<long double>(zeros) / count);
  return out;
}

// Adaptive Simpson quadrature with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps,
                               int max_depth = 48) {
  struct Step {
    static double run(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double eps, int depth) {
      const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6 * (fa + 4 * flm + fm);
      const double right = (b - m) / 6 * (fm + 4 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15 * eps) return left + right + delta / 15;
      return run(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) + run(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
    }
  };
  // Start from a few panels so symmetric integrands cannot fool the first estimate.
  constexpr int kPanels = 8;
  double total = 0;
  const double h = (b - a) / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h, hi = lo + h, mid = (lo + hi) / 2;
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    total += Step::run(f, lo, hi, flo, fmid, fhi, h / 6 * (flo + 4 * fmid + fhi), eps / kPanels, max_depth);
  }
  return total;
}

inline constexpr double kQuadTol1D = 1e-9;
inline constexpr double kQuadTol2D = 1e-6;

// Limiting laws of Frobenius angles theta in [0, pi] for genus 1:
//   sato_tate          (2/pi) sin^2 theta           non-CM
//   uniform            1/pi                         CM defined over the base field
//   half_uniform_dirac (1/(2pi)) + (1/2) delta_{pi/2}  CM not defined over the base field
class STMeasure1D {
 public:
  enum class Kind { sato_tate, uniform, half_uniform_dirac };

  explicit constexpr STMeasure1D(Kind k) : kind_(k) {}

  Kind kind() const noexcept { return kind_; }

  std::string name() const {
    switch (kind_) {
      case Kind::sato_tate: return "sato_tate";
      case Kind::uniform: return "uniform";
      case Kind::half_uniform_dirac: return "half_uniform_dirac";
    }
    return "?";
  }

  // Density of the absolutely continuous part.
  double density(double theta) const {
    switch (kind_) {
      case Kind::sato_tate: return 2 / std::numbers::pi * std::sin(theta) * std::sin(theta);
      case Kind::uniform: return 1 / std::numbers::pi;
      case Kind::half_uniform_dirac: return 1 / (2 * std::numbers::pi);
    }
    return 0;
  }

  double atom_mass() const { return kind_ == Kind::half_uniform_dirac ? 0.5 : 0.0; }
  static constexpr double atom_location() { return std::numbers::pi / 2; }

  double cdf(double theta) const {
    theta = std::clamp(theta, 0.0, std::numbers::pi);
    switch (kind_) {
      case Kind::sato_tate: return (theta - std::sin(theta) * std::cos(theta)) / std::numbers::pi;
      case Kind::uniform: return theta / std::numbers::pi;
      case Kind::half_uniform_dirac: return theta / (2 * std::numbers::pi) + (theta >= atom_location() ? 0.5 : 0.0);
    }
    return 0;
  }

  // Integral of g against the measure.
  double integrate(const std::function<double(double)>& g, double eps = kQuadTol1D) const {
    const double continuous =
        adaptive_simpson([&](double t) { return g(t) * density(t); }, 0.0, std::numbers::pi, eps);
    return continuous + atom_mass() * g(atom_location());
  }

  double total_mass() const {
    return integrate([](double) { return 1.0; });
  }

 private:
  Kind kind_;
};

// E[(2 cos theta)^2] = E[a^2 / p] under the measure.
inline double haar_second_moment(const STMeasure1D& m) {
  return m.integrate([](double t) { return 4 * std::cos(t) * std::cos(t); });
}

// Integral of g(theta1, theta2) against the Weyl density of USp(4),
// (8/pi^2)(cos t1 - cos t2)^2 sin^2 t1 sin^2 t2, by nested adaptive Simpson.
inline double usp4_integrate(const std::function<double(double, double)>& g, double eps = kQuadTol2D) {
  auto weight = [](double t1, double t2) {
    const double dc = std::cos(t1) - std::cos(t2);
    const double s1 = std::sin(t1), s2 = std::sin(t2);
    return 8 / (std::numbers::pi * std::numbers::pi) * dc * dc * s1 * s1 * s2 * s2;
  };
  const double inner_eps = eps * 1e-3;
  return adaptive_simpson(
      [&](double t1) {
        return adaptive_simpson([&](double t2) { return g(t1, t2) * weight(t1, t2); }, 0.0, std::numbers::pi,
                                inner_eps);
      },
      0.0, std::numbers::pi, eps * 1e-2);
}

// Second moment of a / sqrt(p) = 2 cos t1 + 2 cos t2 under USp(4).
inline double haar_second_moment_usp4() {
  return usp4_integrate([](double t1, double t2) {
    const double s = std::cos(t1) + std::cos(t2);
    return 4 * s * s;
  });
}

inline bool is_atom(double theta) { return std::abs(theta - STMeasure1D::atom_location()) < 1e-12; }

// Kolmogorov-Smirnov sup distance between the empirical CDF of the sample
// and a continuous CDF.
inline double ks_distance_continuous(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// KS distance of angle samples to a measure. For the half-uniform + atom law
// the continuous part (samples off pi/2) is compared with the uniform law and
// the atom is checked separately; the larger discrepancy is returned.
inline double ks_distance(const std::vector<double>& angles, const STMeasure1D& m) {
  if (angles.empty()) throw Error(ErrorKind::domain, "ks_distance needs a nonempty sample");
  if (m.kind() != STMeasure1D::Kind::half_uniform_dirac)
    return ks_distance_continuous(angles, [&](double t) { return m.cdf(t); });
  std::vector<double> rest;
  for (double t : angles)
    if (!is_atom(t)) rest.push_back(t);
  const double atom_fraction = 1.0 - static_cast<double>(rest.size()) / static_cast<double>(angles.size());
  const double atom_gap = std::abs(atom_fraction - m.atom_mass());
  if (rest.empty()) return atom_gap;
  const STMeasure1D uniform(STMeasure1D::Kind::uniform);
  return std::max(atom_gap, ks_distance_continuous(rest, [&](double t) { return uniform.cdf(t); }));
}

// One row of the Sato-Tate group table for abelian surfaces over Q.
struct STGroupRecord {
  std::string name;
  std::string endo_algebra;  // End(J)_R: C, R, M_2(R), RxR
  int endo_rank = 0;
  int second_moment = 0;     // E[a_p^2 / p]
  IntPolynomial example_curve;
};

inline constexpr std::size_t kSTGroupCount = 34;

inline constexpr const char* kEmbeddedSTTable = R"(# nagaolab st-groups v1
J(C_2),C,2,2,x^5-x
J(C_4),C,2,2,x^6+x^5-5x^4-5x^2-x+1
J(C_6),C,2,2,x^6-15x^4-20x^3+6x+1
J(D_2),R,1,1,x^5+9x
J(D_3),R,1,1,x^6+10x^3-2
J(D_4),R,1,1,x^5+3x
J(D_6),R,1,1,x^6+3x^5+10x^3-15x^2+15x-6
J(T),R,1,1,x^6+6x^5-20x^4+20x^3-20x^2-8x+8
J(O),R,1,1,x^6-5x^4+10x^3-5x^2+2x-1
C_{2,1},M_2(R),4,4,x^6+1
C_{6,1},C,2,2,x^6+6x^5-30x^4+20x^3+15x^2-12x+1
D_{2,1},RxR,2,2,x^5+x
D_{4,1},R,1,1,x^5+2x
D_{6,1},R,1,1,x^6+6x^5-30x^4-40x^3+60x^2+24x-8
D_{3,2},RxR,2,2,x^6+4
D_{4,2},RxR,2,2,x^6+x^5+10x^3+5x^2+x-2
D_{6,2},RxR,2,2,x^6+2
O_1,R,1,1,x^6+7x^5+10x^4+10x^3+15x^2+17x+4
E_1,M_2(R),4,4,x^6+x^4+x^2+1
E_2,C,2,2,x^6+x^5+3x^4+3x^2-x+1
E_3,C,2,2,x^5+x^4-3x^3-4x^2-x
E_4,C,2,2,x^5+x^4+x^2-x
E_6,C,2,2,x^5+2x^4-x^3-3x^2-x
J(E_1),RxR,2,2,x^5+x^3+x
J(E_2),R,1,1,x^5+x^3-x
J(E_3),R,1,1,x^6+x^3+4
J(E_4),R,1,1,x^5+x^3+2x
J(E_6),R,1,1,x^6+x^3-2
F_{ac},R,1,1,x^5+1
F_{a,b},RxR,2,2,x^6+3x^4+x^2-1
N(G_{1,3}),RxR,2,2,x^6+3x^4-2
G_{3,3},RxR,2,2,x^6+x^2+1
N(G_{3,3}),R,1,1,x^6+x^5+x-1
USp(4),R,1,1,x^5-x+1
)";

// Parses the table format: '#' comments, then one comma-separated row per
// line (name, endo algebra, endo rank, second moment, example polynomial).
inline std::vector<STGroupRecord> parse_st_table(std::istream& in) {
  std::vector<STGroupRecord> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line.front() == '#') continue;
    // Names contain commas inside braces, e.g. C_{2,1}; split outside braces only.
    std::vector<std::string> fields;
    std::string cur;
    int depth = 0;
    for (char c : line) {
      if (c == '{' || c == '(') ++depth;
      if (c == '}' || c == ')') --depth;
      if (c == ',' && depth == 0) {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 5)
      throw Error(ErrorKind::parse, "st table line " + std::to_string(line_no) + ": expected 5 fields");
    STGroupRecord r;
    r.name = std::string(detail::trim(fields[0]));
    r.endo_algebra = std::string(detail::trim(fields[1]));
    try {
      r.endo_rank = std::stoi(fields[2]);
      r.second_moment = std::stoi(fields[3]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, "st table line " + std::to_string(line_no) + ": bad integer field");
    }
    r.example_curve = parse_polynomial(fields[4]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline const std::vector<STGroupRecord>& embedded_st_table() {
  static const std::vector<STGroupRecord> table = [] {
    std::istringstream in(kEmbeddedSTTable);
    return parse_st_table(in);
  }();
  return table;
}

// Loads the table from a data file, falling back to the compiled-in copy
// when the path is empty or unreadable.
inline std::vector<STGroupRecord> load_st_table(const std::string& path) {
  if (!path.empty()) {
    std::ifstream in(path);
    if (in) {
      auto rows = parse_st_table(in);
      if (rows.size() != kSTGroupCount)
        throw Error(ErrorKind::parse, "st table " + path + " has " + std::to_string(rows.size()) + " rows, expected " +
                                          std::to_string(kSTGroupCount));
      return rows;
    }
  }
  return embedded_st_table();
}

inline constexpr double kDefaultClassTolerance = 0.25;

struct STClassification {
  std::optional<int> moment_class;  // 1, 2 or 4
  std::vector<STGroupRecord> candidates;
  bool no_class = false;
};

// Every table row whose second moment lies within tol of the empirical one.
// Rows are identified by moment class only, never as a unique group.
inline STClassification identify_st_class(const MomentReport& report, double tol = kDefaultClassTolerance,
                                          const std::vector<STGroupRecord>& table = embedded_st_table()) {
  if (!(tol > 0)) throw Error(ErrorKind::domain, "classification tolerance must be positive");
  STClassification out;
  for (const auto& row : table)
    if (std::abs(report.second_moment - row.second_moment) <= tol) out.candidates.push_back(row);
  if (out.candidates.empty()) {
    out.no_class = true;
    return out;
  }
  // With tol < 1/2 all candidates share one moment; otherwise report the nearest.
  int best = out.candidates.front().second_moment;
  for (const auto& row : out.candidates)
    if (std::abs(report.second_moment - row.second_moment) < std::abs(report.second_moment - best))
      best = row.second_moment;
  out.moment_class = best;
  return out;
}

// Predicted rank of J(X^f)(Q(T)) for f(T) y^2 = f(x): the second-moment class,
// which equals the real rank of End_Q(J_f).
inline int predict_rank(const IntPolynomial& f, int moment_class) {
  const int genus = (f.degree() - 1) / 2;
  if (genus == 1 && moment_class != 1 && moment_class != 2)
    throw Error(ErrorKind::domain, "genus 1 moment class must be 1 or 2");
  if (genus == 2 && moment_class != 1 && moment_class != 2 && moment_class != 4)
    throw Error(ErrorKind::domain, "genus 2 moment class must be 1, 2 or 4");
  if (genus != 1 && genus != 2) throw Error(ErrorKind::domain, "rank prediction covers genus 1 and 2 only");
  return moment_class;
}

}  // namespace nagaolab
