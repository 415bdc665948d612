#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "nagaolab/parse.hpp"
#include "nagaolab/sato_tate.hpp"
#include "oracles.hpp"

using namespace nagaolab;

namespace {

using Kind = STMeasure1D::Kind;
const std::vector<Kind> kKinds = {Kind::sato_tate, Kind::uniform, Kind::half_uniform_dirac};

MomentReport with_moment(double m) {
  MomentReport r;
  r.second_moment = m;
  return r;
}

std::vector<std::string> names(const std::vector<STGroupRecord>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.name);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(EmpiricalMoments, Examples) {
  std::vector<TraceRecord> zeros;
  for (Prime p : primes_in(3, 100)) zeros.push_back({p, 0});
  const auto z = empirical_moments(zeros);
  EXPECT_EQ(z.second_moment, 0.0);
  EXPECT_EQ(z.zero_fraction, 1.0);
  EXPECT_EQ(z.n, 97u);

  const auto one = empirical_moments({{Prime::make(5), 2}});
  EXPECT_DOUBLE_EQ(one.second_moment, 0.8);
  EXPECT_DOUBLE_EQ(one.fourth_moment, 0.64);
  EXPECT_EQ(one.zero_fraction, 0.0);
  EXPECT_EQ(empirical_moments({{Prime::make(5), 2}}, 10).n, 10u);

  EXPECT_THROW(empirical_moments({}), Error);
}

TEST(EmpiricalMoments, PermutationInvariant) {
  std::mt19937_64 rng(3);
  std::vector<TraceRecord> recs;
  for (Prime p : primes_in(3, 20000)) {
    const i64 bound = static_cast<i64>(4 * std::sqrt(static_cast<double>(p.value())));
    recs.push_back({p, static_cast<i64>(rng() % static_cast<u64>(2 * bound + 1)) - bound});
  }
  const auto base = empirical_moments(recs);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(recs.begin(), recs.end(), rng);
    const auto r = empirical_moments(recs);
    ASSERT_EQ(r.second_moment, base.second_moment);
    ASSERT_EQ(r.fourth_moment, base.fourth_moment);
    ASSERT_EQ(r.zero_fraction, base.zero_fraction);
  }
}

TEST(EmpiricalMoments, MatchesExactRationalMean) {
  std::vector<TraceRecord> recs;
  BigRational exact = 0;
  for (Prime p : primes_in(3, 2000)) {
    const i64 a = static_cast<i64>(p.value() % 7) - 3;
    recs.push_back({p, a});
    exact += BigRational(a * a) / BigRational(static_cast<i64>(p.value()));
  }
  exact /= static_cast<i64>(recs.size());
  EXPECT_NEAR(empirical_moments(recs).second_moment, exact.convert_to<double>(), 1e-15);
}

TEST(STMeasure, TotalMassAndCdf) {
  for (Kind k : kKinds) {
    const STMeasure1D m(k);
    EXPECT_NEAR(m.total_mass(), 1.0, 1e-9) << m.name();
    EXPECT_EQ(m.cdf(0), 0.0);
    EXPECT_NEAR(m.cdf(M_PI), 1.0, 1e-15);
    // The CDF is the integral of the measure up to theta.
    for (double theta : {0.3, 1.0, 2.0, 2.9}) {
      const double by_quadrature = m.integrate([&](double t) { return t <= theta ? 1.0 : 0.0; }, 1e-11);
      EXPECT_NEAR(m.cdf(theta), by_quadrature, 1e-6) << m.name() << " at " << theta;
    }
  }
  EXPECT_DOUBLE_EQ(STMeasure1D(Kind::sato_tate).cdf(M_PI / 2), 0.5);
}

TEST(HaarSecondMoment, ClosedForms) {
  EXPECT_NEAR(haar_second_moment(STMeasure1D(Kind::sato_tate)), 1.0, 1e-9);
  EXPECT_NEAR(haar_second_moment(STMeasure1D(Kind::uniform)), 2.0, 1e-9);
  EXPECT_NEAR(haar_second_moment(STMeasure1D(Kind::half_uniform_dirac)), 1.0, 1e-9);
}

TEST(HaarSecondMoment, USp4) {
  EXPECT_NEAR(haar_second_moment_usp4(), 1.0, 1e-6);
  EXPECT_NEAR(usp4_integrate([](double, double) { return 1.0; }), 1.0, 1e-6);
  EXPECT_NEAR(usp4_integrate([](double a, double b) { return 2 * (std::cos(a) + std::cos(b)); }), 0.0, 1e-6);
  // Fourth moment of the USp(4) trace is 3.
  EXPECT_NEAR(usp4_integrate([](double a, double b) { return std::pow(2 * (std::cos(a) + std::cos(b)), 4); }), 3.0,
              1e-5);
}

TEST(AdaptiveSimpson, Polynomials) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return x * x * x * x; }, 0, 2, 1e-12), 32.0 / 5, 1e-11);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(x); }, 0, 1, 1e-12), std::exp(1.0) - 1, 1e-11);
}

TEST(KsDistance, QuantileSamplesFitPerfectly) {
  for (Kind k : {Kind::sato_tate, Kind::uniform}) {
    const STMeasure1D m(k);
    std::vector<double> sample;
    for (int i = 0; i < 1000; ++i)
      sample.push_back(oracle::quantile([&](double t) { return m.cdf(t); }, (i + 0.5) / 1000));
    EXPECT_LE(ks_distance(sample, m), 1e-3 + 1e-9) << m.name();
  }
}

TEST(KsDistance, ConstantSampleAgainstSatoTate) {
  const std::vector<double> sample(100, M_PI / 2);
  const double d = ks_distance(sample, STMeasure1D(Kind::sato_tate));
  EXPECT_GE(d, 0.4);
  EXPECT_NEAR(d, 0.5, 1e-12);
}

TEST(KsDistance, DiracSplit) {
  const STMeasure1D dirac(Kind::half_uniform_dirac);
  const STMeasure1D uniform(Kind::uniform);
  std::vector<double> sample;
  for (int i = 0; i < 1000; ++i) {
    sample.push_back(oracle::quantile([&](double t) { return uniform.cdf(t); }, (i + 0.5) / 1000));
    sample.push_back(M_PI / 2);
  }
  EXPECT_LE(ks_distance(sample, dirac), 1e-3 + 1e-9);
  // Atom mass 0.7 instead of 0.5.
  std::vector<double> heavy(sample.begin(), sample.end());
  for (int i = 0; i < 1000; ++i) heavy.push_back(M_PI / 2);
  EXPECT_NEAR(ks_distance(heavy, dirac), 2.0 / 3 - 0.5, 1e-9);
  EXPECT_THROW(ks_distance({}, dirac), Error);
}

TEST(STTable, Shape) {
  const auto& table = embedded_st_table();
  ASSERT_EQ(table.size(), kSTGroupCount);
  std::map<int, int> per_class;
  for (const auto& row : table) {
    EXPECT_EQ(row.second_moment, row.endo_rank) << row.name;
    ++per_class[row.second_moment];
    const int deg = row.example_curve.degree();
    EXPECT_TRUE(deg == 5 || deg == 6) << row.name;
  }
  EXPECT_EQ(per_class[4], 2);
  EXPECT_EQ(per_class[2], 16);
  EXPECT_EQ(per_class[1], 16);
  EXPECT_EQ(table.back().name, "USp(4)");
  EXPECT_EQ(table.back().example_curve, parse_polynomial("x^5 - x + 1"));
}

TEST(STTable, DataFileMatchesEmbeddedCopy) {
  const auto rows = load_st_table(std::string(NAGAOLAB_DATA_DIR) + "/st_groups_q.txt");
  ASSERT_EQ(rows.size(), kSTGroupCount);
  const auto& embedded = embedded_st_table();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].name, embedded[i].name);
    EXPECT_EQ(rows[i].endo_algebra, embedded[i].endo_algebra);
    EXPECT_EQ(rows[i].second_moment, embedded[i].second_moment);
    EXPECT_EQ(rows[i].example_curve, embedded[i].example_curve);
  }
  EXPECT_EQ(load_st_table("/nonexistent/table.txt").size(), kSTGroupCount);
}

TEST(STTable, ParserRejectsBadRows) {
  std::istringstream missing("J(C_2),C,2,2\n");
  EXPECT_THROW(parse_st_table(missing), Error);
  std::istringstream bad_int("J(C_2),C,two,2,x^5-x\n");
  EXPECT_THROW(parse_st_table(bad_int), Error);
  std::istringstream braces("# comment\nC_{2,1},M_2(R),4,4,x^6+1\n");
  const auto rows = parse_st_table(braces);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].name, "C_{2,1}");
}

TEST(IdentifySTClass, Examples) {
  const auto four = identify_st_class(with_moment(4.02));
  EXPECT_EQ(four.moment_class, 4);
  EXPECT_EQ(names(four.candidates), (std::vector<std::string>{"C_{2,1}", "E_1"}));

  const auto two = identify_st_class(with_moment(1.9));
  EXPECT_EQ(two.moment_class, 2);
  EXPECT_EQ(two.candidates.size(), 16u);

  const auto none = identify_st_class(with_moment(10));
  EXPECT_TRUE(none.no_class);
  EXPECT_TRUE(none.candidates.empty());
  EXPECT_FALSE(none.moment_class.has_value());

  EXPECT_THROW(identify_st_class(with_moment(1), 0), Error);
}

TEST(IdentifySTClass, StableNearClassCenters) {
  const double tol = kDefaultClassTolerance;
  for (double center : {1.0, 2.0, 4.0}) {
    const auto base = names(identify_st_class(with_moment(center), tol).candidates);
    for (double eps : {-0.12, -0.05, 0.0, 0.05, 0.12})
      EXPECT_EQ(names(identify_st_class(with_moment(center + eps), tol).candidates), base) << center << eps;
  }
}

TEST(PredictRank, Examples) {
  EXPECT_EQ(predict_rank(parse_polynomial("x^5 - x + 1"), 1), 1);
  EXPECT_EQ(predict_rank(parse_polynomial("x^6 + 1"), 4), 4);
  EXPECT_EQ(predict_rank(parse_polynomial("x^3 + x"), 1), 1);
  EXPECT_THROW(predict_rank(parse_polynomial("x^3 + x"), 4), Error);
  EXPECT_THROW(predict_rank(parse_polynomial("x^5 + 1"), 3), Error);
}

TEST(CMCurve, ZeroFractionAndUniformAngles) {
  const auto e = curve_from_poly(parse_polynomial("x^3 + x"));
  const auto traces = trace_sweep(e, 3, 100000, 2);
  const auto m = empirical_moments(traces, 100000);
  EXPECT_GE(m.zero_fraction, 0.49);
  EXPECT_LE(m.zero_fraction, 0.51);
  EXPECT_NEAR(m.second_moment, 1.0, 0.1);
  std::vector<double> nonzero;
  for (const auto& t : traces)
    if (t.a != 0) nonzero.push_back(normalized_angle(t));
  EXPECT_LE(ks_distance(nonzero, STMeasure1D(Kind::uniform)), 0.02);
}
