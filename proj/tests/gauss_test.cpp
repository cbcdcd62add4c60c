#include "pipefair/gauss.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pipefair/error.hpp"

using namespace pipefair;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(Cutoff, SentinelsFromInfinities) {
  EXPECT_TRUE(Cutoff(-kInf).is_minus_infinity());
  EXPECT_TRUE(Cutoff(kInf).is_plus_infinity());
  EXPECT_TRUE(Cutoff(1.5).is_finite());
  EXPECT_DOUBLE_EQ(Cutoff(1.5).value(), 1.5);
  EXPECT_THROW(Cutoff::minus_infinity().value(), InvalidArgument);
  EXPECT_THROW(Cutoff(std::nan("")), InvalidArgument);
  EXPECT_LT(Cutoff::minus_infinity(), Cutoff(-1e300));
  EXPECT_GT(Cutoff::plus_infinity(), Cutoff(1e300));
}

TEST(Cutoff, Parse) {
  EXPECT_TRUE(parse_cutoff("-inf").is_minus_infinity());
  EXPECT_TRUE(parse_cutoff("inf").is_plus_infinity());
  EXPECT_TRUE(parse_cutoff("+inf").is_plus_infinity());
  EXPECT_DOUBLE_EQ(parse_cutoff("0.25").value(), 0.25);
  EXPECT_THROW(parse_cutoff("abc"), InvalidArgument);
  EXPECT_THROW(parse_cutoff("1x"), InvalidArgument);
  EXPECT_EQ(parse_cutoff("-inf").to_string(), "-inf");
}

TEST(StdPdfCdf, Examples) {
  auto r = std_pdf_cdf(0.0);
  EXPECT_NEAR(r.density, 0.3989422804014327, 1e-15);
  EXPECT_DOUBLE_EQ(r.probability, 0.5);

  r = std_pdf_cdf(40.0);
  EXPECT_LT(r.density, 1e-300);
  EXPECT_DOUBLE_EQ(r.probability, 1.0);

  const auto m = std_pdf_cdf(-1.0);
  const auto p = std_pdf_cdf(1.0);
  EXPECT_DOUBLE_EQ(m.density, p.density);
  EXPECT_NEAR(m.probability, 1.0 - p.probability, 1e-16);
}

TEST(StdPdfCdf, RejectsNonFinite) {
  EXPECT_THROW(std_pdf_cdf(kInf), InvalidArgument);
  EXPECT_THROW(std_pdf_cdf(std::nan("")), InvalidArgument);
  EXPECT_THROW(hazard(kInf), InvalidArgument);
  EXPECT_THROW(hazard(std::nan("")), InvalidArgument);
}

TEST(StdPdfCdf, MatchesErfcOracle) {
  for (double x = -30.0; x <= 30.0; x += 0.37) {
    // Both sides lose about x^2 ulps to the rounding of x in exp and erfc.
    const double rel = 1e-13 + 4e-15 * x * x;
    EXPECT_NEAR(std_cdf(x), oracle::cdf(x), 1e-300 + rel * oracle::cdf(x)) << x;
    EXPECT_NEAR(std_upper_tail(x), oracle::sf(x), 1e-300 + rel * oracle::sf(x)) << x;
    EXPECT_NEAR(std_pdf(x), oracle::pdf(x), 1e-300 + rel * oracle::pdf(x)) << x;
  }
}

TEST(StdPdfCdf, LogForms) {
  EXPECT_NEAR(log_std_pdf(3.0), std::log(oracle::pdf(3.0)), 1e-13);
  EXPECT_NEAR(log_std_cdf(-5.0), std::log(oracle::cdf(-5.0)), 1e-12);
  EXPECT_NEAR(log_std_upper_tail(5.0), std::log(oracle::sf(5.0)), 1e-12);
  // Far tail where the plain value underflows.
  EXPECT_TRUE(std::isfinite(log_std_upper_tail(60.0)));
  EXPECT_NEAR(log_std_upper_tail(60.0), log_std_pdf(60.0) - std::log(60.0), 1e-3);
}

TEST(Hazard, Examples) {
  EXPECT_NEAR(hazard(0.0), std::sqrt(2.0 / M_PI), 1e-14);
  EXPECT_NEAR(hazard(0.0), 0.797884560802865, 1e-14);
  EXPECT_LT(hazard(-40.0), 1e-12);
  const double h50 = hazard(50.0);
  EXPECT_GE(h50, 50.0);
  EXPECT_LE(h50, 50.02);
  EXPECT_NEAR(h50, 50.0199840319056, 1e-11);
}

TEST(Hazard, BranchesAgreeNearSwitch) {
  // The two evaluation branches meet at x = 8.
  for (double x : {7.9, 7.99, 8.0, 8.01, 8.1}) {
    const double direct = oracle::pdf(x) / oracle::sf(x);
    EXPECT_NEAR(hazard(x), direct, 1e-12 * direct) << x;
  }
}

TEST(Hazard, MonotoneAndSandwich) {
  double prev_log = -kInf;
  double prev = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = -40.0 + 80.0 * i / 9999.0;
    const double lh = log_hazard(x);
    const double h = hazard(x);
    EXPECT_GT(lh, prev_log) << x;
    EXPECT_GE(h, prev) << x;
    prev_log = lh;
    prev = h;
    if (x > 0) {
      EXPECT_GE(h, x) << x;
      EXPECT_LE(h, x + 1.0 / x) << x;
    }
  }
}

TEST(Hazard, MillsRatioIsReciprocal) {
  for (double x : {-3.0, 0.0, 2.0, 9.0, 30.0}) {
    EXPECT_NEAR(mills_ratio(x) * hazard(x), 1.0, 1e-14);
  }
}

TEST(TruncatedMean, Examples) {
  EXPECT_NEAR(truncated_mean({0.0, 1.0}, 0.0), std::sqrt(2.0 / M_PI), 1e-14);
  EXPECT_DOUBLE_EQ(truncated_mean({5.0, 2.0}, Cutoff::minus_infinity()), 5.0);
  EXPECT_NEAR(truncated_mean({0.0, 1.0}, 2.0), 2.37321553282284, 1e-12);
}

TEST(TruncatedMean, Errors) {
  EXPECT_THROW(truncated_mean({0.0, 0.0}, 0.0), InvalidArgument);
  EXPECT_THROW(truncated_mean({0.0, -1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(truncated_mean({0.0, 1.0}, Cutoff::plus_infinity()), InvalidArgument);
}

TEST(TruncatedMean, AgreesWithSimpson) {
  for (double lower : {-2.0, 0.5, 3.0}) {
    const GaussianParams g{0.7, 1.3};
    auto dens = [&](double t) { return oracle::pdf((t - g.mean) / g.sd); };
    const double hi = g.mean + 20 * g.sd;
    const double ref = oracle::simpson([&](double t) { return t * dens(t); }, lower, hi) /
                       oracle::simpson(dens, lower, hi);
    EXPECT_NEAR(truncated_mean(g, lower), ref, 1e-10);
  }
}

TEST(TruncatedMean, IncreasingInLowerAndMean) {
  double prev = -kInf;
  for (double lower = -10.0; lower <= 30.0; lower += 0.5) {
    const double m = truncated_mean({0.0, 1.0}, lower);
    EXPECT_GT(m, prev);
    EXPECT_GE(m, std::max(0.0, lower));
    prev = m;
  }
  prev = -kInf;
  for (double mean = -10.0; mean <= 10.0; mean += 0.5) {
    const double m = truncated_mean({mean, 1.0}, 1.0);
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(GaussianProduct, Examples) {
  auto r = gaussian_product({0, 1}, {0, 1});
  EXPECT_NEAR(r.mean, 0.0, 1e-15);
  EXPECT_NEAR(r.sd, std::sqrt(0.5), 1e-15);
  r = gaussian_product({0, 1}, {2, 1});
  EXPECT_NEAR(r.mean, 1.0, 1e-15);
  EXPECT_NEAR(r.sd, std::sqrt(0.5), 1e-15);
  r = gaussian_product({1, 2}, {3, 1});
  EXPECT_NEAR(r.mean, 2.6, 1e-14);
  EXPECT_NEAR(r.sd, std::sqrt(0.8), 1e-15);
  EXPECT_THROW(gaussian_product({0, 0}, {0, 1}), InvalidArgument);
}

TEST(GaussianProduct, SymmetricAndNormalizerMatchesSimpson) {
  const GaussianParams a{-0.4, 0.8}, b{1.7, 1.9};
  const auto ab = gaussian_product(a, b);
  const auto ba = gaussian_product(b, a);
  EXPECT_NEAR(ab.mean, ba.mean, 1e-15);
  EXPECT_NEAR(ab.sd, ba.sd, 1e-15);
  EXPECT_NEAR(ab.log_normalizer, ba.log_normalizer, 1e-15);
  EXPECT_TRUE(std::isfinite(ab.log_normalizer));
  const double ref = oracle::simpson(
      [&](double t) { return oracle::pdf((a.mean - t) / a.sd) * oracle::pdf((b.mean - t) / b.sd); },
      -30.0, 30.0, 60000);
  EXPECT_NEAR(std::exp(ab.log_normalizer), ref, 1e-8 * ref);
}

TEST(ConditionTypeOnScoreGrade, Examples) {
  EXPECT_NEAR(condition_type_on_score_grade({0, 1}, 1.0, 3.0, 3.0).mean, 2.0, 1e-14);
  EXPECT_NEAR(condition_type_on_score_grade({0, 1}, 1.0, 0.0, 0.0).mean, 0.0, 1e-15);
  EXPECT_NEAR(condition_type_on_score_grade({1, 2}, 0.5, 1.0, 1.0).mean, 1.0, 1e-14);
  EXPECT_THROW(condition_type_on_score_grade({0, 1}, 0.0, 0.0, 0.0), InvalidArgument);
}

TEST(ConditionTypeOnScoreGrade, VarianceIndependentOfObservations) {
  const double sd = condition_type_on_score_grade({0.3, 1.4}, 0.7, 0.0, 0.0).sd;
  EXPECT_DOUBLE_EQ(condition_type_on_score_grade({0.3, 1.4}, 0.7, 5.0, -2.0).sd, sd);
}

TEST(ConditionTypeOnScoreGrade, AgreesWithJointDensityQuadrature) {
  const double mu = 0.3, sigma = 1.4, gamma = 0.7;
  for (auto [s, g] : {std::pair{0.0, 0.0}, {2.0, -1.0}, {-1.5, 2.5}}) {
    auto joint = [&](double t) {
      return oracle::pdf((t - mu) / sigma) * oracle::pdf(s - t) * oracle::pdf((g - t) / gamma);
    };
    const double z = oracle::simpson(joint, -20, 20, 40000);
    const double m = oracle::simpson([&](double t) { return t * joint(t); }, -20, 20, 40000) / z;
    const double v =
        oracle::simpson([&](double t) { return (t - m) * (t - m) * joint(t); }, -20, 20, 40000) / z;
    const auto c = condition_type_on_score_grade({mu, sigma}, gamma, s, g);
    EXPECT_NEAR(c.mean, m, 1e-6);
    EXPECT_NEAR(c.sd * c.sd, v, 1e-6);
  }
}
