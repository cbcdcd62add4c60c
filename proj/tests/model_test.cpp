#include "pipefair/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pipefair/error.hpp"

using namespace pipefair;

TEST(AdmissionRule, ThresholdSentinels) {
  EXPECT_EQ(AdmissionRule::threshold(Cutoff::minus_infinity()).kind(), AdmissionRule::Kind::AdmitAll);
  EXPECT_EQ(AdmissionRule::threshold(Cutoff::plus_infinity()).kind(), AdmissionRule::Kind::AdmitNone);
  EXPECT_TRUE(AdmissionRule::admit_none().is_zero());
  EXPECT_FALSE(AdmissionRule::admit_all().is_zero());
  EXPECT_DOUBLE_EQ(AdmissionRule::threshold(1.25).beta(), 1.25);
  EXPECT_THROW(AdmissionRule::admit_all().beta(), InvalidArgument);
}

TEST(AdmissionRule, StepValidation) {
  EXPECT_THROW(AdmissionRule::monotone_step({}), InvalidArgument);
  EXPECT_THROW(AdmissionRule::monotone_step({{1, 0.5}, {0, 1}}), InvalidArgument);
  EXPECT_THROW(AdmissionRule::monotone_step({{0, 0.5}, {0, 1}}), InvalidArgument);
  EXPECT_THROW(AdmissionRule::monotone_step({{0, 0.7}, {1, 0.5}}), InvalidArgument);
  EXPECT_THROW(AdmissionRule::monotone_step({{0, 1.5}}), InvalidArgument);
  EXPECT_THROW(AdmissionRule::monotone_step({{0, -0.1}}), InvalidArgument);
  EXPECT_THROW(AdmissionRule::monotone_step({{std::nan(""), 0.5}}), InvalidArgument);
  EXPECT_NO_THROW(AdmissionRule::monotone_step({{0, 0.5}, {1, 1}}));
}

TEST(AdmissionRule, StepIsRightContinuous) {
  const auto r = AdmissionRule::monotone_step({{0, 0.5}, {1, 1}});
  EXPECT_DOUBLE_EQ(r.admit_probability(-0.001), 0.0);
  EXPECT_DOUBLE_EQ(r.admit_probability(0.0), 0.5);
  EXPECT_DOUBLE_EQ(r.admit_probability(0.999), 0.5);
  EXPECT_DOUBLE_EQ(r.admit_probability(1.0), 1.0);
  EXPECT_EQ(r.describe(), "step:0:0.5,1:1");
}

TEST(AcceptanceProbability, Examples) {
  for (double beta : {-2.0, 0.0, 3.5}) {
    EXPECT_NEAR(acceptance_probability(AdmissionRule::threshold(beta), beta), 0.5, 1e-15);
  }
  for (double t : {-50.0, 0.0, 7.0}) {
    EXPECT_DOUBLE_EQ(acceptance_probability(AdmissionRule::admit_all(), t), 1.0);
    EXPECT_DOUBLE_EQ(acceptance_probability(AdmissionRule::admit_none(), t), 0.0);
  }
  const auto step = AdmissionRule::monotone_step({{0, 0.5}, {1, 1}});
  const double x10 = acceptance_probability(step, 10.0);
  EXPECT_NEAR(x10, 1.0, 1e-15);
  EXPECT_LE(x10, 1.0);
}

TEST(AcceptanceProbability, StepMatchesBruteForceIntegral) {
  const auto step = AdmissionRule::monotone_step({{-1, 0.2}, {0.5, 0.6}, {2, 1}});
  for (double t : {-3.0, -0.5, 0.7, 2.5, 10.0}) {
    auto integrand = [&](double s) { return step.admit_probability(s) * oracle::pdf(s - t); };
    // Integrate piece by piece so Simpson never straddles a jump.
    double ref = 0.0;
    const double edges[] = {t - 40.0, -1.0, 0.5, 2.0, t + 40.0};
    for (int i = 0; i < 4; ++i) {
      const double a = std::max(edges[i], t - 40.0), b = std::min(edges[i + 1], t + 40.0);
      if (b > a) ref += oracle::simpson(integrand, a + 1e-13, b - 1e-13, 20000);
    }
    EXPECT_NEAR(acceptance_probability(step, t), ref, 1e-10) << t;
  }
}

TEST(AcceptanceProbability, MonotoneInType) {
  const AdmissionRule rules[] = {AdmissionRule::threshold(0.3),
                                 AdmissionRule::monotone_step({{-1, 0.1}, {0, 0.4}, {3, 0.9}}),
                                 AdmissionRule::admit_all()};
  for (const auto& r : rules) {
    double prev = 0.0;
    for (double t = -15.0; t <= 15.0; t += 0.05) {
      const double x = acceptance_probability(r, t);
      EXPECT_GE(x, prev);
      EXPECT_GT(x, 0.0);
      EXPECT_LE(x, 1.0);
      prev = x;
    }
  }
}

TEST(AcceptanceProbability, SingleKnotStepEqualsThreshold) {
  const auto th = AdmissionRule::threshold(0.8);
  const auto st = AdmissionRule::monotone_step({{0.8, 1.0}});
  for (double t = -10.0; t <= 10.0; t += 0.25) {
    EXPECT_NEAR(acceptance_probability(th, t), acceptance_probability(st, t), 1e-12);
  }
}

TEST(AcceptanceProbability, LogForm) {
  const auto r = AdmissionRule::monotone_step({{0, 0.5}, {1, 1}});
  EXPECT_NEAR(log_acceptance_probability(r, 0.3), std::log(acceptance_probability(r, 0.3)), 1e-14);
  // Deep lower tail stays finite in log space.
  const double lx = log_acceptance_probability(AdmissionRule::threshold(0.0), -60.0);
  EXPECT_TRUE(std::isfinite(lx));
  EXPECT_LT(lx, -1500.0);
  EXPECT_EQ(log_acceptance_probability(AdmissionRule::admit_none(), 0.0),
            -std::numeric_limits<double>::infinity());
}

TEST(Scenario, Validation) {
  Scenario s{{0, 1}, {-1, 1}, {1, true}, {0.5, 0.5}};
  EXPECT_TRUE(validate(s).empty());
  Scenario same = s;
  same.pop2 = same.pop1;
  EXPECT_EQ(validate(same).size(), 1u);
  Scenario bad = s;
  bad.pop1.sigma = 0.0;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = s;
  bad.grading.gamma = -1.0;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad.grading.disclose = false;
  EXPECT_NO_THROW(validate(bad));
  bad = s;
  bad.cost = {0.7, 0.3};
  EXPECT_THROW(validate(bad), InvalidArgument);
  EXPECT_THROW(s.prior(3), InvalidArgument);
  EXPECT_TRUE(CostSpec::single(0.4).is_single());
}

TEST(GaussianRng, DeterministicPerSeed) {
  GaussianRng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    if (i == 0) EXPECT_NE(x, c.normal());
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SampleStudent, SameSeedSameDraws) {
  GaussianRng a(42), b(42);
  const PopulationPrior p{0.5, 2.0};
  for (int i = 0; i < 10; ++i) {
    const auto x = sample_student(p, {1.5, true}, a);
    const auto y = sample_student(p, {1.5, true}, b);
    EXPECT_EQ(x.t, y.t);
    EXPECT_EQ(x.s, y.s);
    EXPECT_EQ(x.g, y.g);
  }
  GaussianRng r(1);
  EXPECT_TRUE(std::isnan(sample_student(p, {1.0, false}, r).g));
}

TEST(SampleStudent, EmpiricalMoments) {
  const PopulationPrior p{0.5, 2.0};
  const double gamma = 1.5;
  GaussianRng rng(2024);
  const int n = 1000000;
  double st = 0, st2 = 0, ss = 0, ss2 = 0, sg = 0, sg2 = 0, sx = 0, sy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const auto d = sample_student(p, {gamma, true}, rng);
    st += d.t;
    st2 += d.t * d.t;
    ss += d.s;
    ss2 += d.s * d.s;
    sg += d.g;
    sg2 += d.g * d.g;
    const double x = d.s - d.t, y = d.g - d.t;
    sx += x;
    sy += y;
    sxy += x * y;
  }
  const double mt = st / n;
  EXPECT_NEAR(mt, p.mu, 4.0 * p.sigma / 1000.0);
  auto var = [&](double s1, double s2) { return s2 / n - (s1 / n) * (s1 / n); };
  EXPECT_NEAR(var(st, st2), 4.0, 0.03);
  EXPECT_NEAR(var(ss, ss2), 5.0, 0.04);
  EXPECT_NEAR(var(sg, sg2), 4.0 + 2.25, 0.05);
  const double cov = sxy / n - (sx / n) * (sy / n);
  EXPECT_NEAR(cov, 0.0, 4.0 * gamma / 1000.0);
}
