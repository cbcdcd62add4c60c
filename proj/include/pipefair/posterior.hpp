#pragma once

// Employer-side inference: what a rational employer believes about an
// admitted student's type after seeing the grade.

#include "pipefair/model.hpp"

namespace pipefair {

// The prior times the grade likelihood, as a Gaussian in t:
//   T | G = g  ~  N(mu_of_g, lambda_sq)
// with lambda_sq = gamma^2 sigma^2 / (gamma^2 + sigma^2) and
// mu_of_g = (gamma^2 mu + sigma^2 g) / (sigma^2 + gamma^2).
struct EffectiveGradeReduction {
  double lambda_sq = 0.0;
  double mu_of_g = 0.0;
};

EffectiveGradeReduction reduce_grade(const PopulationPrior& prior, double gamma, double g);

enum class PosteriorMethod { ClosedForm, Quadrature, Reduction };

const char* to_string(PosteriorMethod method);

struct PosteriorSummary {
  double mean = 0.0;
  double grade = 0.0;
  AdmissionRule rule = AdmissionRule::admit_all();
  PosteriorMethod method = PosteriorMethod::ClosedForm;
};

// E[T | S >= beta, G = g] in closed form via the normal hazard rate.
// beta = -inf gives the admit-all mean; beta = +inf is rejected.
double posterior_mean_threshold(const PopulationPrior& prior, double gamma, Cutoff beta, double g);

// E[T^k | G = g, A = 1] by adaptive quadrature over t. 1 <= k <= 8.
double posterior_moment(const PopulationPrior& prior, double gamma, const AdmissionRule& rule,
                        double g, int k);

// E[T | G = g, A = 1] through the score-space reduction:
//   e(g) = mu(g)/(lambda^2+1) + lambda^2/(lambda^2+1) * E_w[s]
// where E_w averages s under the weight A(s) phi((mu(g) - s)/sqrt(lambda^2+1)).
// Works for any non-zero rule; intended for MonotoneStep.
double posterior_mean_randomized(const PopulationPrior& prior, double gamma,
                                 const AdmissionRule& rule, double g);

// Closed form for Threshold/AdmitAll, reduction for MonotoneStep.
PosteriorSummary posterior_mean(const PopulationPrior& prior, double gamma,
                                const AdmissionRule& rule, double g);

inline constexpr double kHiringResidualTol = 1e-10;

// g*(C): the grade at which the posterior mean equals C. Bracket expansion
// from the admit-all inverse, then bisection to |residual| <= 1e-10.
double hiring_grade_threshold(const PopulationPrior& prior, double gamma,
                              const AdmissionRule& rule, double cost);

// Noiseless exam (S = T) with a threshold rule: E[T | T >= beta, G = g].
double posterior_mean_noiseless_exam(const PopulationPrior& prior, double gamma, Cutoff beta,
                                     double g);

// g*(C) under a noiseless exam. -inf when every admitted student is hired.
Cutoff hiring_grade_threshold_noiseless_exam(const PopulationPrior& prior, double gamma,
                                             Cutoff beta, double cost);

// E[T | A = 1] when no grade is reported.
double posterior_mean_no_grades(const PopulationPrior& prior, const AdmissionRule& rule);

// Pr[T = t | A = 1] = x(t) P(t) / Z. The normalizer is integrated once at
// construction.
class AdmittedTypeDensity {
 public:
  AdmittedTypeDensity(const PopulationPrior& prior, const AdmissionRule& rule);

  double operator()(double t) const;
  double log_density(double t) const;
  // log Z = log Pr[A = 1].
  double log_normalizer() const noexcept { return log_normalizer_; }

 private:
  PopulationPrior prior_;
  AdmissionRule rule_;
  double log_normalizer_ = 0.0;
};

double admitted_type_density(const PopulationPrior& prior, const AdmissionRule& rule, double t);

}  // namespace pipefair
