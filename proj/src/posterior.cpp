#include "pipefair/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pipefair/error.hpp"
#include "pipefair/numerics.hpp"

namespace pipefair {

namespace {

constexpr double kWindowHalfWidths = 12.0;
// Score-space windows keep the region where the weight is within e^-40 of
// its maximum over the rule's support.
constexpr double kLogWeightDrop = 40.0;
constexpr int kMaxMoment = 8;

void require_gamma(double gamma) {
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
}

void require_nonzero(const AdmissionRule& rule) {
  if (rule.is_zero()) {
    throw InvalidArgument("admission rule admits nobody; conditioning event has probability 0");
  }
}

void require_finite_arg(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

// Integrals of t^k x(t) N(t; center, width^2) for k = 0..max_k, all scaled by
// exp(-log_ref) so that the peak of the integrand is O(1).
struct TiltedMoments {
  double log_ref = 0.0;
  std::vector<double> moments;
};

TiltedMoments tilted_moments(const AdmissionRule& rule, double center, double width, int max_k) {
  const double w2 = width * width;
  // The integrand peaks between the Gaussian center and the mode it would
  // have against each jump of x(t); the window covers all of them.
  double upper_mode = center;
  if (rule.base() == 0.0) {
    for (const auto& j : rule.jumps()) {
      if (j.score > center) upper_mode = std::max(upper_mode, (center + j.score * w2) / (1.0 + w2));
    }
  }
  const double lo = center - kWindowHalfWidths * width;
  const double hi = upper_mode + kWindowHalfWidths * width;

  auto log_f = [&](double t) {
    const double z = (t - center) / width;
    return log_acceptance_probability(rule, t) - 0.5 * z * z - std::log(width) - kLogSqrt2Pi;
  };

  constexpr int kScan = 128;
  double peak = lo;
  double log_ref = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double t = lo + (hi - lo) * i / kScan;
    const double v = log_f(t);
    if (v > log_ref) {
      log_ref = v;
      peak = t;
    }
  }
  if (!std::isfinite(log_ref)) throw NumericalError("integrand vanishes on the whole window");

  TiltedMoments out;
  out.log_ref = log_ref;
  out.moments.resize(static_cast<std::size_t>(max_k) + 1);
  for (int k = 0; k <= max_k; ++k) {
    auto integrand = [&](double t) { return std::pow(t, k) * std::exp(log_f(t) - log_ref); };
    out.moments[static_cast<std::size_t>(k)] =
        numerics::integrate(integrand, lo, peak) + numerics::integrate(integrand, peak, hi);
  }
  return out;
}

// Mean of s under the weight A(s) phi((m - s)/tau).
double score_weighted_mean(const AdmissionRule& rule, double m, double tau) {
  struct Segment {
    Cutoff lo;
    Cutoff hi;
    double value;
  };
  std::vector<Segment> segments;
  const auto& jumps = rule.jumps();
  double level = rule.base();
  Cutoff seg_lo = Cutoff::minus_infinity();
  for (const auto& j : jumps) {
    if (level > 0.0) segments.push_back({seg_lo, j.score, level});
    level += j.increment;
    seg_lo = j.score;
  }
  if (level > 0.0) segments.push_back({seg_lo, Cutoff::plus_infinity(), level});
  if (segments.empty()) throw InvalidArgument("admission rule admits nobody");

  // Point of the support closest to m, and the window around it.
  const double support_lo = segments.front().lo.is_finite() ? segments.front().lo.value() : m;
  const double nearest = std::max(m, support_lo);
  const double dist = nearest - m;
  const double radius = std::sqrt(dist * dist + 2.0 * tau * tau * kLogWeightDrop);
  const double win_lo = m - radius;
  const double win_hi = m + radius;

  auto weight = [&](double s) {
    const double u = s - m;
    return std::exp(-(u * u - dist * dist) / (2.0 * tau * tau));
  };

  double num = 0.0;
  double den = 0.0;
  for (const Segment& seg : segments) {
    const double a = seg.lo.is_finite() ? std::max(seg.lo.value(), win_lo) : win_lo;
    const double b = seg.hi.is_finite() ? std::min(seg.hi.value(), win_hi) : win_hi;
    if (!(b > a)) continue;
    den += seg.value * numerics::integrate(weight, a, b);
    num += seg.value * numerics::integrate([&](double s) { return s * weight(s); }, a, b);
  }
  if (!(den > 0.0)) throw NumericalError("score weight vanished on the admission region");
  return num / den;
}

}  // namespace

EffectiveGradeReduction reduce_grade(const PopulationPrior& prior, double gamma, double g) {
  validate(prior);
  require_gamma(gamma);
  require_finite_arg(g, "grade");
  const double v = prior.sigma * prior.sigma;
  const double w = gamma * gamma;
  return {w * v / (w + v), (w * prior.mu + v * g) / (v + w)};
}

const char* to_string(PosteriorMethod method) {
  switch (method) {
    case PosteriorMethod::ClosedForm:
      return "closed-form";
    case PosteriorMethod::Quadrature:
      return "quadrature";
    case PosteriorMethod::Reduction:
      return "reduction";
  }
  return "?";
}

double posterior_mean_threshold(const PopulationPrior& prior, double gamma, Cutoff beta, double g) {
  validate(prior);
  require_gamma(gamma);
  require_finite_arg(g, "grade");
  if (beta.is_plus_infinity()) throw InvalidArgument("threshold +inf admits nobody");
  const double v = prior.sigma * prior.sigma;
  const double w = gamma * gamma;
  const double a = v + w;
  const double base = (w * prior.mu + v * g) / a;
  if (beta.is_minus_infinity()) return base;
  const double root = std::sqrt(a * (a + w * v));
  return base + w * v * hazard((a * beta.value() - w * prior.mu - v * g) / root) / root;
}

double posterior_moment(const PopulationPrior& prior, double gamma, const AdmissionRule& rule,
                        double g, int k) {
  if (k < 1 || k > kMaxMoment) throw InvalidArgument("moment order must be in [1, 8]");
  require_nonzero(rule);
  const auto red = reduce_grade(prior, gamma, g);
  const auto tm = tilted_moments(rule, red.mu_of_g, std::sqrt(red.lambda_sq), k);
  return tm.moments[static_cast<std::size_t>(k)] / tm.moments[0];
}

double posterior_mean_randomized(const PopulationPrior& prior, double gamma,
                                 const AdmissionRule& rule, double g) {
  require_nonzero(rule);
  const auto red = reduce_grade(prior, gamma, g);
  const double tau = std::sqrt(red.lambda_sq + 1.0);
  const double avg = score_weighted_mean(rule, red.mu_of_g, tau);
  return red.mu_of_g / (red.lambda_sq + 1.0) + red.lambda_sq / (red.lambda_sq + 1.0) * avg;
}

PosteriorSummary posterior_mean(const PopulationPrior& prior, double gamma,
                                const AdmissionRule& rule, double g) {
  require_nonzero(rule);
  PosteriorSummary out;
  out.grade = g;
  out.rule = rule;
  switch (rule.kind()) {
    case AdmissionRule::Kind::Threshold:
      out.mean = posterior_mean_threshold(prior, gamma, rule.beta(), g);
      out.method = PosteriorMethod::ClosedForm;
      break;
    case AdmissionRule::Kind::AdmitAll:
      out.mean = posterior_mean_threshold(prior, gamma, Cutoff::minus_infinity(), g);
      out.method = PosteriorMethod::ClosedForm;
      break;
    case AdmissionRule::Kind::MonotoneStep:
      out.mean = posterior_mean_randomized(prior, gamma, rule, g);
      out.method = PosteriorMethod::Reduction;
      break;
    case AdmissionRule::Kind::AdmitNone:
      break;  // rejected above
  }
  return out;
}

namespace {

// Grade at which the admit-all posterior mean equals `cost`.
double admit_all_inverse(const PopulationPrior& prior, double gamma, double cost) {
  const double v = prior.sigma * prior.sigma;
  const double w = gamma * gamma;
  return ((v + w) * cost - w * prior.mu) / v;
}

}  // namespace

double hiring_grade_threshold(const PopulationPrior& prior, double gamma,
                              const AdmissionRule& rule, double cost) {
  validate(prior);
  require_gamma(gamma);
  require_nonzero(rule);
  require_finite_arg(cost, "cost");
  auto residual = [&](double g) { return posterior_mean(prior, gamma, rule, g).mean - cost; };
  return numerics::solve_increasing(residual, admit_all_inverse(prior, gamma, cost),
                                    kHiringResidualTol)
      .x;
}

double posterior_mean_noiseless_exam(const PopulationPrior& prior, double gamma, Cutoff beta,
                                     double g) {
  const auto red = reduce_grade(prior, gamma, g);
  return truncated_mean({red.mu_of_g, std::sqrt(red.lambda_sq)}, beta);
}

Cutoff hiring_grade_threshold_noiseless_exam(const PopulationPrior& prior, double gamma,
                                             Cutoff beta, double cost) {
  validate(prior);
  require_gamma(gamma);
  require_finite_arg(cost, "cost");
  if (beta.is_plus_infinity()) throw InvalidArgument("threshold +inf admits nobody");
  // Every admitted type is at least beta, so the posterior mean is too.
  if (beta.is_finite() && beta.value() >= cost) return Cutoff::minus_infinity();
  auto residual = [&](double g) {
    return posterior_mean_noiseless_exam(prior, gamma, beta, g) - cost;
  };
  return numerics::solve_increasing(residual, admit_all_inverse(prior, gamma, cost),
                                    kHiringResidualTol)
      .x;
}

double posterior_mean_no_grades(const PopulationPrior& prior, const AdmissionRule& rule) {
  validate(prior);
  require_nonzero(rule);
  const double v = prior.sigma * prior.sigma;
  const double score_sd = std::sqrt(1.0 + v);
  switch (rule.kind()) {
    case AdmissionRule::Kind::AdmitAll:
      return prior.mu;
    case AdmissionRule::Kind::Threshold:
      return prior.mu + v / score_sd * hazard((rule.beta() - prior.mu) / score_sd);
    default:
      break;
  }
  // E[T | S = s] = mu + v/(1+v) (s - mu), averaged over admitted scores.
  return prior.mu + v / (1.0 + v) * (score_weighted_mean(rule, prior.mu, score_sd) - prior.mu);
}

AdmittedTypeDensity::AdmittedTypeDensity(const PopulationPrior& prior, const AdmissionRule& rule)
    : prior_(prior), rule_(rule) {
  validate(prior);
  require_nonzero(rule);
  const auto tm = tilted_moments(rule, prior.mu, prior.sigma, 0);
  log_normalizer_ = tm.log_ref + std::log(tm.moments[0]);
}

double AdmittedTypeDensity::log_density(double t) const {
  require_finite_arg(t, "type");
  const double z = (t - prior_.mu) / prior_.sigma;
  return log_acceptance_probability(rule_, t) - 0.5 * z * z - std::log(prior_.sigma) -
         kLogSqrt2Pi - log_normalizer_;
}

double AdmittedTypeDensity::operator()(double t) const { return std::exp(log_density(t)); }

double admitted_type_density(const PopulationPrior& prior, const AdmissionRule& rule, double t) {
  return AdmittedTypeDensity(prior, rule)(t);
}

}  // namespace pipefair
