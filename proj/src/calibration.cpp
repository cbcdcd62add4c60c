#include "pipefair/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pipefair/audit.hpp"
#include "pipefair/error.hpp"
#include "pipefair/numerics.hpp"
#include "pipefair/posterior.hpp"

namespace pipefair {

namespace {

// Slack between C and the admit-all mean at the common grade.
constexpr double kGradeSlack = 1.0;
constexpr double kNoGradesWidthTol = 1e-9;

double admit_all_mean(const PopulationPrior& prior, double gamma, double g) {
  return reduce_grade(prior, gamma, g).mu_of_g;
}

// Grade at which the admit-all mean equals `target`.
double grade_for_admit_all_mean(const PopulationPrior& prior, double gamma, double target) {
  const double v = prior.sigma * prior.sigma;
  const double w = gamma * gamma;
  return ((v + w) * target - w * prior.mu) / v;
}

void require_disclosed_single_cost(const Scenario& scenario) {
  if (!scenario.grading.disclose) throw InvalidArgument("grades must be disclosed (disclose = true)");
  if (!scenario.cost.is_single()) {
    throw InvalidArgument("a single hiring cost is required (cost.min == cost.max)");
  }
}

}  // namespace

double calibrate_threshold_at_grade(const PopulationPrior& prior, double gamma, double g_star,
                                    double cost) {
  if (!(admit_all_mean(prior, gamma, g_star) < cost)) {
    throw InvalidArgument("admit-all posterior mean at the chosen grade already reaches the cost");
  }
  auto residual = [&](double beta) {
    return posterior_mean_threshold(prior, gamma, beta, g_star) - cost;
  };
  return numerics::solve_increasing(residual, cost, kHiringResidualTol).x;
}

CalibrationResult calibrate_single_threshold_igm(const Scenario& scenario) {
  validate(scenario);
  require_disclosed_single_cost(scenario);
  const double gamma = scenario.grading.gamma;
  const double cost = scenario.cost.c_max;

  CalibrationResult out;
  out.g_star = std::min(grade_for_admit_all_mean(scenario.pop1, gamma, cost - kGradeSlack),
                        grade_for_admit_all_mean(scenario.pop2, gamma, cost - kGradeSlack));
  try {
    out.beta1 = calibrate_threshold_at_grade(scenario.pop1, gamma, out.g_star, cost);
    out.beta2 = calibrate_threshold_at_grade(scenario.pop2, gamma, out.g_star, cost);
  } catch (const NumericalError& e) {
    out.converged = false;
    out.diagnostics = e.what();
    return out;
  }
  out.residual1 = posterior_mean_threshold(scenario.pop1, gamma, out.beta1, out.g_star) - cost;
  out.residual2 = posterior_mean_threshold(scenario.pop2, gamma, out.beta2, out.g_star) - cost;
  out.converged = std::abs(out.residual1) <= kCalibrationTol && std::abs(out.residual2) <= kCalibrationTol;
  if (!out.converged) out.diagnostics = "residuals above tolerance after bisection";
  return out;
}

Cutoff no_grades_threshold(const Scenario& scenario) {
  validate(scenario);
  if (scenario.grading.disclose) {
    throw InvalidArgument("no-grades calibration needs a scenario with disclose = false");
  }
  const double target = scenario.cost.c_max;
  auto slack = [&](double beta) {
    const auto rule = AdmissionRule::threshold(beta);
    return std::min(posterior_mean_no_grades(scenario.pop1, rule),
                    posterior_mean_no_grades(scenario.pop2, rule)) -
           target;
  };
  if (std::min(scenario.pop1.mu, scenario.pop2.mu) >= target) return Cutoff::minus_infinity();

  // Bracket: slack(lo) < 0 <= slack(hi).
  double lo = target;
  double hi = target;
  double step = 1.0;
  int doublings = 0;
  if (slack(lo) < 0.0) {
    while (slack(hi) < 0.0) {
      if (++doublings > 200) throw NumericalError("no-grades threshold failed to bracket");
      lo = hi;
      hi = target + step;
      step *= 2.0;
    }
  } else {
    while (slack(lo) >= 0.0) {
      if (++doublings > 200) throw NumericalError("no-grades threshold failed to bracket");
      hi = lo;
      lo = target - step;
      step *= 2.0;
    }
  }
  while (hi - lo > kNoGradesWidthTol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (slack(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

AdmissionRule noiseless_rule(const CostSpec& cost) {
  validate(cost);
  return AdmissionRule::threshold(cost.c_max);
}

EoFixedPointResult eo_fixed_point_gamma1(const Scenario& scenario) {
  validate(scenario);
  require_disclosed_single_cost(scenario);
  if (scenario.grading.gamma != 1.0) {
    throw InvalidArgument("equal-opportunity fixed point requires gamma = 1 exactly; "
                          "for any other gamma no thresholding rule achieves it");
  }
  const double gamma = 1.0;
  const double cost = scenario.cost.c_max;

  EoFixedPointResult out;
  double beta1 = grade_for_admit_all_mean(scenario.pop2, gamma, cost);
  double beta2 = grade_for_admit_all_mean(scenario.pop1, gamma, cost);
  auto cross_residuals = [&](double b1, double b2) {
    return std::pair{posterior_mean_threshold(scenario.pop1, gamma, b1, b2) - cost,
                     posterior_mean_threshold(scenario.pop2, gamma, b2, b1) - cost};
  };

  out.trajectory.emplace_back(beta1, beta2);
  bool converged = false;
  int it = 0;
  try {
    for (; it < kFixedPointMaxIterations; ++it) {
      const auto [r1, r2] = cross_residuals(beta1, beta2);
      if (std::abs(r1) <= kCalibrationTol && std::abs(r2) <= kCalibrationTol) {
        converged = true;
        break;
      }
      const double next1 = hiring_grade_threshold(scenario.pop2, gamma, AdmissionRule::threshold(beta2), cost);
      const double next2 = hiring_grade_threshold(scenario.pop1, gamma, AdmissionRule::threshold(beta1), cost);
      beta1 = (1.0 - kFixedPointDamping) * beta1 + kFixedPointDamping * next1;
      beta2 = (1.0 - kFixedPointDamping) * beta2 + kFixedPointDamping * next2;
      if (!std::isfinite(beta1) || !std::isfinite(beta2)) break;
      out.trajectory.emplace_back(beta1, beta2);
    }
  } catch (const NumericalError& e) {
    out.calibration.diagnostics = e.what();
  }

  out.iterations = it;
  out.calibration.beta1 = beta1;
  out.calibration.beta2 = beta2;
  out.calibration.g_star = std::numeric_limits<double>::quiet_NaN();
  if (std::isfinite(beta1) && std::isfinite(beta2)) {
    const auto [r1, r2] = cross_residuals(beta1, beta2);
    out.calibration.residual1 = r1;
    out.calibration.residual2 = r2;
  }
  out.calibration.converged = converged;
  if (!converged) {
    if (out.calibration.diagnostics.empty()) {
      std::ostringstream os;
      os << "no convergence after " << it << " iterations";
      out.calibration.diagnostics = os.str();
    }
    return out;
  }

  const auto rule1 = AdmissionRule::threshold(beta1);
  const auto rule2 = AdmissionRule::threshold(beta2);
  out.g_star1 = hiring_grade_threshold(scenario.pop1, gamma, rule1, cost);
  out.g_star2 = hiring_grade_threshold(scenario.pop2, gamma, rule2, cost);
  const auto eo = eo_gap(scenario, rule1, rule2);
  out.eo_residual = eo.value;
  out.eo_argmax = eo.argmax;
  return out;
}

}  // namespace pipefair
