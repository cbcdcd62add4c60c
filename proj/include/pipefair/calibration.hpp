#pragma once

// Constructive admission policies for the regimes where fairness is
// attainable, and the gamma = 1 equal-opportunity fixed point.

#include <string>
#include <utility>
#include <vector>

#include "pipefair/model.hpp"

namespace pipefair {

inline constexpr double kCalibrationTol = 1e-8;

struct CalibrationResult {
  double beta1 = 0.0;
  double beta2 = 0.0;
  // Common hiring grade. NaN when the groups have no common grade cutoff.
  double g_star = 0.0;
  double residual1 = 0.0;
  double residual2 = 0.0;
  bool converged = false;
  std::string diagnostics;
};

// Threshold beta with E[T | S >= beta, G = g_star] = cost. Requires the
// admit-all mean at g_star to lie below cost.
double calibrate_threshold_at_grade(const PopulationPrior& prior, double gamma, double g_star,
                                    double cost);

// Group-specific thresholds that make the employer's hiring grade the same
// for both groups at a single cost C. The common grade is placed where each
// group's admit-all mean sits at least 1.0 below C.
CalibrationResult calibrate_single_threshold_igm(const Scenario& scenario);

// Smallest common threshold (to 1e-8) such that E[T_i | S_i >= beta] >= cost.max
// for both groups, when grades are withheld. -inf if admitting everyone works.
Cutoff no_grades_threshold(const Scenario& scenario);

// Threshold at cost.max, applied to types directly (noiseless exam).
AdmissionRule noiseless_rule(const CostSpec& cost);

inline constexpr double kFixedPointDamping = 0.5;
inline constexpr int kFixedPointMaxIterations = 500;

struct EoFixedPointResult {
  CalibrationResult calibration;  // residuals are the two cross-residuals
  double g_star1 = 0.0;           // g*_1(C) under beta1
  double g_star2 = 0.0;           // g*_2(C) under beta2
  int iterations = 0;
  std::vector<std::pair<double, double>> trajectory;
  // Only meaningful when converged: sup over the audit type grid of the
  // hire-probability gap at C.
  double eo_residual = 0.0;
  double eo_argmax = 0.0;
};

// Damped iteration of beta1 <- g*_2(C; beta2), beta2 <- g*_1(C; beta1).
// Requires gamma == 1 exactly, disclosed grades and a single cost.
EoFixedPointResult eo_fixed_point_gamma1(const Scenario& scenario);

}  // namespace pipefair
