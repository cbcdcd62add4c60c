#pragma once

// Fairness metrics for a configured pipeline and the threshold sweeps that
// exhibit the impossibility results on grids.
//
// All suprema are grid suprema; the argmax is reported so a caller can refine
// locally.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pipefair/model.hpp"

namespace pipefair {

inline constexpr std::size_t kTypeGridPoints = 2001;
inline constexpr std::size_t kCostGridPoints = 101;
inline constexpr double kTypeGridHalfWidthSds = 6.0;

enum class ExamNoise {
  Unit,  // S = T + N(0, 1)
  None,  // S = T
};

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;

  std::vector<double> values() const;
};

// Parses "lo:hi:points".
GridSpec parse_grid_spec(const std::string& text);

struct AuditGrids {
  GridSpec type_spec;
  GridSpec cost_spec;
  std::vector<double> types;
  std::vector<double> costs;
};

// Type grid spans the union of both priors' +-6 sd ranges; cost grid spans
// [cost.min, cost.max] (a single point when they are equal).
AuditGrids make_audit_grids(const Scenario& scenario, std::size_t type_points = kTypeGridPoints,
                            std::size_t cost_points = kCostGridPoints);

// Everything the audit needs about one group under one admission rule,
// tabulated on the audit grids.
class GroupResponse {
 public:
  GroupResponse(const PopulationPrior& prior, const GradingPolicy& grading,
                const AdmissionRule& rule, ExamNoise exam, const AuditGrids& grids,
                bool with_density = true);

  // x(t) on the type grid.
  std::span<const double> acceptance() const noexcept { return acceptance_; }
  // Pr[T = t | A = 1] on the type grid (empty unless requested).
  std::span<const double> admitted_density() const noexcept { return density_; }
  // Employer's grade cutoff per cost: hire iff grade >= cutoff. -inf means
  // every admit is hired, +inf means nobody is.
  std::span<const Cutoff> grade_cutoffs() const noexcept { return cutoffs_; }

  // Hire probability on the type grid at cost index `c`.
  void hire_probabilities(std::size_t c, std::span<double> out) const;

 private:
  double gamma_ = 1.0;
  std::vector<double> types_;
  std::vector<double> acceptance_;
  std::vector<double> density_;
  std::vector<Cutoff> cutoffs_;
};

// x(t) * (1 - Phi((g_star - t) / gamma)).
double hire_probability_given_type(const PopulationPrior& prior, double gamma,
                                   const AdmissionRule& rule, Cutoff g_star, double t);

struct GapResult {
  double value = 0.0;
  double argmax = 0.0;       // t for EO and sIGM, C for IGM
  double argmax_cost = 0.0;  // EO only
};

// |g*_1(C) - g*_2(C)| with sentinels: equal sentinels give 0, mismatched
// ones +inf.
double grade_cutoff_distance(Cutoff a, Cutoff b);

GapResult eo_gap(const GroupResponse& r1, const GroupResponse& r2, const AuditGrids& grids);
GapResult igm_violation(const GroupResponse& r1, const GroupResponse& r2, const AuditGrids& grids);
GapResult sigm_gap(const GroupResponse& r1, const GroupResponse& r2, const AuditGrids& grids);

GapResult eo_gap(const Scenario& scenario, const AdmissionRule& rule1, const AdmissionRule& rule2,
                 ExamNoise exam = ExamNoise::Unit);
GapResult igm_violation(const Scenario& scenario, const AdmissionRule& rule1,
                        const AdmissionRule& rule2, ExamNoise exam = ExamNoise::Unit);
GapResult sigm_gap(const Scenario& scenario, const AdmissionRule& rule1,
                   const AdmissionRule& rule2, ExamNoise exam = ExamNoise::Unit);

struct FairnessReport {
  double eo_gap = 0.0;
  double eo_argmax = 0.0;
  double eo_argmax_cost = 0.0;
  double igm_violation = 0.0;
  double igm_argmax = 0.0;
  double sigm_gap = 0.0;
  double sigm_argmax = 0.0;
  GridSpec type_grid;
  GridSpec cost_grid;
};

FairnessReport audit(const Scenario& scenario, const AdmissionRule& rule1,
                     const AdmissionRule& rule2, ExamNoise exam = ExamNoise::Unit);

enum class SweepTarget { MultiIgm, MultiEo, Sigm };

const char* to_string(SweepTarget target);
SweepTarget parse_sweep_target(const std::string& text);

struct SweepRecord {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double value = 0.0;
  double argmax = 0.0;
};

struct SweepResult {
  SweepTarget target = SweepTarget::MultiIgm;
  GridSpec grid1;
  GridSpec grid2;
  GridSpec type_grid;
  GridSpec cost_grid;
  // beta1-major, beta2-minor.
  std::vector<SweepRecord> records;
  SweepRecord minimum;
};

// Evaluates the target violation for Threshold(beta1) x Threshold(beta2) over
// the product grid. Output is identical for every thread count.
SweepResult sweep_impossibility(const Scenario& scenario, const GridSpec& grid1,
                                const GridSpec& grid2, SweepTarget target, std::size_t threads);

}  // namespace pipefair
