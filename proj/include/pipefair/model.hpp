#pragma once

// Domain types of the two-stage screening pipeline and its generative model.
//
//   T ~ N(mu_i, sigma_i^2)        student type, group i
//   S = T + X,  X ~ N(0, 1)       entrance exam score
//   G = T + Y,  Y ~ N(0, gamma^2) college grade, Y independent of X
//
// The exam noise variance is fixed at 1 and is not configurable.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pipefair/gauss.hpp"

namespace pipefair {

inline constexpr double kExamNoiseSd = 1.0;

struct PopulationPrior {
  double mu = 0.0;
  double sigma = 1.0;

  GaussianParams as_gaussian() const { return {mu, sigma}; }
  friend bool operator==(const PopulationPrior&, const PopulationPrior&) = default;
};

void validate(const PopulationPrior& prior);

struct GradingPolicy {
  double gamma = 1.0;
  // false models a college that withholds grades; gamma is then ignored.
  bool disclose = true;
};

void validate(const GradingPolicy& grading);

struct Knot {
  double score = 0.0;
  double probability = 0.0;
};

// Monotone admission rule A: score -> admission probability.
//
// MonotoneStep is right-continuous: A(s) = p_j on [score_j, score_{j+1}) and 0
// below the first knot.
class AdmissionRule {
 public:
  enum class Kind { Threshold, MonotoneStep, AdmitAll, AdmitNone };

  // A(s) = base + sum of increments over jumps with score <= s.
  struct Jump {
    double score = 0.0;
    double increment = 0.0;
  };

  // -inf maps to AdmitAll, +inf to AdmitNone.
  static AdmissionRule threshold(Cutoff beta);
  // Scores strictly increasing, probabilities in [0, 1] and non-decreasing.
  static AdmissionRule monotone_step(std::vector<Knot> knots);
  static AdmissionRule admit_all();
  static AdmissionRule admit_none();

  Kind kind() const noexcept { return kind_; }
  // Threshold only.
  double beta() const;
  // MonotoneStep only.
  const std::vector<Knot>& knots() const noexcept { return knots_; }

  double base() const noexcept { return base_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }

  bool is_zero() const noexcept { return base_ == 0.0 && jumps_.empty(); }
  double admit_probability(double score) const;

  std::string describe() const;

 private:
  AdmissionRule() = default;
  void build_jumps();

  Kind kind_ = Kind::AdmitNone;
  double beta_ = 0.0;
  std::vector<Knot> knots_;
  double base_ = 0.0;
  std::vector<Jump> jumps_;
};

struct CostSpec {
  double c_min = 0.0;
  double c_max = 0.0;

  static CostSpec single(double c) { return {c, c}; }
  bool is_single() const noexcept { return c_min == c_max; }
};

void validate(const CostSpec& cost);

struct Scenario {
  PopulationPrior pop1;
  PopulationPrior pop2;
  GradingPolicy grading;
  CostSpec cost;

  const PopulationPrior& prior(int group) const;
};

// Throws InvalidArgument on invalid content. Returns warnings, e.g. for
// identical priors (a legal but trivial configuration).
std::vector<std::string> validate(const Scenario& scenario);

// x(t) = Pr[A = 1 | T = t] = integral of A(s) phi(s - t) ds.
double acceptance_probability(const AdmissionRule& rule, double t);
// log x(t); -inf for the zero rule.
double log_acceptance_probability(const AdmissionRule& rule, double t);

// Seeded source of uniforms and standard normals. Engine is std::mt19937_64;
// uniforms take the top 53 bits; normals use the Box-Muller transform with the
// sine half cached. The sequence is fully determined by the seed.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

struct StudentDraw {
  double t = 0.0;
  double s = 0.0;
  double g = 0.0;  // NaN when grades are withheld
};

StudentDraw sample_student(const PopulationPrior& prior, const GradingPolicy& grading,
                           GaussianRng& rng);

}  // namespace pipefair
