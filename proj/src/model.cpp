#include "pipefair/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pipefair/error.hpp"

namespace pipefair {

void validate(const PopulationPrior& prior) {
  if (!std::isfinite(prior.mu)) throw InvalidArgument("prior mu must be finite");
  if (!std::isfinite(prior.sigma) || !(prior.sigma > 0.0)) {
    throw InvalidArgument("prior sigma must be finite and positive");
  }
}

void validate(const GradingPolicy& grading) {
  if (grading.disclose && (!std::isfinite(grading.gamma) || !(grading.gamma > 0.0))) {
    throw InvalidArgument("gamma must be finite and positive when grades are disclosed");
  }
}

void validate(const CostSpec& cost) {
  if (!std::isfinite(cost.c_min) || !std::isfinite(cost.c_max)) {
    throw InvalidArgument("costs must be finite");
  }
  if (cost.c_min > cost.c_max) throw InvalidArgument("cost.min must not exceed cost.max");
}

const PopulationPrior& Scenario::prior(int group) const {
  if (group == 1) return pop1;
  if (group == 2) return pop2;
  throw InvalidArgument("group must be 1 or 2");
}

std::vector<std::string> validate(const Scenario& scenario) {
  validate(scenario.pop1);
  validate(scenario.pop2);
  validate(scenario.grading);
  validate(scenario.cost);
  std::vector<std::string> warnings;
  if (scenario.pop1 == scenario.pop2) {
    warnings.emplace_back("identical priors: every fairness notion holds trivially");
  }
  return warnings;
}

AdmissionRule AdmissionRule::threshold(Cutoff beta) {
  if (beta.is_minus_infinity()) return admit_all();
  if (beta.is_plus_infinity()) return admit_none();
  AdmissionRule r;
  r.kind_ = Kind::Threshold;
  r.beta_ = beta.value();
  r.build_jumps();
  return r;
}

AdmissionRule AdmissionRule::monotone_step(std::vector<Knot> knots) {
  if (knots.empty()) throw InvalidArgument("monotone step rule needs at least one knot");
  double prev_p = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const Knot& k = knots[i];
    if (!std::isfinite(k.score)) throw InvalidArgument("knot scores must be finite");
    if (!(k.probability >= 0.0 && k.probability <= 1.0)) {
      throw InvalidArgument("knot probabilities must lie in [0, 1]");
    }
    if (i > 0 && !(k.score > knots[i - 1].score)) {
      throw InvalidArgument("knot scores must be strictly increasing");
    }
    if (k.probability < prev_p) {
      throw InvalidArgument("knot probabilities must be non-decreasing");
    }
    prev_p = k.probability;
  }
  AdmissionRule r;
  r.kind_ = Kind::MonotoneStep;
  r.knots_ = std::move(knots);
  r.build_jumps();
  return r;
}

AdmissionRule AdmissionRule::admit_all() {
  AdmissionRule r;
  r.kind_ = Kind::AdmitAll;
  r.build_jumps();
  return r;
}

AdmissionRule AdmissionRule::admit_none() {
  AdmissionRule r;
  r.kind_ = Kind::AdmitNone;
  r.build_jumps();
  return r;
}

double AdmissionRule::beta() const {
  if (kind_ != Kind::Threshold) throw InvalidArgument("rule is not a threshold rule");
  return beta_;
}

void AdmissionRule::build_jumps() {
  jumps_.clear();
  base_ = 0.0;
  switch (kind_) {
    case Kind::AdmitAll:
      base_ = 1.0;
      break;
    case Kind::AdmitNone:
      break;
    case Kind::Threshold:
      jumps_.push_back({beta_, 1.0});
      break;
    case Kind::MonotoneStep: {
      double prev = 0.0;
      for (const Knot& k : knots_) {
        if (k.probability > prev) jumps_.push_back({k.score, k.probability - prev});
        prev = k.probability;
      }
      break;
    }
  }
}

double AdmissionRule::admit_probability(double score) const {
  double p = base_;
  for (const Jump& j : jumps_) {
    if (score >= j.score) p += j.increment;
  }
  return std::min(p, 1.0);
}

std::string AdmissionRule::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind_) {
    case Kind::AdmitAll:
      return "all";
    case Kind::AdmitNone:
      return "none";
    case Kind::Threshold:
      os << "threshold:" << beta_;
      return os.str();
    case Kind::MonotoneStep:
      os << "step:";
      for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (i) os << ',';
        os << knots_[i].score << ':' << knots_[i].probability;
      }
      return os.str();
  }
  return "";
}

double acceptance_probability(const AdmissionRule& rule, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("type must be finite");
  double x = rule.base();
  for (const auto& j : rule.jumps()) x += j.increment * std_upper_tail(j.score - t);
  return std::min(x, 1.0);
}

double log_acceptance_probability(const AdmissionRule& rule, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("type must be finite");
  if (rule.is_zero()) return -std::numeric_limits<double>::infinity();
  if (rule.base() >= 1.0) return 0.0;
  // log-sum-exp over the jump terms (and the base, if any).
  std::vector<double> terms;
  terms.reserve(rule.jumps().size() + 1);
  if (rule.base() > 0.0) terms.push_back(std::log(rule.base()));
  for (const auto& j : rule.jumps()) {
    terms.push_back(std::log(j.increment) + log_std_upper_tail(j.score - t));
  }
  const double m = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double v : terms) sum += std::exp(v - m);
  return std::min(0.0, m + std::log(sum));
}

double GaussianRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

StudentDraw sample_student(const PopulationPrior& prior, const GradingPolicy& grading,
                           GaussianRng& rng) {
  StudentDraw d;
  d.t = prior.mu + prior.sigma * rng.normal();
  d.s = d.t + kExamNoiseSd * rng.normal();
  const double y = rng.normal();
  d.g = grading.disclose ? d.t + grading.gamma * y : std::numeric_limits<double>::quiet_NaN();
  return d;
}

}  // namespace pipefair
