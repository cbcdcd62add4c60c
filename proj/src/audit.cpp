#include "pipefair/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "pipefair/error.hpp"
#include "pipefair/gauss.hpp"
#include "pipefair/parallel.hpp"
#include "pipefair/posterior.hpp"

namespace pipefair {

std::vector<double> GridSpec::values() const {
  if (points == 0) throw InvalidArgument("grid needs at least one point");
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw InvalidArgument("grid bounds must be finite with lo <= hi");
  }
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = lo;
    return v;
  }
  const double n = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) v[i] = lo + (hi - lo) * (static_cast<double>(i) / n);
  v.back() = hi;
  return v;
}

GridSpec parse_grid_spec(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw InvalidArgument("grid must look like lo:hi:points, got '" + text + "'");
  GridSpec g;
  try {
    std::size_t used = 0;
    const std::string lo = text.substr(0, a);
    const std::string hi = text.substr(a + 1, b - a - 1);
    const std::string pts = text.substr(b + 1);
    g.lo = std::stod(lo, &used);
    if (used != lo.size()) throw InvalidArgument("bad lower bound");
    g.hi = std::stod(hi, &used);
    if (used != hi.size()) throw InvalidArgument("bad upper bound");
    const long n = std::stol(pts, &used);
    if (used != pts.size() || n < 1) throw InvalidArgument("bad point count");
    g.points = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw InvalidArgument("grid must look like lo:hi:points, got '" + text + "'");
  }
  (void)g.values();  // validates bounds
  return g;
}

AuditGrids make_audit_grids(const Scenario& scenario, std::size_t type_points,
                            std::size_t cost_points) {
  validate(scenario);
  AuditGrids grids;
  grids.type_spec.lo = std::min(scenario.pop1.mu - kTypeGridHalfWidthSds * scenario.pop1.sigma,
                                scenario.pop2.mu - kTypeGridHalfWidthSds * scenario.pop2.sigma);
  grids.type_spec.hi = std::max(scenario.pop1.mu + kTypeGridHalfWidthSds * scenario.pop1.sigma,
                                scenario.pop2.mu + kTypeGridHalfWidthSds * scenario.pop2.sigma);
  grids.type_spec.points = type_points;
  grids.cost_spec.lo = scenario.cost.c_min;
  grids.cost_spec.hi = scenario.cost.c_max;
  grids.cost_spec.points = scenario.cost.is_single() ? 1 : cost_points;
  grids.types = grids.type_spec.values();
  grids.costs = grids.cost_spec.values();
  return grids;
}

namespace {

// Cutoff of a threshold-like rule under a noiseless exam.
Cutoff noiseless_threshold(const AdmissionRule& rule) {
  switch (rule.kind()) {
    case AdmissionRule::Kind::Threshold:
      return rule.beta();
    case AdmissionRule::Kind::AdmitAll:
      return Cutoff::minus_infinity();
    default:
      throw InvalidArgument("noiseless exam audits support threshold rules only");
  }
}

double normal_pdf(double t, const PopulationPrior& prior) {
  return std_pdf((t - prior.mu) / prior.sigma) / prior.sigma;
}

}  // namespace

GroupResponse::GroupResponse(const PopulationPrior& prior, const GradingPolicy& grading,
                             const AdmissionRule& rule, ExamNoise exam, const AuditGrids& grids,
                             bool with_density)
    : gamma_(grading.gamma), types_(grids.types) {
  validate(prior);
  validate(grading);
  if (rule.is_zero()) throw InvalidArgument("audit needs non-zero admission rules");

  acceptance_.resize(types_.size());
  for (std::size_t i = 0; i < types_.size(); ++i) {
    acceptance_[i] = exam == ExamNoise::Unit ? acceptance_probability(rule, types_[i])
                                             : rule.admit_probability(types_[i]);
  }

  if (with_density) {
    density_.resize(types_.size());
    if (exam == ExamNoise::Unit) {
      const AdmittedTypeDensity density(prior, rule);
      for (std::size_t i = 0; i < types_.size(); ++i) density_[i] = density(types_[i]);
    } else {
      double z = rule.base();
      for (const auto& j : rule.jumps()) {
        z += j.increment * std_upper_tail((j.score - prior.mu) / prior.sigma);
      }
      for (std::size_t i = 0; i < types_.size(); ++i) {
        density_[i] = acceptance_[i] * normal_pdf(types_[i], prior) / z;
      }
    }
  }

  cutoffs_.reserve(grids.costs.size());
  if (!grading.disclose) {
    const double mean = exam == ExamNoise::Unit
                            ? posterior_mean_no_grades(prior, rule)
                            : truncated_mean(prior.as_gaussian(), noiseless_threshold(rule));
    for (double c : grids.costs) {
      cutoffs_.push_back(mean >= c ? Cutoff::minus_infinity() : Cutoff::plus_infinity());
    }
  } else if (exam == ExamNoise::Unit) {
    for (double c : grids.costs) {
      cutoffs_.emplace_back(hiring_grade_threshold(prior, grading.gamma, rule, c));
    }
  } else {
    const Cutoff beta = noiseless_threshold(rule);
    for (double c : grids.costs) {
      cutoffs_.push_back(hiring_grade_threshold_noiseless_exam(prior, grading.gamma, beta, c));
    }
  }
}

void GroupResponse::hire_probabilities(std::size_t c, std::span<double> out) const {
  if (out.size() != types_.size()) throw InvalidArgument("output span has the wrong size");
  const Cutoff cut = cutoffs_.at(c);
  if (cut.is_minus_infinity()) {
    std::copy(acceptance_.begin(), acceptance_.end(), out.begin());
  } else if (cut.is_plus_infinity()) {
    std::fill(out.begin(), out.end(), 0.0);
  } else {
    const double g = cut.value();
    for (std::size_t i = 0; i < types_.size(); ++i) {
      out[i] = acceptance_[i] * std_upper_tail((g - types_[i]) / gamma_);
    }
  }
}

double hire_probability_given_type(const PopulationPrior& prior, double gamma,
                                   const AdmissionRule& rule, Cutoff g_star, double t) {
  validate(prior);
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (rule.is_zero()) throw InvalidArgument("admission rule admits nobody");
  const double x = acceptance_probability(rule, t);
  if (g_star.is_minus_infinity()) return x;
  if (g_star.is_plus_infinity()) return 0.0;
  return x * std_upper_tail((g_star.value() - t) / gamma);
}

double grade_cutoff_distance(Cutoff a, Cutoff b) {
  if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value());
  if (a.kind() == b.kind()) return 0.0;
  return std::numeric_limits<double>::infinity();
}

GapResult eo_gap(const GroupResponse& r1, const GroupResponse& r2, const AuditGrids& grids) {
  const std::size_t n = grids.types.size();
  std::vector<double> h1(n);
  std::vector<double> h2(n);
  GapResult best{-1.0, grids.types.front(), grids.costs.front()};
  for (std::size_t c = 0; c < grids.costs.size(); ++c) {
    r1.hire_probabilities(c, h1);
    r2.hire_probabilities(c, h2);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::abs(h1[i] - h2[i]);
      if (d > best.value) best = {d, grids.types[i], grids.costs[c]};
    }
  }
  return best;
}

GapResult igm_violation(const GroupResponse& r1, const GroupResponse& r2,
                        const AuditGrids& grids) {
  GapResult best{-1.0, grids.costs.front(), grids.costs.front()};
  for (std::size_t c = 0; c < grids.costs.size(); ++c) {
    const double d = grade_cutoff_distance(r1.grade_cutoffs()[c], r2.grade_cutoffs()[c]);
    if (d > best.value) best = {d, grids.costs[c], grids.costs[c]};
  }
  return best;
}

GapResult sigm_gap(const GroupResponse& r1, const GroupResponse& r2, const AuditGrids& grids) {
  const auto d1 = r1.admitted_density();
  const auto d2 = r2.admitted_density();
  if (d1.size() != grids.types.size() || d2.size() != grids.types.size()) {
    throw InvalidArgument("group responses were built without admitted densities");
  }
  GapResult best{-1.0, grids.types.front(), 0.0};
  for (std::size_t i = 0; i < d1.size(); ++i) {
    const double d = std::abs(d1[i] - d2[i]);
    if (d > best.value) best = {d, grids.types[i], 0.0};
  }
  return best;
}

namespace {

struct ResponsePair {
  AuditGrids grids;
  GroupResponse r1;
  GroupResponse r2;
};

ResponsePair build_pair(const Scenario& scenario, const AdmissionRule& rule1,
                        const AdmissionRule& rule2, ExamNoise exam, bool with_density) {
  AuditGrids grids = make_audit_grids(scenario);
  GroupResponse r1(scenario.pop1, scenario.grading, rule1, exam, grids, with_density);
  GroupResponse r2(scenario.pop2, scenario.grading, rule2, exam, grids, with_density);
  return {std::move(grids), std::move(r1), std::move(r2)};
}

}  // namespace

GapResult eo_gap(const Scenario& scenario, const AdmissionRule& rule1, const AdmissionRule& rule2,
                 ExamNoise exam) {
  const auto p = build_pair(scenario, rule1, rule2, exam, false);
  return eo_gap(p.r1, p.r2, p.grids);
}

GapResult igm_violation(const Scenario& scenario, const AdmissionRule& rule1,
                        const AdmissionRule& rule2, ExamNoise exam) {
  const auto p = build_pair(scenario, rule1, rule2, exam, false);
  return igm_violation(p.r1, p.r2, p.grids);
}

GapResult sigm_gap(const Scenario& scenario, const AdmissionRule& rule1,
                   const AdmissionRule& rule2, ExamNoise exam) {
  const auto p = build_pair(scenario, rule1, rule2, exam, true);
  return sigm_gap(p.r1, p.r2, p.grids);
}

FairnessReport audit(const Scenario& scenario, const AdmissionRule& rule1,
                     const AdmissionRule& rule2, ExamNoise exam) {
  const auto p = build_pair(scenario, rule1, rule2, exam, true);
  FairnessReport report;
  const auto eo = eo_gap(p.r1, p.r2, p.grids);
  const auto igm = igm_violation(p.r1, p.r2, p.grids);
  const auto sigm = sigm_gap(p.r1, p.r2, p.grids);
  report.eo_gap = eo.value;
  report.eo_argmax = eo.argmax;
  report.eo_argmax_cost = eo.argmax_cost;
  report.igm_violation = igm.value;
  report.igm_argmax = igm.argmax;
  report.sigm_gap = sigm.value;
  report.sigm_argmax = sigm.argmax;
  report.type_grid = p.grids.type_spec;
  report.cost_grid = p.grids.cost_spec;
  return report;
}

const char* to_string(SweepTarget target) {
  switch (target) {
    case SweepTarget::MultiIgm:
      return "multi-igm";
    case SweepTarget::MultiEo:
      return "multi-eo";
    case SweepTarget::Sigm:
      return "sigm";
  }
  return "?";
}

SweepTarget parse_sweep_target(const std::string& text) {
  if (text == "multi-igm") return SweepTarget::MultiIgm;
  if (text == "multi-eo") return SweepTarget::MultiEo;
  if (text == "sigm") return SweepTarget::Sigm;
  throw InvalidArgument("unknown sweep target '" + text + "' (multi-igm, multi-eo, sigm)");
}

SweepResult sweep_impossibility(const Scenario& scenario, const GridSpec& grid1,
                                const GridSpec& grid2, SweepTarget target, std::size_t threads) {
  validate(scenario);
  const auto betas1 = grid1.values();
  const auto betas2 = grid2.values();
  const AuditGrids grids = make_audit_grids(scenario);
  const bool with_density = target == SweepTarget::Sigm;

  // Each group's response depends only on its own threshold, so tabulate
  // once per grid value rather than once per pair.
  std::vector<std::optional<GroupResponse>> resp1(betas1.size());
  std::vector<std::optional<GroupResponse>> resp2(betas2.size());
  parallel_for(betas1.size() + betas2.size(), threads, [&](std::size_t k) {
    if (k < betas1.size()) {
      resp1[k].emplace(scenario.pop1, scenario.grading, AdmissionRule::threshold(betas1[k]),
                       ExamNoise::Unit, grids, with_density);
    } else {
      const std::size_t j = k - betas1.size();
      resp2[j].emplace(scenario.pop2, scenario.grading, AdmissionRule::threshold(betas2[j]),
                       ExamNoise::Unit, grids, with_density);
    }
  });

  const std::size_t n1 = betas1.size();
  const std::size_t n2 = betas2.size();
  std::vector<GapResult> gaps(n1 * n2);

  switch (target) {
    case SweepTarget::MultiIgm:
      parallel_for(n1 * n2, threads, [&](std::size_t k) {
        gaps[k] = igm_violation(*resp1[k / n2], *resp2[k % n2], grids);
      });
      break;
    case SweepTarget::Sigm:
      parallel_for(n1 * n2, threads, [&](std::size_t k) {
        gaps[k] = sigm_gap(*resp1[k / n2], *resp2[k % n2], grids);
      });
      break;
    case SweepTarget::MultiEo: {
      // Cost-major so each hire curve is computed once per cost.
      const std::size_t nt = grids.types.size();
      std::vector<double> hire1(n1 * nt);
      std::vector<double> hire2(n2 * nt);
      for (auto& g : gaps) g = {-1.0, grids.types.front(), grids.costs.front()};
      for (std::size_t c = 0; c < grids.costs.size(); ++c) {
        parallel_for(n1 + n2, threads, [&](std::size_t k) {
          if (k < n1) {
            resp1[k]->hire_probabilities(c, std::span<double>(hire1).subspan(k * nt, nt));
          } else {
            const std::size_t j = k - n1;
            resp2[j]->hire_probabilities(c, std::span<double>(hire2).subspan(j * nt, nt));
          }
        });
        parallel_for(n1, threads, [&](std::size_t i) {
          const double* h1 = hire1.data() + i * nt;
          for (std::size_t j = 0; j < n2; ++j) {
            const double* h2 = hire2.data() + j * nt;
            GapResult& best = gaps[i * n2 + j];
            for (std::size_t t = 0; t < nt; ++t) {
              const double d = std::abs(h1[t] - h2[t]);
              if (d > best.value) best = {d, grids.types[t], grids.costs[c]};
            }
          }
        });
      }
      break;
    }
  }

  SweepResult result;
  result.target = target;
  result.grid1 = grid1;
  result.grid2 = grid2;
  result.type_grid = grids.type_spec;
  result.cost_grid = grids.cost_spec;
  result.records.reserve(n1 * n2);
  for (std::size_t k = 0; k < n1 * n2; ++k) {
    result.records.push_back({betas1[k / n2], betas2[k % n2], gaps[k].value, gaps[k].argmax});
  }
  result.minimum = *std::min_element(
      result.records.begin(), result.records.end(),
      [](const SweepRecord& a, const SweepRecord& b) { return a.value < b.value; });
  return result;
}

}  // namespace pipefair
