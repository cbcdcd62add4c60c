#pragma once

// Plain rejection-sampling Monte Carlo over the generative model, used as an
// independent check of the closed forms and solvers.
//
// Samples are drawn in fixed blocks of kMcBlockSize, each block with its own
// GaussianRng seeded from (seed, block index). Blocks are merged in index
// order, so an estimate depends only on (inputs, n, seed), never on the
// number of worker threads.

#include <cstddef>
#include <cstdint>

#include "pipefair/model.hpp"

namespace pipefair {

inline constexpr std::uint64_t kMcBlockSize = 1u << 16;
inline constexpr std::uint64_t kMcMinSamples = 100000;
inline constexpr std::uint64_t kMcMinEffective = 100;
inline constexpr double kDefaultGradeHalfWidth = 0.02;

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_effective = 0;
  std::uint64_t seed = 0;

  bool under_sampled() const noexcept { return n_effective < kMcMinEffective; }
  // |value - reference| <= k * std_error, and not under-sampled.
  bool agrees_with(double reference, double k_sigma = 3.0) const;
};

// Seed of block `block` of a run seeded with `seed` (splitmix64 mixing).
std::uint64_t mc_block_seed(std::uint64_t seed, std::uint64_t block);

// Mean type of students admitted by `rule` whose grade falls within
// g_center +- g_half_width.
McEstimate mc_posterior_mean(const PopulationPrior& prior, double gamma, const AdmissionRule& rule,
                             double g_center, double g_half_width, std::uint64_t n,
                             std::uint64_t seed, std::size_t threads);

// Fraction of students of fixed type t who are admitted and then hired
// (grade >= g_star).
McEstimate mc_hire_rate_given_type(const PopulationPrior& prior, double gamma,
                                   const AdmissionRule& rule, Cutoff g_star, double t,
                                   std::uint64_t n, std::uint64_t seed, std::size_t threads);

// Mean type of admitted students, no grade conditioning.
McEstimate mc_admitted_mean(const PopulationPrior& prior, const AdmissionRule& rule,
                            std::uint64_t n, std::uint64_t seed, std::size_t threads);

}  // namespace pipefair
