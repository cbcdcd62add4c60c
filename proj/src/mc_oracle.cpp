#include "pipefair/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pipefair/error.hpp"
#include "pipefair/parallel.hpp"

namespace pipefair {

namespace {

struct BlockSums {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

void require_samples(std::uint64_t n) {
  if (n < kMcMinSamples) {
    throw InvalidArgument("Monte Carlo needs at least " + std::to_string(kMcMinSamples) +
                          " samples");
  }
}

// Runs `draw(rng, sums)` once per sample, block by block.
template <class Draw>
std::vector<BlockSums> run_blocks(std::uint64_t n, std::uint64_t seed, std::size_t threads,
                                  Draw draw) {
  const std::uint64_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<BlockSums> sums(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    GaussianRng rng(mc_block_seed(seed, b));
    const std::uint64_t begin = b * kMcBlockSize;
    const std::uint64_t end = std::min(n, begin + kMcBlockSize);
    BlockSums& s = sums[b];
    for (std::uint64_t i = begin; i < end; ++i) draw(rng, s);
  });
  return sums;
}

McEstimate mean_estimate(const std::vector<BlockSums>& blocks, std::uint64_t seed) {
  BlockSums total;
  for (const auto& b : blocks) {
    total.count += b.count;
    total.sum += b.sum;
    total.sum_sq += b.sum_sq;
  }
  McEstimate e;
  e.seed = seed;
  e.n_effective = total.count;
  if (total.count == 0) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    e.std_error = std::numeric_limits<double>::infinity();
    return e;
  }
  const double n = static_cast<double>(total.count);
  e.value = total.sum / n;
  if (total.count > 1) {
    const double var = std::max(0.0, (total.sum_sq - n * e.value * e.value) / (n - 1.0));
    e.std_error = std::sqrt(var / n);
  } else {
    e.std_error = std::numeric_limits<double>::infinity();
  }
  return e;
}

}  // namespace

bool McEstimate::agrees_with(double reference, double k_sigma) const {
  if (under_sampled() || !std::isfinite(value)) return false;
  return std::abs(value - reference) <= k_sigma * std_error;
}

std::uint64_t mc_block_seed(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (block + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

McEstimate mc_posterior_mean(const PopulationPrior& prior, double gamma, const AdmissionRule& rule,
                             double g_center, double g_half_width, std::uint64_t n,
                             std::uint64_t seed, std::size_t threads) {
  validate(prior);
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!std::isfinite(g_center)) throw InvalidArgument("grade center must be finite");
  if (!(g_half_width > 0.0)) throw InvalidArgument("grade half-width must be positive");
  require_samples(n);
  const auto blocks = run_blocks(n, seed, threads, [&](GaussianRng& rng, BlockSums& s) {
    const double t = prior.mu + prior.sigma * rng.normal();
    const double g = t + gamma * rng.normal();
    if (std::abs(g - g_center) > g_half_width) return;
    const double score = t + kExamNoiseSd * rng.normal();
    if (!(rng.uniform() < rule.admit_probability(score))) return;
    ++s.count;
    s.sum += t;
    s.sum_sq += t * t;
  });
  return mean_estimate(blocks, seed);
}

McEstimate mc_hire_rate_given_type(const PopulationPrior& prior, double gamma,
                                   const AdmissionRule& rule, Cutoff g_star, double t,
                                   std::uint64_t n, std::uint64_t seed, std::size_t threads) {
  validate(prior);
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!std::isfinite(t)) throw InvalidArgument("type must be finite");
  require_samples(n);
  const double g_cut = g_star.as_double();
  const auto blocks = run_blocks(n, seed, threads, [&](GaussianRng& rng, BlockSums& s) {
    const double score = t + kExamNoiseSd * rng.normal();
    const double g = t + gamma * rng.normal();
    const bool admitted = rng.uniform() < rule.admit_probability(score);
    const double hired = admitted && g >= g_cut ? 1.0 : 0.0;
    ++s.count;
    s.sum += hired;
    s.sum_sq += hired;
  });
  return mean_estimate(blocks, seed);
}

McEstimate mc_admitted_mean(const PopulationPrior& prior, const AdmissionRule& rule,
                            std::uint64_t n, std::uint64_t seed, std::size_t threads) {
  validate(prior);
  require_samples(n);
  const auto blocks = run_blocks(n, seed, threads, [&](GaussianRng& rng, BlockSums& s) {
    const double t = prior.mu + prior.sigma * rng.normal();
    const double score = t + kExamNoiseSd * rng.normal();
    if (!(rng.uniform() < rule.admit_probability(score))) return;
    ++s.count;
    s.sum += t;
    s.sum_sq += t * t;
  });
  return mean_estimate(blocks, seed);
}

}  // namespace pipefair
