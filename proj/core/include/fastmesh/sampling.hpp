#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fastmesh {

struct SamplingParams {
  double temperature = 1.2;
  std::size_t top_k = 100;
  double top_p = 0.9;
};

/// Uniform double in [0,1) from the top 53 bits of one engine draw; portable
/// across standard library implementations.
double uniform_unit(std::mt19937_64& rng);

/// Temperature / top-k / top-p filtered distribution over logit indices.
/// Entries outside the kept set have probability zero. Ties in logit value
/// rank the lower index first.
std::vector<double> truncated_distribution(std::span<const double> logits,
                                           const SamplingParams& params);

/// Draws one index from truncated_distribution. Throws kPrecondition for
/// empty or non-finite logits, temperature <= 0, top_k == 0, or top_p
/// outside (0,1].
std::size_t sample_next(std::span<const double> logits, const SamplingParams& params,
                        std::mt19937_64& rng);

}  // namespace fastmesh
