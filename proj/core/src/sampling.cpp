#include "fastmesh/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fastmesh/error.hpp"

namespace fastmesh {

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> truncated_distribution(std::span<const double> logits,
                                           const SamplingParams& params) {
  if (logits.empty()) fail(ErrorCode::kPrecondition, "empty logits");
  if (!(params.temperature > 0.0)) fail(ErrorCode::kPrecondition, "temperature must be positive");
  if (params.top_k == 0) fail(ErrorCode::kPrecondition, "top_k must be positive");
  if (!(params.top_p > 0.0 && params.top_p <= 1.0)) fail(ErrorCode::kPrecondition, "top_p must lie in (0,1]");
  for (double l : logits) {
    if (!std::isfinite(l)) fail(ErrorCode::kPrecondition, "non-finite logit");
  }

  std::vector<std::size_t> order(logits.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return logits[a] > logits[b]; });
  order.resize(std::min(params.top_k, order.size()));

  const double top = logits[order.front()] / params.temperature;
  std::vector<double> weights(order.size());
  double total = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    weights[r] = std::exp(logits[order[r]] / params.temperature - top);
    total += weights[r];
  }

  // Smallest descending prefix whose mass reaches top_p.
  std::size_t keep = order.size();
  if (params.top_p < 1.0) {
    double cumulative = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      cumulative += weights[r] / total;
      if (cumulative >= params.top_p) {
        keep = r + 1;
        break;
      }
    }
  }

  double kept_total = 0.0;
  for (std::size_t r = 0; r < keep; ++r) kept_total += weights[r];
  std::vector<double> probs(logits.size(), 0.0);
  for (std::size_t r = 0; r < keep; ++r) probs[order[r]] = weights[r] / kept_total;
  return probs;
}

std::size_t sample_next(std::span<const double> logits, const SamplingParams& params,
                        std::mt19937_64& rng) {
  const auto probs = truncated_distribution(logits, params);
  const double u = uniform_unit(rng);
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return last;
}

}  // namespace fastmesh
