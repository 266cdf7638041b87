#include "fastmesh/edge_model.hpp"

#include <algorithm>
#include <cmath>

#include "fastmesh/error.hpp"

namespace fastmesh {

double spacetime_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) fail(ErrorCode::kShapeMismatch, "spacetime_distance: size mismatch");
  if (u.size() % 2 != 0) fail(ErrorCode::kShapeMismatch, "spacetime_distance: odd dimension");
  const std::size_t half = u.size() / 2;
  double space = 0.0, time = 0.0;
  for (std::size_t k = 0; k < half; ++k) {
    const double d = u[k] - v[k];
    space += d * d;
  }
  for (std::size_t k = half; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    time += d * d;
  }
  return space - time;
}

std::vector<double> edge_feature(std::span<const double> u, std::span<const double> v,
                                 std::size_t heads) {
  if (heads == 0 || u.size() != v.size() || u.size() % heads != 0) {
    fail(ErrorCode::kShapeMismatch, "edge_feature: embeddings do not split into equal heads");
  }
  const std::size_t dims = u.size() / heads;
  if (dims < 2 || dims % 2 != 0) fail(ErrorCode::kShapeMismatch, "edge_feature: per-head size must be even");
  std::vector<double> out(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    out[h] = spacetime_distance(u.subspan(h * dims, dims), v.subspan(h * dims, dims));
  }
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_gammas(const AsymmetricGammas& g) {
  if (!(g.positive >= 0.0) || !(g.negative >= 0.0)) {
    fail(ErrorCode::kPrecondition, "asymmetric loss exponents must be non-negative");
  }
}

// log(sigmoid(z)) without cancellation.
double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

}  // namespace

double asymmetric_loss(double p, EdgeLabel label, const AsymmetricGammas& gammas) {
  check_gammas(gammas);
  p = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  if (label == EdgeLabel::kPositive) return -std::pow(1.0 - p, gammas.positive) * std::log(p);
  return -std::pow(p, gammas.negative) * std::log(1.0 - p);
}

double asymmetric_loss_from_logit(double logit, EdgeLabel label, const AsymmetricGammas& gammas) {
  check_gammas(gammas);
  if (label == EdgeLabel::kPositive) {
    return -std::pow(sigmoid(-logit), gammas.positive) * log_sigmoid(logit);
  }
  return -std::pow(sigmoid(logit), gammas.negative) * log_sigmoid(-logit);
}

double asymmetric_loss_grad(double logit, EdgeLabel label, const AsymmetricGammas& gammas) {
  check_gammas(gammas);
  const double p = sigmoid(logit);
  const double q = sigmoid(-logit);  // 1 - p without cancellation
  if (label == EdgeLabel::kPositive) {
    // L = -(q^g) log p,  dp/dz = p q,  dq/dz = -p q
    const double g = gammas.positive;
    return g * std::pow(q, g) * p * log_sigmoid(logit) - std::pow(q, g + 1.0);
  }
  // L = -(p^g) log q
  const double g = gammas.negative;
  return -g * std::pow(p, g) * q * log_sigmoid(-logit) + std::pow(p, g + 1.0);
}

double cross_entropy(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    fail(ErrorCode::kOutOfRange, "cross_entropy: target " + std::to_string(target) +
                                     " out of range for " + std::to_string(logits.size()) + " classes");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - top);
  return std::log(sum) + top - logits[target];
}

double l1_loss(std::span<const Vec3> v, std::span<const Vec3> w) {
  if (v.size() != w.size()) fail(ErrorCode::kShapeMismatch, "l1_loss: point lists differ in length");
  if (v.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int a = 0; a < 3; ++a) total += std::abs(v[i][a] - w[i][a]);
  }
  return total / static_cast<double>(v.size());
}

SparseLogits EdgeScorer::score_candidates(std::span<const VertexPair> pairs) const {
  SparseLogits out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({p, score(p.i, p.j)});
  return out;
}

SparseLogits score_pairs(const EdgeScorer& scorer, std::size_t n,
                         std::optional<std::span<const VertexPair>> mask) {
  if (mask) {
    std::vector<VertexPair> pairs(mask->begin(), mask->end());
    for (const auto& p : pairs) {
      if (p.i >= p.j || p.j >= n) {
        fail(ErrorCode::kOutOfRange, "mask pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                                         ") is not i<j<" + std::to_string(n));
      }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return scorer.score_candidates(pairs);
  }
  std::vector<VertexPair> all;
  all.reserve(n > 1 ? n * (n - 1) / 2 : 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) all.push_back({i, j});
  }
  return scorer.score_candidates(all);
}

}  // namespace fastmesh
