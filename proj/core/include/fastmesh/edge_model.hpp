#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fastmesh/adjacency.hpp"
#include "fastmesh/mesh.hpp"

namespace fastmesh {

/// ||u1 - v1||^2 - ||u2 - v2||^2 where each vector is split into halves
/// [u1, u2] and [v1, v2]. Both halves are accumulated in index order and
/// squared differences are sign-agnostic, so swapping u and v reproduces the
/// result bit for bit. Throws kShapeMismatch for mismatched or odd sizes.
double spacetime_distance(std::span<const double> u, std::span<const double> v);

/// Per-head spacetime distances. u and v hold `heads` contiguous slices of
/// equal, even length.
std::vector<double> edge_feature(std::span<const double> u, std::span<const double> v,
                                 std::size_t heads);

enum class EdgeLabel { kNegative, kPositive };

struct AsymmetricGammas {
  double positive = 0.0;
  double negative = 3.0;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// -(1-p)^g+ log p for positives, -p^g- log(1-p) for negatives, with p
/// clamped to [1e-7, 1 - 1e-7]. Throws kPrecondition for negative gammas.
double asymmetric_loss(double p, EdgeLabel label, const AsymmetricGammas& gammas);

/// d(asymmetric_loss(sigmoid(z)))/dz, evaluated in closed form on the
/// unclamped sigmoid.
double asymmetric_loss_grad(double logit, EdgeLabel label, const AsymmetricGammas& gammas);

/// asymmetric_loss(sigmoid(z)) computed in the logit domain without the
/// probability clamp; agrees with asymmetric_loss wherever the clamp is
/// inactive and is the exact antiderivative of asymmetric_loss_grad.
double asymmetric_loss_from_logit(double logit, EdgeLabel label, const AsymmetricGammas& gammas);

double sigmoid(double z);

/// -log softmax(logits)[target]. Throws kOutOfRange for a bad target.
double cross_entropy(std::span<const double> logits, std::size_t target);

/// (1/N) sum_i |v_i - w_i|_1. Throws kShapeMismatch on length mismatch.
double l1_loss(std::span<const Vec3> v, std::span<const Vec3> w);

/// Produces a real logit for an unordered vertex pair; score(i,j) must equal
/// score(j,i). Pairs are given in the scorer's own vertex indexing.
class EdgeScorer {
 public:
  virtual ~EdgeScorer() = default;

  [[nodiscard]] virtual std::size_t vertex_count() const = 0;
  [[nodiscard]] virtual double score(std::uint32_t i, std::uint32_t j) const = 0;

  /// Masked re-prediction hook. `pairs` is the candidate set the caller
  /// allows; scorers fine-tuned for masked inference may condition on it.
  [[nodiscard]] virtual SparseLogits score_candidates(std::span<const VertexPair> pairs) const;
};

/// Logits for exactly the masked pairs, or every i<j pair when no mask is
/// given. Throws kOutOfRange if a mask pair is not i<j<n.
SparseLogits score_pairs(const EdgeScorer& scorer, std::size_t n,
                         std::optional<std::span<const VertexPair>> mask = std::nullopt);

}  // namespace fastmesh
