#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fastmesh/adjacency.hpp"
#include "fastmesh/edge_model.hpp"
#include "fastmesh/mesh.hpp"

namespace fastmesh {

struct ToyShape {
  std::size_t heads = 4;
  std::size_t dims = 4;          // per head, even
  std::size_t hidden = 64;       // embedding hidden width
  std::size_t head_hidden = 16;  // logit head hidden width
};

/// Tiny edge predictor: coordinates -> tanh MLP -> heads x dims embedding ->
/// per-head spacetime distance -> tanh MLP -> logit.
///
/// All parameters live in one flat vector; `blocks()` names the slices:
///   embed.w1 [hidden x 3], embed.b1 [hidden],
///   embed.w2 [heads*dims x hidden], embed.b2 [heads*dims],
///   head.w1 [head_hidden x heads], head.b1 [head_hidden],
///   head.w2 [head_hidden], head.b2 [1].
class ToyEdgeModel {
 public:
  struct Block {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
  };

  explicit ToyEdgeModel(ToyShape shape = {});

  /// Scaled-uniform (Glorot) weights, zero biases.
  void initialize(std::uint64_t seed);

  [[nodiscard]] const ToyShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t embedding_size() const { return shape_.heads * shape_.dims; }
  [[nodiscard]] std::size_t parameter_count() const { return params_.size(); }
  [[nodiscard]] std::span<double> parameters() { return params_; }
  [[nodiscard]] std::span<const double> parameters() const { return params_; }
  [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }

  /// Embedding of a point in [0,1)^3 (mapped to [-1,1) internally).
  [[nodiscard]] std::vector<double> embed(const Vec3& p) const;
  [[nodiscard]] double head(std::span<const double> feature) const;
  [[nodiscard]] double logit(const Vec3& a, const Vec3& b) const;

  /// Adds d(head)/d(params) * upstream into `grad` and returns d(head)/d(feature) * upstream.
  std::vector<double> head_backward(std::span<const double> feature, double upstream,
                                    std::span<double> grad) const;

  /// Adds d(sum_k upstream_k * embed(p)_k)/d(params) into `grad`.
  void embed_backward(const Vec3& p, std::span<const double> upstream,
                      std::span<double> grad) const;

 private:
  ToyShape shape_;
  std::vector<Block> blocks_;
  std::vector<double> params_;
  // Cached block offsets.
  std::size_t w1_, b1_, w2_, b2_, hw1_, hb1_, hw2_, hb2_;
};

/// One training mesh: normalized vertex positions plus its ground-truth edges.
struct EdgeTrainingSample {
  std::vector<Vec3> vertices;
  AdjacencyMatrix edges;
};

EdgeTrainingSample make_training_sample(const Mesh& normalized_mesh);

struct LossAndGradient {
  double loss = 0.0;  // mean over every i<j pair of every sample
  std::vector<double> gradient;
};

/// Mean asymmetric loss over all vertex pairs of all samples with its exact
/// parameter gradient.
LossAndGradient edge_loss_and_gradient(const ToyEdgeModel& model,
                                       std::span<const EdgeTrainingSample> samples,
                                       const AsymmetricGammas& gammas);

struct ToyTrainConfig {
  ToyShape shape;
  double learning_rate = 0.05;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
  AsymmetricGammas gammas;
};

struct ToyTrainResult {
  ToyEdgeModel model;
  std::vector<double> loss_curve;  // loss at the start of each epoch
};

inline constexpr std::size_t kToyMaxVertices = 300;

/// Full-batch gradient descent with a fixed step. Throws kPrecondition for an
/// empty set or meshes above kToyMaxVertices, kDivergence (naming the epoch)
/// if the loss turns non-finite.
ToyTrainResult train_toy(std::span<const Mesh> normalized_meshes, const ToyTrainConfig& config,
                         const std::function<void(std::size_t, double)>& on_epoch = {});

/// Flat JSON: {"format", "heads", "dims", "hidden", "head_hidden",
/// "params": {block name: [reals]}}.
std::string write_toy_model(const ToyEdgeModel& model);
ToyEdgeModel parse_toy_model(std::string_view json_text);

/// `epoch,loss` header then one row per epoch.
std::string write_loss_curve(std::span<const double> curve);

}  // namespace fastmesh
