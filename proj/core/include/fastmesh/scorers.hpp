#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fastmesh/adjacency.hpp"
#include "fastmesh/edge_model.hpp"
#include "fastmesh/toy_edge_model.hpp"

namespace fastmesh {

/// +1 on ground-truth edges, -1 everywhere else.
class OracleScorer final : public EdgeScorer {
 public:
  explicit OracleScorer(AdjacencyMatrix truth) : truth_(std::move(truth)) {}

  [[nodiscard]] std::size_t vertex_count() const override { return truth_.size(); }
  [[nodiscard]] double score(std::uint32_t i, std::uint32_t j) const override {
    return truth_.contains(i, j) ? 1.0 : -1.0;
  }

 private:
  AdjacencyMatrix truth_;
};

/// Geometric heuristic: logit = tau - |p_i - p_j|, where tau is the median
/// over vertices of the distance to the k-th nearest other vertex.
class KnnScorer final : public EdgeScorer {
 public:
  explicit KnnScorer(std::vector<Vec3> vertices, std::size_t k = 6);

  [[nodiscard]] std::size_t vertex_count() const override { return vertices_.size(); }
  [[nodiscard]] double score(std::uint32_t i, std::uint32_t j) const override {
    return tau_ - distance(vertices_[i], vertices_[j]);
  }
  [[nodiscard]] double tau() const { return tau_; }

 private:
  std::vector<Vec3> vertices_;
  double tau_ = 0.0;
};

/// ToyEdgeModel bound to a vertex set; embeddings are computed once.
class ToyScorer final : public EdgeScorer {
 public:
  ToyScorer(ToyEdgeModel model, std::span<const Vec3> vertices);

  [[nodiscard]] std::size_t vertex_count() const override { return embeddings_.size(); }
  [[nodiscard]] double score(std::uint32_t i, std::uint32_t j) const override;

 private:
  ToyEdgeModel model_;
  std::vector<std::vector<double>> embeddings_;
};

}  // namespace fastmesh
