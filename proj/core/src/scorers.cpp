#include "fastmesh/scorers.hpp"

#include <algorithm>
#include <limits>

#include "fastmesh/nearest_neighbor.hpp"

namespace fastmesh {

KnnScorer::KnnScorer(std::vector<Vec3> vertices, std::size_t k) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 2 || k == 0) return;
  const std::size_t kk = std::min(k, n - 1);
  std::vector<double> kth(n);
  std::vector<double> d;
  d.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back(distance(vertices_[i], vertices_[j]));
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk - 1), d.end());
    kth[i] = d[kk - 1];
  }
  // Lower median for even counts.
  const auto mid = kth.begin() + static_cast<std::ptrdiff_t>((n - 1) / 2);
  std::nth_element(kth.begin(), mid, kth.end());
  tau_ = *mid;
}

ToyScorer::ToyScorer(ToyEdgeModel model, std::span<const Vec3> vertices) : model_(std::move(model)) {
  embeddings_.reserve(vertices.size());
  for (const auto& v : vertices) embeddings_.push_back(model_.embed(v));
}

double ToyScorer::score(std::uint32_t i, std::uint32_t j) const {
  return model_.head(edge_feature(embeddings_[i], embeddings_[j], model_.shape().heads));
}

}  // namespace fastmesh
