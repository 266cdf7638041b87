#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fastmesh {

/// Unordered vertex pair stored with i < j.
struct VertexPair {
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  auto operator<=>(const VertexPair&) const = default;
};

inline VertexPair make_pair_sorted(std::uint32_t a, std::uint32_t b) {
  return a < b ? VertexPair{a, b} : VertexPair{b, a};
}

struct PairLogit {
  VertexPair pair;
  double logit = 0.0;
};

/// Logits keyed by pair, sorted by pair.
using SparseLogits = std::vector<PairLogit>;

/// Symmetric boolean vertex connectivity: a sorted set of i<j pairs.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n) {}

  /// Sorts and deduplicates; throws kOutOfRange on self loops or indices >= n.
  AdjacencyMatrix(std::size_t n, std::vector<VertexPair> edges);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] std::span<const VertexPair> edges() const { return edges_; }
  [[nodiscard]] bool contains(std::uint32_t a, std::uint32_t b) const;

  /// Sorted neighbor lists, one per vertex.
  [[nodiscard]] std::vector<std::vector<std::uint32_t>> neighbors() const;

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<VertexPair> edges_;
};

/// Text form: first line n, then one `i j` line per edge (i<j, sorted).
std::string write_adjacency(const AdjacencyMatrix& adj);
AdjacencyMatrix parse_adjacency(std::string_view text);

/// Text form: one `i j logit` line per entry.
std::string write_logits(const SparseLogits& logits);
SparseLogits parse_logits(std::string_view text);

}  // namespace fastmesh
