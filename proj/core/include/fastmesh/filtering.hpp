#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fastmesh/adjacency.hpp"
#include "fastmesh/edge_model.hpp"

namespace fastmesh {

/// Vertex relabeling: perm[old] = new.
class Ordering {
 public:
  Ordering() = default;
  /// Throws kPrecondition unless perm is a bijection on [0, n).
  explicit Ordering(std::vector<std::uint32_t> perm);
  static Ordering identity(std::size_t n);

  [[nodiscard]] std::size_t size() const { return perm_.size(); }
  [[nodiscard]] std::uint32_t to_new(std::uint32_t old_index) const { return perm_[old_index]; }
  [[nodiscard]] std::uint32_t to_old(std::uint32_t new_index) const { return inverse_[new_index]; }
  [[nodiscard]] std::span<const std::uint32_t> perm() const { return perm_; }
  [[nodiscard]] Ordering inverse() const;

  [[nodiscard]] AdjacencyMatrix apply(const AdjacencyMatrix& adj) const;
  [[nodiscard]] AdjacencyMatrix unapply(const AdjacencyMatrix& adj) const;

 private:
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> inverse_;
};

/// Allowed i<j pairs in the reordered index space.
struct CandidateMask {
  std::size_t n = 0;
  std::vector<VertexPair> allowed;  // sorted
};

/// max |i-j| over edges; 0 for an edgeless graph.
std::size_t bandwidth(const AdjacencyMatrix& adj);

/// BFS from the lowest unvisited index, neighbors taken in ascending index
/// order, components one after another; new index = visit order.
Ordering bfs_order(const AdjacencyMatrix& adj);

/// All pairs with |i-j| <= bandwidth(adj) + margin.
CandidateMask bandwidth_mask(const AdjacencyMatrix& adj, std::size_t margin = 0);

/// Per-node radius r_i = max |i-j| over current neighbors (0 if isolated) +
/// margin. A pair is allowed iff |i-j| <= min(r_i, r_j).
std::vector<std::size_t> candidate_radii(const AdjacencyMatrix& adj, std::size_t margin = 0);
CandidateMask candidate_mask(const AdjacencyMatrix& adj, std::size_t margin = 0);

struct FilterOptions {
  std::size_t bandwidth_margin = 0;
  std::size_t candidate_margin = 0;
};

struct FilterStepStats {
  int step = 0;
  std::string mask;              // "none", "bandwidth" or "candidate"
  std::size_t candidates = 0;    // pairs scored
  std::size_t edges = 0;
  std::size_t faces = 0;
  std::size_t bandwidth = 0;     // of this step's adjacency, in the reordered space
};

struct FilterResult {
  AdjacencyMatrix adjacency;  // original vertex indices
  Ordering ordering;          // BFS ordering derived from step 1
  std::vector<FilterStepStats> steps;
  std::vector<AdjacencyMatrix> step_adjacency;  // per step, original indices
};

/// Five-step prediction filtering:
///   1. unmasked prediction with `initial`, thresholded at zero;
///   BFS reordering of that result;
///   2-3. re-prediction with `refine` restricted to the bandwidth mask of the
///        current adjacency;
///   4-5. re-prediction restricted to the candidate mask.
/// Both scorers see pairs in the original vertex indexing.
FilterResult filter_pipeline(const EdgeScorer& initial, const EdgeScorer& refine,
                             const FilterOptions& options = {});

inline FilterResult filter_pipeline(const EdgeScorer& scorer, const FilterOptions& options = {}) {
  return filter_pipeline(scorer, scorer, options);
}

}  // namespace fastmesh
