#include "fastmesh/filtering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "fastmesh/error.hpp"
#include "fastmesh/face_builder.hpp"

namespace fastmesh {

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

std::size_t gap(const VertexPair& p) { return static_cast<std::size_t>(p.j - p.i); }

}  // namespace

Ordering::Ordering(std::vector<std::uint32_t> perm) : perm_(std::move(perm)), inverse_(perm_.size(), kUnset) {
  for (std::uint32_t old_index = 0; old_index < perm_.size(); ++old_index) {
    const auto new_index = perm_[old_index];
    if (new_index >= perm_.size() || inverse_[new_index] != kUnset) {
      fail(ErrorCode::kPrecondition, "ordering is not a permutation");
    }
    inverse_[new_index] = old_index;
  }
}

Ordering Ordering::identity(std::size_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  return Ordering(std::move(perm));
}

Ordering Ordering::inverse() const { return Ordering(inverse_); }

AdjacencyMatrix Ordering::apply(const AdjacencyMatrix& adj) const {
  if (adj.size() != size()) fail(ErrorCode::kShapeMismatch, "ordering size differs from adjacency size");
  std::vector<VertexPair> edges;
  edges.reserve(adj.edge_count());
  for (const auto& e : adj.edges()) edges.push_back(make_pair_sorted(perm_[e.i], perm_[e.j]));
  return AdjacencyMatrix(adj.size(), std::move(edges));
}

AdjacencyMatrix Ordering::unapply(const AdjacencyMatrix& adj) const { return inverse().apply(adj); }

std::size_t bandwidth(const AdjacencyMatrix& adj) {
  std::size_t b = 0;
  for (const auto& e : adj.edges()) b = std::max(b, gap(e));
  return b;
}

Ordering bfs_order(const AdjacencyMatrix& adj) {
  const auto nbrs = adj.neighbors();
  const std::size_t n = adj.size();
  std::vector<std::uint32_t> perm(n, kUnset);
  std::uint32_t next = 0;
  std::queue<std::uint32_t> frontier;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (perm[root] != kUnset) continue;
    perm[root] = next++;
    frontier.push(root);
    while (!frontier.empty()) {
      const auto v = frontier.front();
      frontier.pop();
      for (auto w : nbrs[v]) {
        if (perm[w] == kUnset) {
          perm[w] = next++;
          frontier.push(w);
        }
      }
    }
  }
  return Ordering(std::move(perm));
}

CandidateMask bandwidth_mask(const AdjacencyMatrix& adj, std::size_t margin) {
  CandidateMask mask{adj.size(), {}};
  if (adj.edge_count() == 0 && margin == 0) return mask;
  const std::size_t limit = bandwidth(adj) + margin;
  for (std::uint32_t i = 0; i < adj.size(); ++i) {
    const std::size_t hi = std::min<std::size_t>(adj.size() - 1, i + limit);
    for (std::size_t j = i + 1; j <= hi; ++j) mask.allowed.push_back({i, static_cast<std::uint32_t>(j)});
  }
  return mask;
}

std::vector<std::size_t> candidate_radii(const AdjacencyMatrix& adj, std::size_t margin) {
  std::vector<std::size_t> r(adj.size(), 0);
  for (const auto& e : adj.edges()) {
    r[e.i] = std::max(r[e.i], gap(e));
    r[e.j] = std::max(r[e.j], gap(e));
  }
  for (auto& x : r) x += margin;
  return r;
}

CandidateMask candidate_mask(const AdjacencyMatrix& adj, std::size_t margin) {
  const auto r = candidate_radii(adj, margin);
  CandidateMask mask{adj.size(), {}};
  for (std::uint32_t i = 0; i < adj.size(); ++i) {
    const std::size_t hi = std::min<std::size_t>(adj.size() - 1, i + r[i]);
    for (std::size_t j = i + 1; j <= hi; ++j) {
      if (j - i <= r[j]) mask.allowed.push_back({i, static_cast<std::uint32_t>(j)});
    }
  }
  return mask;
}

namespace {

// Scores the mask (reordered space) with a scorer living in the original
// space and returns the thresholded adjacency in the reordered space.
AdjacencyMatrix repredict(const EdgeScorer& scorer, const Ordering& order, const CandidateMask& mask) {
  std::vector<VertexPair> original;
  original.reserve(mask.allowed.size());
  for (const auto& p : mask.allowed) original.push_back(make_pair_sorted(order.to_old(p.i), order.to_old(p.j)));
  std::sort(original.begin(), original.end());
  const auto logits = score_pairs(scorer, mask.n, std::span<const VertexPair>(original));
  return order.apply(threshold(logits, mask.n));
}

}  // namespace

FilterResult filter_pipeline(const EdgeScorer& initial, const EdgeScorer& refine,
                             const FilterOptions& options) {
  const std::size_t n = initial.vertex_count();
  if (refine.vertex_count() != n) fail(ErrorCode::kShapeMismatch, "initial and refinement scorers disagree on vertex count");

  FilterResult result;
  auto record = [&](int step, const char* mask, std::size_t candidates, const AdjacencyMatrix& reordered) {
    result.steps.push_back({step, mask, candidates, reordered.edge_count(),
                            extract_faces(reordered).size(), bandwidth(reordered)});
    result.step_adjacency.push_back(result.ordering.unapply(reordered));
  };

  const auto first = threshold(score_pairs(initial, n), n);
  result.ordering = bfs_order(first);
  auto current = result.ordering.apply(first);
  record(1, "none", n > 1 ? n * (n - 1) / 2 : 0, current);

  for (int step = 2; step <= 5; ++step) {
    const bool banded = step <= 3;
    const auto mask = banded ? bandwidth_mask(current, options.bandwidth_margin)
                             : candidate_mask(current, options.candidate_margin);
    current = repredict(refine, result.ordering, mask);
    record(step, banded ? "bandwidth" : "candidate", mask.allowed.size(), current);
  }
  result.adjacency = result.ordering.unapply(current);
  return result;
}

}  // namespace fastmesh
