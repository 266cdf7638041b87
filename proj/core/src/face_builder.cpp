#include "fastmesh/face_builder.hpp"

#include <algorithm>

#include "fastmesh/error.hpp"

namespace fastmesh {

AdjacencyMatrix threshold(const SparseLogits& logits, std::size_t n) {
  std::vector<VertexPair> edges;
  for (const auto& [pair, logit] : logits) {
    if (pair.i >= pair.j || pair.j >= n) {
      fail(ErrorCode::kOutOfRange, "logit key (" + std::to_string(pair.i) + "," +
                                       std::to_string(pair.j) + ") is not a valid pair for n=" +
                                       std::to_string(n));
    }
    if (logit > 0.0) edges.push_back(pair);
  }
  return AdjacencyMatrix(n, std::move(edges));
}

std::vector<Face> extract_faces(const AdjacencyMatrix& adj) {
  // Forward lists: neighbors strictly greater than the vertex, ascending.
  std::vector<std::vector<std::uint32_t>> up(adj.size());
  for (const auto& e : adj.edges()) up[e.i].push_back(e.j);

  std::vector<Face> faces;
  for (const auto& e : adj.edges()) {
    // Common neighbors k > j of i and j: i's list restricted to (j, n) vs j's list.
    const auto& ui = up[e.i];
    const auto& uj = up[e.j];
    auto i_begin = std::upper_bound(ui.begin(), ui.end(), e.j);
    const std::size_t i_len = static_cast<std::size_t>(ui.end() - i_begin);
    if (i_len == 0 || uj.empty()) continue;

    if (i_len <= uj.size()) {
      for (auto it = i_begin; it != ui.end(); ++it) {
        if (std::binary_search(uj.begin(), uj.end(), *it)) faces.push_back({e.i, e.j, *it});
      }
    } else {
      for (auto k : uj) {
        if (std::binary_search(i_begin, ui.end(), k)) faces.push_back({e.i, e.j, k});
      }
    }
  }
  // Edges are visited in (i, j) order and k ascends, so faces are already sorted.
  return faces;
}

AdjacencyMatrix adjacency_of(const Mesh& mesh) {
  std::vector<VertexPair> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      if (f[e] != f[(e + 1) % 3]) edges.push_back(make_pair_sorted(f[e], f[(e + 1) % 3]));
    }
  }
  return AdjacencyMatrix(mesh.vertices.size(), std::move(edges));
}

Mesh mesh_from_adjacency(const AdjacencyMatrix& adj, std::span<const Vec3> vertices) {
  if (vertices.size() != adj.size()) {
    fail(ErrorCode::kShapeMismatch, "adjacency has " + std::to_string(adj.size()) +
                                        " vertices but " + std::to_string(vertices.size()) +
                                        " positions were given");
  }
  Mesh mesh;
  mesh.vertices.assign(vertices.begin(), vertices.end());
  mesh.faces = extract_faces(adj);
  return mesh;
}

}  // namespace fastmesh
