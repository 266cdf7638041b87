#pragma once

#include <span>
#include <vector>

#include "fastmesh/adjacency.hpp"
#include "fastmesh/mesh.hpp"

namespace fastmesh {

/// Edge present iff logit > 0; a logit of exactly zero is excluded.
/// Throws kOutOfRange when a key is not a valid i<j<n pair.
AdjacencyMatrix threshold(const SparseLogits& logits, std::size_t n);

/// Every mutually connected triple (i<j<k) exactly once, lexicographically
/// sorted. Per edge (i,j) the common neighbors above j are found by probing
/// the shorter neighbor list against the longer one.
std::vector<Face> extract_faces(const AdjacencyMatrix& adj);

/// Ground-truth adjacency: (i,j) present iff some face holds both.
AdjacencyMatrix adjacency_of(const Mesh& mesh);

/// Throws kShapeMismatch if vertices.size() != adj.size().
Mesh mesh_from_adjacency(const AdjacencyMatrix& adj, std::span<const Vec3> vertices);

}  // namespace fastmesh
