#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fastmesh/adjacency.hpp"
#include "fastmesh/mesh.hpp"
#include "fastmesh/nearest_neighbor.hpp"

namespace fastmesh {

inline constexpr std::size_t kDefaultSamplePoints = 5000;

struct PointSample {
  std::vector<Vec3> points;
  std::vector<std::uint32_t> face_of_point;  // source face per point
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// Area-weighted face choice, uniform barycentric point within the face.
/// Throws kDegenerateInput when the total area is zero.
PointSample sample_surface(const Mesh& mesh, std::size_t count = kDefaultSamplePoints,
                           std::uint64_t seed = 0);

/// Mean over `a` of the distance to the closest point of `b`.
double mean_nearest(const PointSample& a, const PointSample& b,
                    NearestMethod method = NearestMethod::kAuto);
/// Max over `a` of the distance to the closest point of `b`.
double max_nearest(const PointSample& a, const PointSample& b,
                   NearestMethod method = NearestMethod::kAuto);

/// 100 * (mean_nearest(a,b) + mean_nearest(b,a)) / 2. Throws
/// kPrecondition on an empty sample.
double chamfer(const PointSample& a, const PointSample& b,
               NearestMethod method = NearestMethod::kAuto);
/// 100 * max(max_nearest(a,b), max_nearest(b,a)).
double hausdorff(const PointSample& a, const PointSample& b,
                 NearestMethod method = NearestMethod::kAuto);

struct ShapeScores {
  double cd = 0.0;
  double hd = 0.0;
};

struct CompareOptions {
  std::size_t points = kDefaultSamplePoints;
  std::uint64_t seed = 0;
  bool normalize_first = true;
};

/// Samples both meshes with the same seed and scores them. Faces are put in a
/// geometric canonical order first, so equal triangle sets score exactly zero.
ShapeScores compare_meshes(const Mesh& a, const Mesh& b, const CompareOptions& options = {});

struct EdgeScores {
  double f1 = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

/// Standard definitions over the i<j pair universe. An empty prediction has
/// precision 1; an edgeless truth has recall 1 and f1 = (pred empty ? 1 : 0).
/// Throws kShapeMismatch when sizes differ.
EdgeScores adjacency_f1_recall(const AdjacencyMatrix& pred, const AdjacencyMatrix& truth);

}  // namespace fastmesh
