#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "fastmesh/mesh.hpp"

namespace fastmesh {

/// Parses the Wavefront OBJ subset `v x y z` / `f i j k ...`.
///
/// Polygons are fan-triangulated around their first corner, `/vt/vn`
/// attributes are dropped and negative indices resolve relative to the
/// vertices read so far. Triangles of a fan that repeat a vertex index are
/// skipped. Every other directive is ignored.
Mesh parse_obj(std::istream& in);
Mesh parse_obj(std::string_view text);
Mesh read_obj(const std::filesystem::path& path);

/// Emits a one-line comment header, then `v` lines (17 significant digits,
/// exact round trip), then `f` lines with 1-based indices.
std::string write_obj(const Mesh& mesh);
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

/// Maps the bounding box into [0,1)^3: box center to (0.5, 0.5, 0.5), longest
/// edge scaled to 1 - kNormalizeEpsilon. Throws kDegenerateInput for empty
/// meshes and meshes whose vertices all coincide.
Mesh normalize(const Mesh& mesh);

inline constexpr double kNormalizeEpsilon = 1.0 / (1 << 20);

struct ManifoldReport {
  std::size_t edge_count = 0;
  std::size_t edges_used_once = 0;
  std::size_t edges_used_gt_twice = 0;
  double bad_edge_ratio = 0.0;
  std::size_t total_usage = 0;  // sum of per-edge usage counts, always 3F
};

ManifoldReport manifold_report(const Mesh& mesh);

}  // namespace fastmesh
