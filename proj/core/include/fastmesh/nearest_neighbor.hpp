#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fastmesh/mesh.hpp"

namespace fastmesh {

/// Exact Euclidean nearest-neighbor distance queries against a fixed point
/// set, using a uniform grid with shell-by-shell expansion.
class PointGrid {
 public:
  explicit PointGrid(std::span<const Vec3> points);

  /// Distance from q to the closest indexed point. Requires a non-empty set.
  [[nodiscard]] double nearest_distance(const Vec3& q) const;

 private:
  [[nodiscard]] long cell_coord(double v, int axis) const;

  std::vector<Vec3> points_;
  Vec3 origin_{};
  double cell_ = 1.0;
  long dims_[3] = {1, 1, 1};
  std::vector<std::size_t> cell_start_;  // CSR over cells
  std::vector<std::size_t> order_;
};

double nearest_distance_brute(std::span<const Vec3> points, const Vec3& q);

enum class NearestMethod { kAuto, kBruteForce, kGrid };

inline constexpr std::size_t kBruteForceLimit = 2000;

/// min distance from every query to `targets`; kAuto uses brute force when
/// targets.size() <= kBruteForceLimit.
std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> targets,
                                      NearestMethod method = NearestMethod::kAuto);

}  // namespace fastmesh
