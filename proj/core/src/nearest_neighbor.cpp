#include "fastmesh/nearest_neighbor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastmesh/error.hpp"

namespace fastmesh {

double nearest_distance_brute(std::span<const Vec3> points, const Vec3& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const Vec3 d = p - q;
    best = std::min(best, dot(d, d));
  }
  return std::sqrt(best);
}

PointGrid::PointGrid(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) fail(ErrorCode::kPrecondition, "PointGrid needs at least one point");
  Vec3 lo = points_.front(), hi = points_.front();
  for (const auto& p : points_) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  origin_ = lo;
  const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  // About two points per cell along a cube of the longest extent.
  const double per_axis = std::max(1.0, std::cbrt(static_cast<double>(points_.size()) / 2.0));
  cell_ = extent > 0.0 ? extent / per_axis : 1.0;
  std::size_t cells = 1;
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::max(1L, static_cast<long>(std::floor((hi[a] - lo[a]) / cell_)) + 1);
    cells *= static_cast<std::size_t>(dims_[a]);
  }

  auto flat = [&](const Vec3& p) {
    const long x = cell_coord(p[0], 0), y = cell_coord(p[1], 1), z = cell_coord(p[2], 2);
    return static_cast<std::size_t>((x * dims_[1] + y) * dims_[2] + z);
  };
  cell_start_.assign(cells + 1, 0);
  for (const auto& p : points_) ++cell_start_[flat(p) + 1];
  for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
  order_.resize(points_.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) order_[fill[flat(points_[i])]++] = i;
}

long PointGrid::cell_coord(double v, int axis) const {
  const long c = static_cast<long>(std::floor((v - origin_[axis]) / cell_));
  return std::clamp(c, 0L, dims_[axis] - 1);
}

double PointGrid::nearest_distance(const Vec3& q) const {
  const long c[3] = {cell_coord(q[0], 0), cell_coord(q[1], 1), cell_coord(q[2], 2)};
  double best_sq = std::numeric_limits<double>::infinity();

  auto scan_cell = [&](long x, long y, long z) {
    const auto id = static_cast<std::size_t>((x * dims_[1] + y) * dims_[2] + z);
    for (std::size_t k = cell_start_[id]; k < cell_start_[id + 1]; ++k) {
      const Vec3 d = points_[order_[k]] - q;
      best_sq = std::min(best_sq, dot(d, d));
    }
  };

  for (long r = 0;; ++r) {
    const long x0 = std::max(0L, c[0] - r), x1 = std::min(dims_[0] - 1, c[0] + r);
    const long y0 = std::max(0L, c[1] - r), y1 = std::min(dims_[1] - 1, c[1] + r);
    const long z0 = std::max(0L, c[2] - r), z1 = std::min(dims_[2] - 1, c[2] + r);
    for (long x = x0; x <= x1; ++x) {
      const bool x_edge = (x == c[0] - r || x == c[0] + r);
      for (long y = y0; y <= y1; ++y) {
        const bool xy_edge = x_edge || y == c[1] - r || y == c[1] + r;
        if (xy_edge) {
          for (long z = z0; z <= z1; ++z) scan_cell(x, y, z);
        } else {
          if (c[2] - r >= 0) scan_cell(x, y, c[2] - r);
          if (r > 0 && c[2] + r < dims_[2]) scan_cell(x, y, c[2] + r);
        }
      }
    }

    // Lower bound on the distance to any cell outside the scanned block.
    double bound = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      if (c[a] - r > 0) {
        const double face = origin_[a] + static_cast<double>(c[a] - r) * cell_;
        bound = std::min(bound, std::max(0.0, q[a] - face));
      }
      if (c[a] + r < dims_[a] - 1) {
        const double face = origin_[a] + static_cast<double>(c[a] + r + 1) * cell_;
        bound = std::min(bound, std::max(0.0, face - q[a]));
      }
    }
    if (std::isinf(bound) || best_sq <= bound * bound) break;
  }
  return std::sqrt(best_sq);
}

std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> targets,
                                      NearestMethod method) {
  if (targets.empty()) fail(ErrorCode::kPrecondition, "nearest_distances: empty target set");
  std::vector<double> out(queries.size());
  const bool brute = method == NearestMethod::kBruteForce ||
                     (method == NearestMethod::kAuto && targets.size() <= kBruteForceLimit);
  if (brute) {
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = nearest_distance_brute(targets, queries[i]);
    return out;
  }
  const PointGrid grid(targets);
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = grid.nearest_distance(queries[i]);
  return out;
}

}  // namespace fastmesh
