#include "fastmesh/fidelity.hpp"

#include <algorithm>
#include <cmath>

#include "fastmesh/metrics.hpp"

namespace fastmesh {

namespace {

std::array<int, 3> cell_of(const LatticePoint& v) { return {v.x, v.y, v.z}; }

}  // namespace

Vec3 enhance_cell_center(const LatticePoint& v) {
  const auto l = cell_of(v);
  return {(l[0] + 0.5) / kLatticeSize, (l[1] + 0.5) / kLatticeSize, (l[2] + 0.5) / kLatticeSize};
}

Vec3 clamp_to_cell(const Vec3& p, const LatticePoint& v) {
  const auto l = cell_of(v);
  Vec3 out{};
  for (int a = 0; a < 3; ++a) {
    const double lo = static_cast<double>(l[a]) / kLatticeSize;
    const double hi = std::nextafter(static_cast<double>(l[a] + 1) / kLatticeSize, 0.0);
    out[a] = std::clamp(p[a], lo, hi);
  }
  return out;
}

Vec3 enhance_snap_oracle(const LatticePoint& v, std::span<const Vec3> originals) {
  Vec3 sum{0.0, 0.0, 0.0};
  std::size_t count = 0;
  for (const auto& p : originals) {
    if (quantize_point(p) == v) {
      sum = sum + p;
      ++count;
    }
  }
  if (count == 0) return enhance_cell_center(v);
  return clamp_to_cell((1.0 / static_cast<double>(count)) * sum, v);
}

SnapOracleEnhancer::SnapOracleEnhancer(std::span<const Vec3> originals) {
  std::map<LatticePoint, std::pair<Vec3, std::size_t>> acc;
  for (const auto& p : originals) {
    auto& [sum, count] = acc[quantize_point(p)];
    sum = sum + p;
    ++count;
  }
  for (const auto& [cell, entry] : acc) {
    centroids_[cell] = clamp_to_cell((1.0 / static_cast<double>(entry.second)) * entry.first, cell);
  }
}

Vec3 SnapOracleEnhancer::enhance(const LatticePoint& v) const {
  const auto it = centroids_.find(v);
  return it == centroids_.end() ? enhance_cell_center(v) : it->second;
}

std::vector<Vec3> enhance_all(const FidelityEnhancer& enhancer, std::span<const LatticePoint> vertices) {
  std::vector<Vec3> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(clamp_to_cell(enhancer.enhance(v), v));
  return out;
}

FidelityMeshes fidelity_meshes(const QuantizedMesh& quantized, const FidelityEnhancer& enhancer) {
  FidelityMeshes out;
  out.quantized.faces = quantized.faces;
  out.quantized.vertices = enhance_all(CellCenterEnhancer{}, quantized.vertices);
  out.enhanced.faces = quantized.faces;
  out.enhanced.vertices = enhance_all(enhancer, quantized.vertices);
  return out;
}

FidelityReport fidelity_report(const Mesh& mesh, const FidelityEnhancer& enhancer,
                               std::size_t sample_points, std::uint64_t seed) {
  const auto q = quantize(mesh);
  const auto meshes = fidelity_meshes(q, enhancer);

  const auto reference = sample_surface(mesh, sample_points, seed);
  const auto quantized = sample_surface(meshes.quantized, sample_points, seed);
  const auto enhanced = sample_surface(meshes.enhanced, sample_points, seed);

  FidelityReport report;
  report.n_vertices_before = mesh.vertices.size();
  report.n_vertices_after = q.vertices.size();
  report.cd_quantized = chamfer(reference, quantized);
  report.hd_quantized = hausdorff(reference, quantized);
  report.cd_enhanced = chamfer(reference, enhanced);
  report.hd_enhanced = hausdorff(reference, enhanced);
  return report;
}

}  // namespace fastmesh
