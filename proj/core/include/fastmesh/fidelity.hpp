#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fastmesh/mesh.hpp"
#include "fastmesh/tokenizer.hpp"

namespace fastmesh {

/// Maps a lattice vertex back to continuous space. Implementations must
/// return a point inside the source cell: [l/128, (l+1)/128) per axis.
class FidelityEnhancer {
 public:
  virtual ~FidelityEnhancer() = default;
  [[nodiscard]] virtual Vec3 enhance(const LatticePoint& v) const = 0;
};

/// Per-axis (l + 0.5) / 128.
Vec3 enhance_cell_center(const LatticePoint& v);

/// Centroid of the originals that quantize to `v`, clamped into the cell;
/// the cell center when none do.
Vec3 enhance_snap_oracle(const LatticePoint& v, std::span<const Vec3> originals);

/// Clamps p into the half-open cell of v.
Vec3 clamp_to_cell(const Vec3& p, const LatticePoint& v);

class CellCenterEnhancer final : public FidelityEnhancer {
 public:
  [[nodiscard]] Vec3 enhance(const LatticePoint& v) const override {
    return enhance_cell_center(v);
  }
};

/// Precomputed enhance_snap_oracle over a fixed set of originals.
class SnapOracleEnhancer final : public FidelityEnhancer {
 public:
  explicit SnapOracleEnhancer(std::span<const Vec3> originals);
  [[nodiscard]] Vec3 enhance(const LatticePoint& v) const override;

 private:
  std::map<LatticePoint, Vec3> centroids_;
};

std::vector<Vec3> enhance_all(const FidelityEnhancer& enhancer,
                              std::span<const LatticePoint> vertices);

struct FidelityReport {
  double cd_quantized = 0.0;
  double hd_quantized = 0.0;
  double cd_enhanced = 0.0;
  double hd_enhanced = 0.0;
  std::size_t n_vertices_before = 0;
  std::size_t n_vertices_after = 0;
};

struct FidelityMeshes {
  Mesh quantized;  // cell-center coordinates
  Mesh enhanced;   // enhancer coordinates, same faces
};

FidelityMeshes fidelity_meshes(const QuantizedMesh& quantized, const FidelityEnhancer& enhancer);

/// Quantizes a normalized mesh and scores both reconstructions against it in
/// the shared normalized frame (no re-normalization before sampling).
FidelityReport fidelity_report(const Mesh& mesh, const FidelityEnhancer& enhancer,
                               std::size_t sample_points = 5000, std::uint64_t seed = 0);

}  // namespace fastmesh
