#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace fastmesh {

using Vec3 = std::array<double, 3>;
using Face = std::array<std::uint32_t, 3>;

/// Triangle mesh in normalized (unitless) space.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  [[nodiscard]] std::size_t vertex_count() const { return vertices.size(); }
  [[nodiscard]] std::size_t face_count() const { return faces.size(); }
  [[nodiscard]] bool empty() const { return vertices.empty(); }

  bool operator==(const Mesh&) const = default;
};

/// Throws Error(kOutOfRange / kMalformedInput) when a face index is out of
/// range, a face repeats an index, or a coordinate is non-finite.
void validate(const Mesh& mesh);

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Twice-area normal of a face (not normalized).
inline Vec3 face_normal(const Mesh& mesh, const Face& f) {
  const Vec3& a = mesh.vertices[f[0]];
  return cross(mesh.vertices[f[1]] - a, mesh.vertices[f[2]] - a);
}

inline double face_area(const Mesh& mesh, const Face& f) {
  return 0.5 * norm(face_normal(mesh, f));
}

}  // namespace fastmesh
