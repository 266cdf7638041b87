#include "fastmesh/metrics.hpp"

#include <algorithm>
#include <random>

#include "fastmesh/error.hpp"
#include "fastmesh/mesh_io.hpp"
#include "fastmesh/sampling.hpp"

namespace fastmesh {

PointSample sample_surface(const Mesh& mesh, std::size_t count, std::uint64_t seed) {
  std::vector<double> cumulative;
  cumulative.reserve(mesh.faces.size());
  double total = 0.0;
  for (const auto& f : mesh.faces) {
    total += face_area(mesh, f);
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) fail(ErrorCode::kDegenerateInput, "cannot sample a surface with zero area");

  PointSample sample;
  sample.count = count;
  sample.seed = seed;
  sample.points.reserve(count);
  sample.face_of_point.reserve(count);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    const double target = uniform_unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    // Zero-area faces share their predecessor's cumulative value and can never be hit.
    const auto face = static_cast<std::uint32_t>(it - cumulative.begin());
    const double s = std::sqrt(uniform_unit(rng));
    const double r2 = uniform_unit(rng);
    const auto& f = mesh.faces[face];
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    sample.points.push_back((1.0 - s) * a + (s * (1.0 - r2)) * b + (s * r2) * c);
    sample.face_of_point.push_back(face);
  }
  return sample;
}

namespace {

void require_points(const PointSample& a, const PointSample& b) {
  if (a.points.empty() || b.points.empty()) fail(ErrorCode::kPrecondition, "distance between empty samples");
}

}  // namespace

double mean_nearest(const PointSample& a, const PointSample& b, NearestMethod method) {
  require_points(a, b);
  const auto d = nearest_distances(a.points, b.points, method);
  double total = 0.0;
  for (double x : d) total += x;
  return total / static_cast<double>(d.size());
}

double max_nearest(const PointSample& a, const PointSample& b, NearestMethod method) {
  require_points(a, b);
  const auto d = nearest_distances(a.points, b.points, method);
  return *std::max_element(d.begin(), d.end());
}

double chamfer(const PointSample& a, const PointSample& b, NearestMethod method) {
  return 100.0 * 0.5 * (mean_nearest(a, b, method) + mean_nearest(b, a, method));
}

double hausdorff(const PointSample& a, const PointSample& b, NearestMethod method) {
  return 100.0 * std::max(max_nearest(a, b, method), max_nearest(b, a, method));
}

namespace {

// Face soup ordered by geometry alone, so meshes with the same triangles
// sample identically whatever their vertex and face numbering.
Mesh geometric_canonical(const Mesh& m) {
  std::vector<std::array<Vec3, 3>> tris;
  tris.reserve(m.faces.size());
  for (const auto& f : m.faces) {
    std::array<Vec3, 3> t{m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]};
    std::sort(t.begin(), t.end());
    tris.push_back(t);
  }
  std::sort(tris.begin(), tris.end());
  Mesh out;
  out.vertices.reserve(3 * tris.size());
  for (const auto& t : tris) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), t.begin(), t.end());
    out.faces.push_back({base, base + 1, base + 2});
  }
  return out;
}

}  // namespace

ShapeScores compare_meshes(const Mesh& a, const Mesh& b, const CompareOptions& options) {
  validate(a);
  validate(b);
  const Mesh na = geometric_canonical(options.normalize_first ? normalize(a) : a);
  const Mesh nb = geometric_canonical(options.normalize_first ? normalize(b) : b);
  const auto sa = sample_surface(na, options.points, options.seed);
  const auto sb = sample_surface(nb, options.points, options.seed);
  return {chamfer(sa, sb), hausdorff(sa, sb)};
}

EdgeScores adjacency_f1_recall(const AdjacencyMatrix& pred, const AdjacencyMatrix& truth) {
  if (pred.size() != truth.size()) fail(ErrorCode::kShapeMismatch, "adjacency sizes differ");
  std::size_t tp = 0;
  const auto pe = pred.edges();
  const auto te = truth.edges();
  std::size_t i = 0, j = 0;
  while (i < pe.size() && j < te.size()) {
    if (pe[i] < te[j]) {
      ++i;
    } else if (te[j] < pe[i]) {
      ++j;
    } else {
      ++tp, ++i, ++j;
    }
  }
  EdgeScores s;
  s.precision = pe.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(pe.size());
  if (te.empty()) {
    s.recall = 1.0;
    s.f1 = pe.empty() ? 1.0 : 0.0;
    return s;
  }
  s.recall = static_cast<double>(tp) / static_cast<double>(te.size());
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

}  // namespace fastmesh
