#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fastmesh/mesh.hpp"

namespace fastmesh {

enum class RejectReason { kNonManifold, kCoplanar, kDuplicate, kTooManyVertices, kDegenerate };

std::string_view to_string(RejectReason reason);

struct FilterVerdict {
  std::vector<RejectReason> reasons;
  double bad_edge_ratio = 0.0;
  double duplicate_normal_ratio = 0.0;

  [[nodiscard]] bool accepted() const { return reasons.empty(); }
  [[nodiscard]] bool has(RejectReason r) const;
};

inline constexpr double kDefaultManifoldThreshold = 0.10;
inline constexpr double kDefaultCoplanarThreshold = 0.50;
inline constexpr std::size_t kDefaultMaxVertices = 4000;

/// Rejects iff the share of edges used once or more than twice exceeds
/// `threshold` (strictly).
FilterVerdict check_manifold(const Mesh& mesh, double threshold = kDefaultManifoldThreshold);

/// Vertex normal = normalized sum of incident unit face normals, bucketed on
/// components rounded to 1e-4. The duplicate ratio is the share of vertices
/// (among those with a normal) whose bucket holds more than one vertex;
/// rejects iff it exceeds `threshold`. Throws kDegenerateInput when no face
/// has positive area.
FilterVerdict check_coplanar(const Mesh& mesh, double threshold = kDefaultCoplanarThreshold);
double duplicate_normal_ratio(const Mesh& mesh);

struct CorpusItem {
  std::string id;
  std::size_t vertex_count = 0;
  std::size_t face_count = 0;
};

/// Ids of the first occurrence of each (vertex count, face count) pair, in
/// input order.
std::vector<std::string> dedup(const std::vector<CorpusItem>& corpus);
std::vector<std::string> dedup(const std::vector<std::pair<std::string, Mesh>>& corpus);

struct CorpusFilterOptions {
  std::size_t max_vertices = kDefaultMaxVertices;  // accepted iff V < max_vertices
  double manifold_threshold = kDefaultManifoldThreshold;
  double coplanar_threshold = kDefaultCoplanarThreshold;
};

struct CorpusEntry {
  std::string path;
  std::size_t vertex_count = 0;
  std::size_t face_count = 0;
  std::optional<FilterVerdict> verdict;
  std::string error;  // non-empty when the file could not be read
};

/// Vertex cap, manifold, coplanar, then dedup among the survivors. Unreadable
/// files yield an entry with `error` set; the batch always completes.
std::vector<CorpusEntry> filter_corpus(const std::vector<std::filesystem::path>& manifest,
                                       const CorpusFilterOptions& options = {});

/// Newline-separated paths; blank lines and `#` comments skipped. Relative
/// paths resolve against `base`.
std::vector<std::filesystem::path> parse_manifest(std::string_view text,
                                                  const std::filesystem::path& base = {});

/// {"schema_version", "entries": [...], "summary": {...}}
std::string corpus_report_json(const std::vector<CorpusEntry>& entries);

}  // namespace fastmesh
