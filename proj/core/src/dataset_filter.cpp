#include "fastmesh/dataset_filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "fastmesh/error.hpp"
#include "fastmesh/mesh_io.hpp"

namespace fastmesh {

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNonManifold: return "non_manifold";
    case RejectReason::kCoplanar: return "coplanar";
    case RejectReason::kDuplicate: return "duplicate";
    case RejectReason::kTooManyVertices: return "too_many_vertices";
    case RejectReason::kDegenerate: return "degenerate";
  }
  return "unknown";
}

bool FilterVerdict::has(RejectReason r) const {
  return std::find(reasons.begin(), reasons.end(), r) != reasons.end();
}

FilterVerdict check_manifold(const Mesh& mesh, double threshold) {
  FilterVerdict v;
  v.bad_edge_ratio = manifold_report(mesh).bad_edge_ratio;
  if (v.bad_edge_ratio > threshold) v.reasons.push_back(RejectReason::kNonManifold);
  return v;
}

double duplicate_normal_ratio(const Mesh& mesh) {
  std::vector<Vec3> sums(mesh.vertices.size(), Vec3{0.0, 0.0, 0.0});
  std::vector<bool> touched(mesh.vertices.size(), false);
  bool any_area = false;
  for (const auto& f : mesh.faces) {
    const Vec3 n = face_normal(mesh, f);
    const double len = norm(n);
    if (!(len > 0.0)) continue;
    any_area = true;
    const Vec3 unit = (1.0 / len) * n;
    for (auto idx : f) {
      sums[idx] = sums[idx] + unit;
      touched[idx] = true;
    }
  }
  if (!any_area) fail(ErrorCode::kDegenerateInput, "every face has zero area");

  std::map<std::array<long long, 3>, std::size_t> buckets;
  std::vector<std::array<long long, 3>> keys;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (!touched[i]) continue;
    const double len = norm(sums[i]);
    // Opposing normals can cancel; those vertices share the zero bucket.
    const Vec3 unit = len > 0.0 ? (1.0 / len) * sums[i] : Vec3{0.0, 0.0, 0.0};
    std::array<long long, 3> key{};
    for (int a = 0; a < 3; ++a) key[a] = std::llround(unit[a] * 1e4);
    keys.push_back(key);
    ++buckets[key];
  }
  if (keys.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& k : keys) {
    if (buckets[k] > 1) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(keys.size());
}

FilterVerdict check_coplanar(const Mesh& mesh, double threshold) {
  FilterVerdict v;
  v.duplicate_normal_ratio = duplicate_normal_ratio(mesh);
  if (v.duplicate_normal_ratio > threshold) v.reasons.push_back(RejectReason::kCoplanar);
  return v;
}

std::vector<std::string> dedup(const std::vector<CorpusItem>& corpus) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::string> kept;
  for (const auto& item : corpus) {
    if (seen.insert({item.vertex_count, item.face_count}).second) kept.push_back(item.id);
  }
  return kept;
}

std::vector<std::string> dedup(const std::vector<std::pair<std::string, Mesh>>& corpus) {
  std::vector<CorpusItem> items;
  items.reserve(corpus.size());
  for (const auto& [id, mesh] : corpus) items.push_back({id, mesh.vertex_count(), mesh.face_count()});
  return dedup(items);
}

std::vector<CorpusEntry> filter_corpus(const std::vector<std::filesystem::path>& manifest,
                                       const CorpusFilterOptions& options) {
  std::vector<CorpusEntry> entries;
  entries.reserve(manifest.size());
  for (const auto& path : manifest) {
    CorpusEntry entry;
    entry.path = path.string();
    try {
      const Mesh mesh = read_obj(path);
      entry.vertex_count = mesh.vertex_count();
      entry.face_count = mesh.face_count();
      FilterVerdict verdict;
      if (mesh.vertex_count() >= options.max_vertices) verdict.reasons.push_back(RejectReason::kTooManyVertices);
      if (mesh.faces.empty()) {
        verdict.reasons.push_back(RejectReason::kDegenerate);
      } else {
        const auto manifold = check_manifold(mesh, options.manifold_threshold);
        verdict.bad_edge_ratio = manifold.bad_edge_ratio;
        verdict.reasons.insert(verdict.reasons.end(), manifold.reasons.begin(), manifold.reasons.end());
        try {
          const auto coplanar = check_coplanar(mesh, options.coplanar_threshold);
          verdict.duplicate_normal_ratio = coplanar.duplicate_normal_ratio;
          verdict.reasons.insert(verdict.reasons.end(), coplanar.reasons.begin(), coplanar.reasons.end());
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerateInput) throw;
          verdict.reasons.push_back(RejectReason::kDegenerate);
        }
      }
      entry.verdict = std::move(verdict);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }

  // Dedup runs over the meshes that survived every other check.
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto& entry : entries) {
    if (!entry.verdict || !entry.verdict->accepted()) continue;
    if (!seen.insert({entry.vertex_count, entry.face_count}).second) {
      entry.verdict->reasons.push_back(RejectReason::kDuplicate);
    }
  }
  return entries;
}

std::vector<std::filesystem::path> parse_manifest(std::string_view text, const std::filesystem::path& base) {
  std::vector<std::filesystem::path> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view s = text.substr(pos, end - pos);
    pos = end + 1;
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    if (s.empty() || s.front() == '#') continue;
    std::filesystem::path p{std::string(s)};
    if (p.is_relative() && !base.empty()) p = base / p;
    out.push_back(std::move(p));
  }
  return out;
}

std::string corpus_report_json(const std::vector<CorpusEntry>& entries) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  auto& list = j["entries"];
  list = nlohmann::ordered_json::array();
  std::size_t accepted = 0, rejected = 0, errors = 0;
  for (const auto& e : entries) {
    nlohmann::ordered_json item;
    item["path"] = e.path;
    if (!e.verdict) {
      item["error"] = e.error;
      ++errors;
    } else {
      item["accepted"] = e.verdict->accepted();
      auto reasons = nlohmann::ordered_json::array();
      for (auto r : e.verdict->reasons) reasons.push_back(std::string(to_string(r)));
      item["reasons"] = reasons;
      item["vertices"] = e.vertex_count;
      item["faces"] = e.face_count;
      item["bad_edge_ratio"] = e.verdict->bad_edge_ratio;
      item["duplicate_normal_ratio"] = e.verdict->duplicate_normal_ratio;
      (e.verdict->accepted() ? accepted : rejected) += 1;
    }
    list.push_back(std::move(item));
  }
  j["summary"] = {{"total", entries.size()}, {"accepted", accepted}, {"rejected", rejected}, {"errors", errors}};
  return j.dump(2) + "\n";
}

}  // namespace fastmesh
