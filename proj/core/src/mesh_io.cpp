#include "fastmesh/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "fastmesh/error.hpp"

namespace fastmesh {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  // from_chars rejects a leading '+', which OBJ exporters occasionally emit.
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::uint32_t resolve_index(std::string_view token, std::size_t vertex_count, std::size_t line) {
  const auto slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc() || ptr != head.data() + head.size()) {
    fail(ErrorCode::kMalformedInput,
         "line " + std::to_string(line) + ": bad face index '" + std::string(token) + "'");
  }
  long long resolved = value > 0 ? value - 1 : static_cast<long long>(vertex_count) + value;
  if (value == 0 || resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    fail(ErrorCode::kOutOfRange, "line " + std::to_string(line) + ": face index " +
                                     std::to_string(value) + " out of range (" +
                                     std::to_string(vertex_count) + " vertices)");
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

void validate(const Mesh& mesh) {
  for (const auto& v : mesh.vertices) {
    for (double c : v) {
      if (!std::isfinite(c)) fail(ErrorCode::kMalformedInput, "non-finite vertex coordinate");
    }
  }
  const auto n = mesh.vertices.size();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (auto idx : face) {
      if (idx >= n) fail(ErrorCode::kOutOfRange, "face " + std::to_string(f) + " index out of range");
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      fail(ErrorCode::kOutOfRange, "face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

Mesh parse_obj(std::istream& in) {
  Mesh mesh;
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> polygon;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const auto fields = split_ws(line);
    if (fields[0] == "v") {
      if (fields.size() < 4) {
        fail(ErrorCode::kMalformedInput,
             "line " + std::to_string(line_no) + ": vertex needs three coordinates");
      }
      Vec3 p{};
      for (int a = 0; a < 3; ++a) {
        if (!parse_double(fields[a + 1], p[a]) || !std::isfinite(p[a])) {
          fail(ErrorCode::kMalformedInput,
               "line " + std::to_string(line_no) + ": bad coordinate '" +
                   std::string(fields[a + 1]) + "'");
        }
      }
      mesh.vertices.push_back(p);
    } else if (fields[0] == "f") {
      polygon.clear();
      for (std::size_t k = 1; k < fields.size(); ++k) {
        polygon.push_back(resolve_index(fields[k], mesh.vertices.size(), line_no));
      }
      if (polygon.size() < 3) {
        fail(ErrorCode::kMalformedInput,
             "line " + std::to_string(line_no) + ": face has fewer than 3 vertices");
      }
      for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
        const Face tri{polygon[0], polygon[k], polygon[k + 1]};
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
        mesh.faces.push_back(tri);
      }
    }
  }
  return mesh;
}

Mesh parse_obj(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_obj(in);
}

Mesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return parse_obj(in);
}

std::string write_obj(const Mesh& mesh) {
  std::string out = "# fastmesh obj: " + std::to_string(mesh.vertices.size()) + " vertices, " +
                    std::to_string(mesh.faces.size()) + " faces\n";
  char buf[64];
  for (const auto& v : mesh.vertices) {
    out += 'v';
    for (double c : v) {
      const auto res = std::to_chars(buf, buf + sizeof buf, c, std::chars_format::general,
                                     std::numeric_limits<double>::max_digits10);
      out += ' ';
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  for (const auto& f : mesh.faces) {
    out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
           std::to_string(f[2] + 1) + '\n';
  }
  return out;
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << write_obj(mesh);
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

Mesh normalize(const Mesh& mesh) {
  if (mesh.vertices.empty()) fail(ErrorCode::kDegenerateInput, "cannot normalize an empty mesh");
  Vec3 lo = mesh.vertices.front(), hi = mesh.vertices.front();
  for (const auto& v : mesh.vertices) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], v[a]);
      hi[a] = std::max(hi[a], v[a]);
    }
  }
  const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  if (!(extent > 0.0)) fail(ErrorCode::kDegenerateInput, "bounding box has zero extent");
  const double scale = (1.0 - kNormalizeEpsilon) / extent;
  const Vec3 center = 0.5 * (lo + hi);

  Mesh out = mesh;
  for (auto& v : out.vertices) {
    for (int a = 0; a < 3; ++a) {
      double c = (v[a] - center[a]) * scale + 0.5;
      // Rounding can only nudge the box faces; keep the half-open contract.
      c = std::clamp(c, 0.0, std::nextafter(1.0, 0.0));
      v[a] = c;
    }
  }
  return out;
}

ManifoldReport manifold_report(const Mesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> usage;
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      auto a = f[e], b = f[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++usage[{a, b}];
    }
  }
  ManifoldReport report;
  report.edge_count = usage.size();
  for (const auto& [edge, count] : usage) {
    report.total_usage += count;
    if (count == 1) ++report.edges_used_once;
    if (count > 2) ++report.edges_used_gt_twice;
  }
  if (report.edge_count > 0) {
    report.bad_edge_ratio =
        static_cast<double>(report.edges_used_once + report.edges_used_gt_twice) /
        static_cast<double>(report.edge_count);
  }
  return report;
}

}  // namespace fastmesh
