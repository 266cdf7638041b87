#include "fastmesh/tokenizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "fastmesh/error.hpp"

namespace fastmesh {

LatticePoint LatticePoint::from_ids(std::uint32_t block_id, std::uint32_t offset_id) {
  const std::uint32_t bx = block_id / 64, by = (block_id / 8) % 8, bz = block_id % 8;
  const std::uint32_t ox = offset_id / 256, oy = (offset_id / 16) % 16, oz = offset_id % 16;
  return {static_cast<std::uint8_t>(bx * 16 + ox), static_cast<std::uint8_t>(by * 16 + oy),
          static_cast<std::uint8_t>(bz * 16 + oz)};
}

LatticePoint quantize_point(const Vec3& p) {
  std::array<std::uint8_t, 3> l{};
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] >= 0.0 && p[a] < 1.0)) {
      fail(ErrorCode::kOutOfRange,
           "coordinate " + std::to_string(p[a]) + " outside [0,1); normalize first");
    }
    const double cell = std::floor(p[a] * kLatticeSize);
    l[a] = static_cast<std::uint8_t>(std::clamp(cell, 0.0, double(kLatticeSize - 1)));
  }
  return {l[0], l[1], l[2]};
}

QuantizedMesh quantize(const Mesh& mesh) {
  std::vector<LatticePoint> raw(mesh.vertices.size());
  std::transform(mesh.vertices.begin(), mesh.vertices.end(), raw.begin(), quantize_point);

  QuantizedMesh q;
  q.vertices = raw;
  std::sort(q.vertices.begin(), q.vertices.end(), canonical_less);
  q.vertices.erase(std::unique(q.vertices.begin(), q.vertices.end()), q.vertices.end());

  q.merge_map.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto it = std::lower_bound(q.vertices.begin(), q.vertices.end(), raw[i], canonical_less);
    q.merge_map[i] = static_cast<std::uint32_t>(it - q.vertices.begin());
  }

  q.faces.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    const Face g{q.merge_map.at(f[0]), q.merge_map.at(f[1]), q.merge_map.at(f[2])};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
    q.faces.push_back(g);
  }
  return q;
}

TokenSequence tokenize(std::span<const LatticePoint> vertices) {
  std::vector<LatticePoint> sorted(vertices.begin(), vertices.end());
  std::sort(sorted.begin(), sorted.end(), canonical_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorCode::kPrecondition, "duplicate lattice points; merge vertices before tokenizing");
  }

  TokenSequence seq;
  seq.tokens.reserve(sorted.size() * 2 + 2);
  seq.tokens.push_back(kStartToken);
  std::uint32_t current_block = kBlockVocab;  // sentinel: no block yet
  for (const auto& v : sorted) {
    if (v.block_id() != current_block) {
      current_block = v.block_id();
      seq.tokens.push_back(kOffsetVocab + current_block);
    }
    seq.tokens.push_back(v.offset_id());
  }
  seq.tokens.push_back(kEndToken);
  return seq;
}

std::vector<LatticePoint> detokenize(const TokenSequence& seq) {
  const auto& t = seq.tokens;
  auto bad = [](const std::string& why) { fail(ErrorCode::kMalformedSequence, why); };
  if (t.size() < 2 || t.front() != kStartToken || t.back() != kEndToken) {
    bad("sequence must start with START and end with END");
  }

  std::vector<LatticePoint> out;
  bool have_block = false;
  std::uint32_t block = 0;
  bool have_offset = false;
  std::uint32_t last_offset = 0;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const auto id = t[k];
    if (id >= kVocabSize) bad("token id " + std::to_string(id) + " out of vocabulary");
    if (id == kStartToken || id == kEndToken) bad("special token at position " + std::to_string(k));
    if (is_block_token(id)) {
      const auto b = id - kOffsetVocab;
      if (have_block && b <= block) bad("block tokens must strictly increase");
      block = b;
      have_block = true;
      have_offset = false;
    } else {
      if (!have_block) bad("offset token before any block token");
      if (have_offset && id <= last_offset) bad("offsets within a block must strictly increase");
      out.push_back(LatticePoint::from_ids(block, id));
      last_offset = id;
      have_offset = true;
    }
  }
  return out;
}

std::string write_tokens(const TokenSequence& seq) {
  std::string out;
  out.reserve(seq.tokens.size() * 5);
  for (auto t : seq.tokens) {
    out += std::to_string(t);
    out += '\n';
  }
  return out;
}

TokenSequence parse_tokens(std::string_view text) {
  TokenSequence seq;
  std::size_t pos = 0, line = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view s = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    if (s.empty()) continue;
    std::uint32_t id = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(ErrorCode::kMalformedInput, "token file line " + std::to_string(line) + ": '" +
                                           std::string(s) + "' is not a token id");
    }
    seq.tokens.push_back(id);
  }
  return seq;
}

TokenStats token_stats(const Mesh& mesh) {
  const auto q = quantize(mesh);
  const auto seq = tokenize(q.vertices);

  TokenStats s;
  s.n_vertices = q.vertices.size();
  s.n_tokens = seq.tokens.size();
  s.n_blocks = static_cast<std::size_t>(std::count_if(seq.tokens.begin(), seq.tokens.end(), is_block_token));
  s.vanilla_estimate = mesh.faces.empty() ? 18 * mesh.vertices.size() : 9 * mesh.faces.size();
  s.bpt_estimate = static_cast<std::size_t>(std::llround(0.25 * static_cast<double>(s.vanilla_estimate)));
  s.ratio_vs_bpt = s.bpt_estimate == 0 ? 0.0 : static_cast<double>(s.n_tokens) / static_cast<double>(s.bpt_estimate);
  return s;
}

}  // namespace fastmesh
