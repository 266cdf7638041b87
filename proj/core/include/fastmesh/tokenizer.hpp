#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fastmesh/mesh.hpp"

namespace fastmesh {

// Lattice layout: 7 bits per axis, split into a 3-bit block coordinate
// (8 blocks per axis) and a 4-bit offset coordinate (16 cells per block).
inline constexpr int kLatticeBits = 7;
inline constexpr int kLatticeSize = 1 << kLatticeBits;  // 128
inline constexpr int kBlocksPerAxis = 8;
inline constexpr int kOffsetsPerAxis = 16;

// Token id layout: [offsets | blocks | START | END].
inline constexpr std::uint32_t kOffsetVocab = 4096;  // 16^3
inline constexpr std::uint32_t kBlockVocab = 512;    // 8^3
inline constexpr std::uint32_t kStartToken = kOffsetVocab + kBlockVocab;  // 4608
inline constexpr std::uint32_t kEndToken = kStartToken + 1;               // 4609
inline constexpr std::uint32_t kVocabSize = kEndToken + 1;                // 4610

/// A vertex snapped to the 128^3 lattice.
struct LatticePoint {
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  std::uint8_t z = 0;

  [[nodiscard]] std::uint32_t block_id() const {
    return static_cast<std::uint32_t>((x >> 4) * 64 + (y >> 4) * 8 + (z >> 4));
  }
  [[nodiscard]] std::uint32_t offset_id() const {
    return static_cast<std::uint32_t>((x & 15) * 256 + (y & 15) * 16 + (z & 15));
  }
  static LatticePoint from_ids(std::uint32_t block_id, std::uint32_t offset_id);

  auto operator<=>(const LatticePoint&) const = default;
};

/// Canonical vertex order: (block id, offset id) ascending.
inline bool canonical_less(const LatticePoint& a, const LatticePoint& b) {
  const auto ka = a.block_id(), kb = b.block_id();
  return ka != kb ? ka < kb : a.offset_id() < b.offset_id();
}

inline bool is_block_token(std::uint32_t t) { return t >= kOffsetVocab && t < kStartToken; }
inline bool is_offset_token(std::uint32_t t) { return t < kOffsetVocab; }

/// Quantized mesh with duplicate-merge bookkeeping. Vertices are stored in
/// canonical order, so they line up index-for-index with detokenize output.
struct QuantizedMesh {
  std::vector<LatticePoint> vertices;
  std::vector<std::uint32_t> merge_map;  // original vertex index -> vertices index
  std::vector<Face> faces;               // remapped, degenerate faces dropped
};

/// floor(c * 128) per axis; throws kOutOfRange when a coordinate is not in [0,1).
LatticePoint quantize_point(const Vec3& p);
QuantizedMesh quantize(const Mesh& mesh);

struct TokenSequence {
  std::vector<std::uint32_t> tokens;
  bool operator==(const TokenSequence&) const = default;
};

/// Block-wise indexing. Throws kPrecondition on duplicate lattice points.
TokenSequence tokenize(std::span<const LatticePoint> vertices);

/// Inverse of tokenize. Throws kMalformedSequence when START/END are missing
/// or misplaced, an id is out of vocabulary, an offset precedes every block
/// token, block tokens do not strictly increase, or offsets within a block do
/// not strictly increase.
std::vector<LatticePoint> detokenize(const TokenSequence& seq);

/// One decimal token id per line.
std::string write_tokens(const TokenSequence& seq);
TokenSequence parse_tokens(std::string_view text);

struct TokenStats {
  std::size_t n_vertices = 0;
  std::size_t n_blocks = 0;
  std::size_t n_tokens = 0;
  std::size_t vanilla_estimate = 0;  // 9F, or 18V when the mesh has no faces
  std::size_t bpt_estimate = 0;      // round(0.25 * vanilla_estimate)
  double ratio_vs_bpt = 0.0;         // n_tokens / bpt_estimate, 0 when undefined
};

/// Quantizes and tokenizes a normalized mesh and reports sequence sizes.
TokenStats token_stats(const Mesh& mesh);

}  // namespace fastmesh
