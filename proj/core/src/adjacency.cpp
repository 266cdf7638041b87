#include "fastmesh/adjacency.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "fastmesh/error.hpp"

namespace fastmesh {

AdjacencyMatrix::AdjacencyMatrix(std::size_t n, std::vector<VertexPair> edges)
    : n_(n), edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (e.i >= e.j) fail(ErrorCode::kOutOfRange, "adjacency pairs must satisfy i < j");
    if (e.j >= n_) fail(ErrorCode::kOutOfRange, "adjacency index " + std::to_string(e.j) + " >= n");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool AdjacencyMatrix::contains(std::uint32_t a, std::uint32_t b) const {
  if (a == b) return false;
  return std::binary_search(edges_.begin(), edges_.end(), make_pair_sorted(a, b));
}

std::vector<std::vector<std::uint32_t>> AdjacencyMatrix::neighbors() const {
  std::vector<std::vector<std::uint32_t>> out(n_);
  for (const auto& e : edges_) {
    out[e.i].push_back(e.j);
    out[e.j].push_back(e.i);
  }
  // Edges are sorted by (i, j): each list gets its smaller neighbors (as j) in
  // ascending i order before its larger ones, so the lists are already sorted.
  return out;
}

namespace {

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 0;

  bool next(std::string_view& out) {
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view s = text.substr(pos, end - pos);
      pos = end + 1;
      ++line;
      while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      if (s.empty() || s.front() == '#') continue;
      out = s;
      return true;
    }
    return false;
  }
};

template <typename T>
const char* parse_number(const char* first, const char* last, T& value) {
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() ? ptr : nullptr;
}

}  // namespace

std::string write_adjacency(const AdjacencyMatrix& adj) {
  std::string out = std::to_string(adj.size()) + '\n';
  for (const auto& e : adj.edges()) {
    out += std::to_string(e.i) + ' ' + std::to_string(e.j) + '\n';
  }
  return out;
}

AdjacencyMatrix parse_adjacency(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  if (!reader.next(line)) fail(ErrorCode::kMalformedInput, "adjacency file is empty");
  std::size_t n = 0;
  const char* end = line.data() + line.size();
  if (parse_number(line.data(), end, n) != end) {
    fail(ErrorCode::kMalformedInput, "adjacency header must be the vertex count");
  }
  std::vector<VertexPair> edges;
  while (reader.next(line)) {
    const char* first = line.data();
    const char* last = first + line.size();
    VertexPair p;
    const char* mid = parse_number(first, last, p.i);
    const char* tail = mid ? parse_number(mid, last, p.j) : nullptr;
    if (tail != last) {
      fail(ErrorCode::kMalformedInput, "adjacency line " + std::to_string(reader.line) + " is not 'i j'");
    }
    edges.push_back(p);
  }
  return AdjacencyMatrix(n, std::move(edges));
}

std::string write_logits(const SparseLogits& logits) {
  std::string out;
  char buf[64];
  for (const auto& [pair, logit] : logits) {
    const auto res = std::to_chars(buf, buf + sizeof buf, logit);
    out += std::to_string(pair.i) + ' ' + std::to_string(pair.j) + ' ';
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

SparseLogits parse_logits(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  SparseLogits out;
  while (reader.next(line)) {
    const char* first = line.data();
    const char* last = first + line.size();
    PairLogit entry;
    const char* a = parse_number(first, last, entry.pair.i);
    const char* b = a ? parse_number(a, last, entry.pair.j) : nullptr;
    const char* c = b ? parse_number(b, last, entry.logit) : nullptr;
    if (c != last || entry.pair.i >= entry.pair.j) {
      fail(ErrorCode::kMalformedInput, "logit line " + std::to_string(reader.line) + " is not 'i j logit' with i<j");
    }
    out.push_back(entry);
  }
  std::sort(out.begin(), out.end(), [](const PairLogit& x, const PairLogit& y) { return x.pair < y.pair; });
  return out;
}

}  // namespace fastmesh
