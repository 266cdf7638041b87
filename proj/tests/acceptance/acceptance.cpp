// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion number...]   (no arguments runs all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fastmesh/dataset_filter.hpp"
#include "fastmesh/edge_model.hpp"
#include "fastmesh/face_builder.hpp"
#include "fastmesh/fidelity.hpp"
#include "fastmesh/filtering.hpp"
#include "fastmesh/mesh_io.hpp"
#include "fastmesh/metrics.hpp"
#include "fastmesh/scorers.hpp"
#include "fastmesh/tokenizer.hpp"
#include "fastmesh/toy_edge_model.hpp"
#include "fastmesh_cli/app.hpp"
#include "shapes.hpp"

namespace fm = fastmesh;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1
Outcome tokenizer_roundtrip() {
  std::mt19937_64 rng(1001);
  std::size_t ok = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t count = 1 + rng() % 5000;
    std::set<fm::LatticePoint> s;
    while (s.size() < count) {
      const auto r = rng();
      s.insert({std::uint8_t(r & 127), std::uint8_t((r >> 7) & 127), std::uint8_t((r >> 14) & 127)});
    }
    std::vector<fm::LatticePoint> v(s.begin(), s.end());
    std::shuffle(v.begin(), v.end(), rng);
    // The canonical (block, offset) order, built independently of the library.
    auto expected = v;
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
      const auto key = [](const fm::LatticePoint& p) {
        return ((p.x >> 4) * 64 + (p.y >> 4) * 8 + (p.z >> 4)) * 4096 + (p.x & 15) * 256 + (p.y & 15) * 16 +
               (p.z & 15);
      };
      return key(a) < key(b);
    });
    ok += fm::detokenize(fm::tokenize(v)) == expected;
  }
  return {ok == trials, fmt("%zu/%zu sets", ok, trials)};
}

// ---------------------------------------------------------------- 2
Outcome token_length_law() {
  std::vector<fm::testing::NamedMesh> meshes = fm::testing::corpus();
  for (auto& m : fm::testing::toy_suite()) meshes.push_back(std::move(m));
  for (auto* f : {&fm::testing::tetrahedron, &fm::testing::single_triangle, &fm::testing::glued_tetrahedra}) {
    meshes.push_back({"fixed", fm::normalize(f())});
  }
  meshes.push_back({"grid", fm::normalize(fm::testing::flat_grid(20, 20))});

  std::size_t law_ok = 0, eligible = 0, in_band = 0;
  double lo = 1e9, hi = -1e9;
  for (const auto& nm : meshes) {
    const auto s = fm::token_stats(nm.mesh);
    // Independent count: distinct lattice cells and their distinct blocks.
    std::set<std::uint32_t> cells, blocks;
    for (const auto& p : nm.mesh.vertices) {
      const int x = int(p[0] * 128), y = int(p[1] * 128), z = int(p[2] * 128);
      cells.insert(std::uint32_t(x * 16384 + y * 128 + z));
      blocks.insert(std::uint32_t((x >> 4) * 64 + (y >> 4) * 8 + (z >> 4)));
    }
    law_ok += s.n_tokens == s.n_blocks + s.n_vertices + 2 && s.n_vertices == cells.size() &&
              s.n_blocks == blocks.size();
    const bool manifold = fm::manifold_report(nm.mesh).bad_edge_ratio == 0.0;
    if (manifold && nm.mesh.vertices.size() >= 500) {
      ++eligible;
      in_band += s.ratio_vs_bpt >= 0.18 && s.ratio_vs_bpt <= 0.35;
      lo = std::min(lo, s.ratio_vs_bpt);
      hi = std::max(hi, s.ratio_vs_bpt);
    }
  }
  return {law_ok == meshes.size() && eligible >= 20 && in_band == eligible,
          fmt("law %zu/%zu meshes; ratio in [0.18,0.35] on %zu/%zu manifold meshes with V>=500 (range %.3f..%.3f)",
              law_ok, meshes.size(), in_band, eligible, lo, hi)};
}

// ---------------------------------------------------------------- 3
Outcome spacetime_properties() {
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> g;
  const std::size_t pairs = 100000;
  std::size_t sym = 0, split = 0, sign = 0, flip = 0;
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t half = 1 + rng() % 16;
    const double scale = std::exp(g(rng) * 3);
    std::vector<double> u(2 * half), v(2 * half);
    for (auto& x : u) x = g(rng) * scale;
    for (auto& x : v) x = g(rng) * scale;
    const double d = fm::spacetime_distance(u, v);
    sym += d == fm::spacetime_distance(v, u);

    long double a = 0, b = 0;
    for (std::size_t k = 0; k < half; ++k) {
      a += (long double)(u[k] - v[k]) * (u[k] - v[k]);
      b += (long double)(u[half + k] - v[half + k]) * (u[half + k] - v[half + k]);
    }
    split += std::abs((long double)d - (a - b)) <= 1e-12L * (a + b) + 1e-300L;

    // Equal second halves: pure attraction term, never negative; equal first
    // halves: pure repulsion term, never positive.
    auto w = u;
    std::copy(v.begin() + half, v.end(), w.begin() + half);
    auto z = u;
    std::copy(v.begin(), v.begin() + half, z.begin());
    sign += fm::spacetime_distance(w, v) >= 0 && fm::spacetime_distance(z, v) <= 0;

    // Swapping halves negates exactly.
    std::vector<double> us(2 * half), vs(2 * half);
    std::copy(u.begin() + half, u.end(), us.begin());
    std::copy(u.begin(), u.begin() + half, us.begin() + half);
    std::copy(v.begin() + half, v.end(), vs.begin());
    std::copy(v.begin(), v.begin() + half, vs.begin() + half);
    flip += fm::spacetime_distance(us, vs) == -d;
  }
  const bool ok = sym == pairs && split == pairs && sign == pairs && flip == pairs;
  return {ok, fmt("symmetric %zu, split-sum %zu, sign %zu, half-swap %zu of %zu pairs", sym, split, sign, flip, pairs)};
}

// ---------------------------------------------------------------- 4
double rel_err(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
  return std::abs(analytic - numeric) / denom;
}

Outcome gradient_oracle() {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> u01(0, 1);
  double worst_loss = 0, worst_head = 0, worst_embed = 0;

  // Loss: (0,3) plus 20 random exponent pairs, 100 random logits each.
  std::vector<fm::AsymmetricGammas> settings{{0, 3}};
  for (int k = 0; k < 20; ++k) settings.push_back({u01(rng) * 5, u01(rng) * 5});
  const double h_loss = 1e-5;
  for (const auto& gm : settings) {
    for (int k = 0; k < 100; ++k) {
      const double z = (u01(rng) - 0.5) * 16;
      for (auto label : {fm::EdgeLabel::kPositive, fm::EdgeLabel::kNegative}) {
        const double fd = (fm::asymmetric_loss_from_logit(z + h_loss, label, gm) -
                           fm::asymmetric_loss_from_logit(z - h_loss, label, gm)) / (2 * h_loss);
        worst_loss = std::max(worst_loss, rel_err(fm::asymmetric_loss_grad(z, label, gm), fd));
      }
    }
  }

  fm::ToyEdgeModel model;
  model.initialize(4);
  for (auto& p : model.parameters()) p += (u01(rng) - 0.5) * 0.2;
  const auto& shape = model.shape();
  const double h = 1e-5;

  // Logit head: parameter and feature gradients at 100 random features.
  for (int k = 0; k < 100; ++k) {
    std::vector<double> feat(shape.heads);
    for (auto& f : feat) f = (u01(rng) - 0.5) * 2;
    std::vector<double> grad(model.parameter_count(), 0.0);
    const auto dfeat = model.head_backward(feat, 1.0, grad);
    for (std::size_t i = 0; i < feat.size(); ++i) {
      auto fp = feat, fn = feat;
      fp[i] += h;
      fn[i] -= h;
      worst_head = std::max(worst_head, rel_err(dfeat[i], (model.head(fp) - model.head(fn)) / (2 * h)));
    }
    for (const auto& b : model.blocks()) {
      if (b.name.rfind("head.", 0) != 0) continue;
      for (std::size_t i = b.offset; i < b.offset + b.size; ++i) {
        auto plus = model, minus = model;
        plus.parameters()[i] += h;
        minus.parameters()[i] -= h;
        worst_head = std::max(worst_head, rel_err(grad[i], (plus.head(feat) - minus.head(feat)) / (2 * h)));
      }
    }
  }

  // Embedding: gradient of <upstream, embed(p)> at 100 random points.
  for (int k = 0; k < 100; ++k) {
    const fm::Vec3 p{u01(rng), u01(rng), u01(rng)};
    std::vector<double> up(model.embedding_size());
    for (auto& x : up) x = u01(rng) - 0.5;
    std::vector<double> grad(model.parameter_count(), 0.0);
    model.embed_backward(p, up, grad);
    const auto dot = [&](const fm::ToyEdgeModel& m) {
      const auto e = m.embed(p);
      double s = 0;
      for (std::size_t i = 0; i < e.size(); ++i) s += up[i] * e[i];
      return s;
    };
    for (const auto& b : model.blocks()) {
      if (b.name.rfind("embed.", 0) != 0) continue;
      for (std::size_t i = b.offset; i < b.offset + b.size; ++i) {
        auto plus = model, minus = model;
        plus.parameters()[i] += h;
        minus.parameters()[i] -= h;
        worst_embed = std::max(worst_embed, rel_err(grad[i], (dot(plus) - dot(minus)) / (2 * h)));
      }
    }
  }
  const double tol = 1e-5;
  return {worst_loss <= tol && worst_head <= tol && worst_embed <= tol,
          fmt("max rel err: loss %.2e (21 settings), head %.2e, embedding %.2e", worst_loss, worst_head,
              worst_embed)};
}

// ---------------------------------------------------------------- 5
Outcome triangle_oracle() {
  std::mt19937_64 rng(5005);
  std::size_t ok = 0, total_tris = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const double p = double(rng() % 1001) / 1000.0;
    const auto adj = fm::testing::random_graph(n, p, rng);
    std::vector<fm::Face> brute;
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j)
        for (std::uint32_t k = j + 1; k < n; ++k)
          if (adj.contains(i, j) && adj.contains(i, k) && adj.contains(j, k)) brute.push_back({i, j, k});
    total_tris += brute.size();
    ok += fm::extract_faces(adj) == brute;
  }
  return {ok == 500, fmt("%zu/500 graphs identical (%zu triangles total)", ok, total_tris)};
}

// ---------------------------------------------------------------- 6
class OutOfBandNoise final : public fm::EdgeScorer {
 public:
  explicit OutOfBandNoise(fm::AdjacencyMatrix truth)
      : truth_(std::move(truth)), order_(fm::bfs_order(truth_)), band_(fm::bandwidth(order_.apply(truth_))) {}
  std::size_t vertex_count() const override { return truth_.size(); }
  double score(std::uint32_t i, std::uint32_t j) const override {
    const auto a = order_.to_new(i), b = order_.to_new(j);
    const std::size_t gap = a > b ? a - b : b - a;
    // Every pair beyond the band is a spurious positive.
    return truth_.contains(i, j) || gap > band_ ? 1.0 : -1.0;
  }

 private:
  fm::AdjacencyMatrix truth_;
  fm::Ordering order_;
  std::size_t band_;
};

Outcome oracle_fixed_point() {
  const auto corpus = fm::testing::corpus();
  std::size_t fixed = 0, cleaned = 0, eligible = 0;
  std::size_t spurious_total = 0;
  for (const auto& nm : corpus) {
    if (nm.mesh.vertices.size() > 2000) continue;
    ++eligible;
    const auto truth = fm::adjacency_of(nm.mesh);
    const fm::OracleScorer oracle(truth);
    const auto r = fm::filter_pipeline(oracle);
    fixed += r.adjacency == truth && r.step_adjacency.size() == 5 &&
             std::all_of(r.step_adjacency.begin(), r.step_adjacency.end(), [&](const auto& a) { return a == truth; });

    const OutOfBandNoise noisy(truth);
    const auto n = truth.size();
    spurious_total += n * (n - 1) / 2 - fm::bandwidth_mask(r.ordering.apply(truth)).allowed.size();
    const auto adv = fm::filter_pipeline(oracle, noisy);
    cleaned += adv.step_adjacency[1] == truth && adv.adjacency == truth;
  }
  return {eligible == 20 && fixed == eligible && cleaned == eligible,
          fmt("fixed point %zu/%zu meshes; adversarial cleaned by step 2 on %zu/%zu (%zu spurious pairs injected)",
              fixed, eligible, cleaned, eligible, spurious_total)};
}

// ---------------------------------------------------------------- 7
struct PooledScores {
  double recall, precision;
};

PooledScores pooled(const fm::ToyEdgeModel& model, const std::vector<fm::Mesh>& meshes) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& m : meshes) {
    const auto truth = fm::adjacency_of(m);
    const fm::ToyScorer s(model, m.vertices);
    const auto pred = fm::threshold(fm::score_pairs(s, m.vertices.size()), m.vertices.size());
    for (auto e : pred.edges()) (truth.contains(e.i, e.j) ? tp : fp) += 1;
    for (auto e : truth.edges()) fn += !pred.contains(e.i, e.j);
  }
  return {double(tp) / double(tp + fn), tp + fp ? double(tp) / double(tp + fp) : 1.0};
}

Outcome toy_training() {
  std::vector<fm::Mesh> meshes;
  for (const auto& nm : fm::testing::toy_suite()) meshes.push_back(nm.mesh);
  fm::ToyTrainConfig cfg;
  cfg.learning_rate = 2.0;
  cfg.epochs = 2000;
  cfg.seed = 1;
  cfg.gammas = {0.0, 3.0};
  const auto asym = fm::train_toy(meshes, cfg);
  cfg.gammas = {0.0, 0.0};
  const auto bce = fm::train_toy(meshes, cfg);
  const auto sa = pooled(asym.model, meshes);
  const auto sb = pooled(bce.model, meshes);
  return {sa.recall >= 0.95 && sa.precision >= 0.70 && sa.recall >= sb.recall,
          fmt("asymmetric recall %.4f precision %.4f; BCE recall %.4f precision %.4f", sa.recall, sa.precision,
              sb.recall, sb.precision)};
}

// ---------------------------------------------------------------- 8
Outcome fidelity_dominance() {
  std::size_t dominated = 0, positive = 0, off_center = 0, total = 0;
  double worst_gap = -1e9;
  for (const auto& nm : fm::testing::corpus()) {
    ++total;
    const fm::SnapOracleEnhancer snap(nm.mesh.vertices);
    const auto r = fm::fidelity_report(nm.mesh, snap);
    dominated += r.cd_enhanced <= r.cd_quantized;
    worst_gap = std::max(worst_gap, r.cd_enhanced - r.cd_quantized);
    const bool has_off_center = std::any_of(nm.mesh.vertices.begin(), nm.mesh.vertices.end(), [](const fm::Vec3& v) {
      return fm::enhance_cell_center(fm::quantize_point(v)) != v;
    });
    if (has_off_center) {
      ++off_center;
      positive += r.cd_quantized > 0;
    }
  }
  return {dominated == total && positive == off_center,
          fmt("cd_enhanced <= cd_quantized on %zu/%zu; cd_quantized > 0 on %zu/%zu off-center meshes", dominated,
              total, positive, off_center)};
}

// ---------------------------------------------------------------- 9
fm::PointSample pts(std::vector<fm::Vec3> p) {
  fm::PointSample s;
  s.count = p.size();
  s.face_of_point.assign(p.size(), 0);
  s.points = std::move(p);
  return s;
}

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(b), 1e-300); }

Outcome metrics_sanity() {
  std::size_t checks = 0, ok = 0;
  const auto check = [&](bool c) { ++checks, ok += c; };
  const auto corpus = fm::testing::corpus();
  for (std::size_t k = 0; k < corpus.size(); k += 3) {
    const auto& nm = corpus[k];
    const auto a = fm::sample_surface(nm.mesh, 2000, 1);
    const auto b = fm::sample_surface(nm.mesh, 2000, 2);
    check(fm::chamfer(a, a) == 0 && fm::hausdorff(a, a) == 0);
    check(fm::compare_meshes(nm.mesh, nm.mesh, {2000, 3, true}).cd == 0);
    check(close_rel(fm::chamfer(a, b), fm::chamfer(b, a)) && fm::hausdorff(a, b) == fm::hausdorff(b, a));
    const double hd = fm::hausdorff(a, b);
    check(hd >= 100 * fm::mean_nearest(a, b) && hd >= 100 * fm::mean_nearest(b, a));
  }
  // Two-point cases worked by hand.
  const auto o = pts({{0, 0, 0}});
  check(close_rel(fm::chamfer(o, pts({{0.1, 0, 0}})), 10.0));
  check(close_rel(fm::hausdorff(o, pts({{0.1, 0, 0}})), 10.0));
  const auto two = pts({{0, 0, 0}, {1, 0, 0}});
  check(close_rel(fm::hausdorff(two, o), 100.0));
  check(close_rel(fm::chamfer(two, o), 25.0));  // (mean{0,1} + 0) / 2 * 100
  const auto far = pts({{0, 0, 0}, {0, 3, 4}});
  check(close_rel(fm::chamfer(far, pts({{0, 3, 4}})), 125.0));  // (2.5 + 0) / 2 * 100
  check(close_rel(fm::hausdorff(far, pts({{0, 3, 4}})), 500.0));
  return {ok == checks, fmt("%zu/%zu checks", ok, checks)};
}

// ---------------------------------------------------------------- 10
Outcome dataset_filter() {
  const fs::path dir = fs::temp_directory_path() / "fastmesh_acceptance_c10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto put = [&](const std::string& name, const fm::Mesh& m) {
    fm::save_obj(m, dir / name);
    return dir / name;
  };
  const auto big = fm::testing::uv_sphere(94, 43);  // 93 * 43 + 2 = 4001 vertices
  const std::vector<fs::path> manifest{
      put("tetrahedron.obj", fm::testing::tetrahedron()),
      put("triangle.obj", fm::testing::single_triangle()),
      put("grid.obj", fm::testing::flat_grid(6, 6)),
      put("tetrahedron_scaled.obj", fm::normalize(fm::testing::tetrahedron())),
      put("big.obj", big),
  };
  const auto e = fm::filter_corpus(manifest);
  fs::remove_all(dir);
  const auto has = [&](std::size_t i, fm::RejectReason r) { return e[i].verdict && e[i].verdict->has(r); };
  const bool tet = e[0].verdict && e[0].verdict->accepted();
  const bool tri = has(1, fm::RejectReason::kNonManifold);
  const bool grid = has(2, fm::RejectReason::kCoplanar);
  const bool dup = has(3, fm::RejectReason::kDuplicate);
  const bool cap = big.vertices.size() == 4001 && has(4, fm::RejectReason::kTooManyVertices);
  return {tet && tri && grid && dup && cap,
          fmt("tetrahedron accepted=%d, triangle non_manifold=%d, grid coplanar=%d, duplicate=%d, 4001-vertex cap=%d",
              tet, tri, grid, dup, cap)};
}

// ---------------------------------------------------------------- 11
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "fastmesh_acceptance_c11";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fm::save_obj(fm::testing::corpus()[7].mesh, dir / "mesh.obj");
  std::vector<std::string> summaries;
  bool ran = true;
  for (const char* sub : {"a", "b"}) {
    std::ostringstream out, err;
    const int status = fm::cli::run({"pipeline", (dir / "mesh.obj").string(), "-o", (dir / sub).string(), "--scorer",
                                     "knn", "--enhancer", "snap_oracle", "--seed", "17"},
                                    out, err);
    ran = ran && status == 0;
    std::ifstream in(dir / sub / "mesh.summary.json", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    summaries.push_back(ss.str());
  }
  fs::remove_all(dir);
  const bool same = ran && !summaries[0].empty() && summaries[0] == summaries[1];
  return {same, fmt("two runs exit 0: %d; summary JSON byte-identical: %d (%zu bytes)", ran, same,
                    summaries[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "tokenizer roundtrip", 10, tokenizer_roundtrip},
      {2, "token-length law and compression ratio", 30, token_length_law},
      {3, "spacetime distance properties", 5, spacetime_properties},
      {4, "gradient oracle", 30, gradient_oracle},
      {5, "triangle extraction vs brute force", 10, triangle_oracle},
      {6, "oracle fixed point and adversarial masks", 60, oracle_fixed_point},
      {7, "toy edge training", 600, toy_training},
      {8, "fidelity dominance", 60, fidelity_dominance},
      {9, "metrics sanity", 5, metrics_sanity},
      {10, "dataset filter", 10, dataset_filter},
      {11, "pipeline determinism", 60, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %2d %s: %s; %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.time_limit_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
