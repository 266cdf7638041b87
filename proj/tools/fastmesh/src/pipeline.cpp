#include "fastmesh_cli/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fastmesh/error.hpp"
#include "fastmesh/face_builder.hpp"
#include "fastmesh/filtering.hpp"
#include "fastmesh/mesh_io.hpp"
#include "fastmesh/metrics.hpp"
#include "fastmesh/scorers.hpp"
#include "fastmesh/tokenizer.hpp"
#include "fastmesh/toy_edge_model.hpp"

namespace fastmesh::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double surface_area(const Mesh& m) {
  double a = 0;
  for (const auto& f : m.faces) a += face_area(m, f);
  return a;
}

}  // namespace

std::unique_ptr<EdgeScorer> make_scorer(const std::string& choice, std::span<const Vec3> vertices,
                                        const AdjacencyMatrix& truth, std::size_t knn_k) {
  if (choice == "oracle") {
    if (truth.size() != vertices.size()) fail(ErrorCode::kShapeMismatch, "oracle truth size mismatch");
    return std::make_unique<OracleScorer>(truth);
  }
  if (choice == "knn") return std::make_unique<KnnScorer>(std::vector<Vec3>(vertices.begin(), vertices.end()), knn_k);
  if (choice.rfind("toy:", 0) == 0) {
    return std::make_unique<ToyScorer>(parse_toy_model(read_text(choice.substr(4))), vertices);
  }
  throw UsageError("unknown scorer '" + choice + "'");
}

std::unique_ptr<FidelityEnhancer> make_enhancer(const std::string& name,
                                                std::span<const Vec3> originals) {
  if (name == "cell_center") return std::make_unique<CellCenterEnhancer>();
  if (name == "snap_oracle") return std::make_unique<SnapOracleEnhancer>(originals);
  throw UsageError("unknown enhancer '" + name + "'");
}

PipelineArtifacts run_pipeline(const PipelineConfig& config) {
  validate(config);
  PipelineArtifacts out;
  out.stem = config.input.stem().string();

  const Mesh input = stage("read", [&] { return read_obj(config.input); });
  const Mesh normalized = stage("normalize", [&] { return normalize(input); });
  const QuantizedMesh quantized = stage("quantize", [&] { return quantize(normalized); });
  const TokenSequence tokens = stage("tokenize", [&] { return tokenize(quantized.vertices); });
  const auto lattice = stage("detokenize", [&] {
    auto v = detokenize(tokens);
    if (v != quantized.vertices) throw std::logic_error("detokenize did not invert tokenize");
    return v;
  });
  const auto enhancer = make_enhancer(config.enhancer, normalized.vertices);
  const auto vertices = stage("enhance", [&] { return enhance_all(*enhancer, lattice); });

  Mesh quantized_mesh;
  quantized_mesh.vertices = vertices;
  quantized_mesh.faces = quantized.faces;
  const AdjacencyMatrix truth = adjacency_of(quantized_mesh);

  const auto scorer = stage("score", [&] { return make_scorer(config.scorer, vertices, truth, config.knn_k); });
  FilterOptions fopts;
  fopts.bandwidth_margin = config.bandwidth_margin;
  fopts.candidate_margin = config.candidate_margin;
  const FilterResult filtered = stage("filter", [&] { return filter_pipeline(*scorer, fopts); });
  const Mesh reconstructed =
      stage("extract_faces", [&] { return mesh_from_adjacency(filtered.adjacency, vertices); });

  const TokenStats tstats = stage("stats", [&] { return token_stats(normalized); });
  const FidelityReport fid = stage("fidelity", [&] {
    return fidelity_report(normalized, *enhancer, config.metric_points, config.seed);
  });
  const EdgeScores edges = adjacency_f1_recall(filtered.adjacency, truth);
  ordered_json shape = nullptr;
  if (surface_area(reconstructed) > 0 && surface_area(normalized) > 0) {
    const ShapeScores s = stage("metrics", [&] {
      return compare_meshes(reconstructed, normalized, {config.metric_points, config.seed, false});
    });
    shape = {{"cd", s.cd}, {"hd", s.hd}};
  }

  ordered_json steps = ordered_json::array();
  for (const auto& st : filtered.steps) {
    steps.push_back({{"step", st.step},
                     {"mask", st.mask},
                     {"candidates", st.candidates},
                     {"edges", st.edges},
                     {"faces", st.faces},
                     {"bandwidth", st.bandwidth}});
  }

  ordered_json summary;
  summary["schema_version"] = kSummarySchemaVersion;
  summary["input"] = config.input.generic_string();
  summary["config"] = {{"quantization_bits", config.quantization_bits},
                       {"scorer", config.scorer},
                       {"enhancer", config.enhancer},
                       {"bandwidth_margin", config.bandwidth_margin},
                       {"candidate_margin", config.candidate_margin},
                       {"knn_k", config.knn_k},
                       {"temperature", config.temperature},
                       {"top_k", config.top_k},
                       {"top_p", config.top_p},
                       {"seed", config.seed},
                       {"metric_points", config.metric_points}};
  summary["counts"] = {{"input_vertices", input.vertices.size()},
                       {"input_faces", input.faces.size()},
                       {"quantized_vertices", quantized.vertices.size()},
                       {"quantized_faces", quantized.faces.size()},
                       {"ground_truth_edges", truth.edge_count()},
                       {"predicted_edges", filtered.adjacency.edge_count()},
                       {"reconstructed_faces", reconstructed.faces.size()}};
  summary["token_stats"] = {{"n_vertices", tstats.n_vertices},
                            {"n_blocks", tstats.n_blocks},
                            {"n_tokens", tstats.n_tokens},
                            {"vanilla_estimate", tstats.vanilla_estimate},
                            {"bpt_estimate", tstats.bpt_estimate},
                            {"ratio_vs_bpt", tstats.ratio_vs_bpt}};
  summary["fidelity"] = {{"cd_quantized", fid.cd_quantized},
                         {"hd_quantized", fid.hd_quantized},
                         {"cd_enhanced", fid.cd_enhanced},
                         {"hd_enhanced", fid.hd_enhanced},
                         {"n_vertices_before", fid.n_vertices_before},
                         {"n_vertices_after", fid.n_vertices_after}};
  summary["edge_scores"] = {{"f1", edges.f1}, {"recall", edges.recall}, {"precision", edges.precision}};
  summary["shape_scores"] = shape;
  summary["filter_steps"] = steps;

  out.reconstructed_obj = write_obj(reconstructed);
  out.tokens = write_tokens(tokens);
  out.adjacency = write_adjacency(filtered.adjacency);
  out.filter_stats_json = steps.dump(2) + "\n";
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

void write_artifacts(const PipelineArtifacts& a, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  const std::vector<std::pair<std::string, const std::string*>> files{
      {a.stem + ".recon.obj", &a.reconstructed_obj},
      {a.stem + ".tokens.txt", &a.tokens},
      {a.stem + ".adjacency.txt", &a.adjacency},
      {a.stem + ".filter.json", &a.filter_stats_json},
      {a.stem + ".summary.json", &a.summary_json},
  };
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "stage write: cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> staged, placed;
  const auto cleanup = [&] {
    std::error_code ignore;
    for (const auto& p : staged) fs::remove(p, ignore);
    for (const auto& p : placed) fs::remove(p, ignore);
  };
  try {
    for (const auto& [name, content] : files) {
      const fs::path tmp = out_dir / (name + ".partial");
      staged.push_back(tmp);
      std::ofstream f(tmp, std::ios::binary);
      f << *content;
      f.close();
      if (!f) fail(ErrorCode::kIo, "stage write: cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      const fs::path dst = out_dir / files[i].first;
      fs::rename(staged[i], dst);
      placed.push_back(dst);
    }
  } catch (const fs::filesystem_error& e) {
    cleanup();
    fail(ErrorCode::kIo, std::string("stage write: ") + e.what());
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace fastmesh::cli
