#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>

#include "fastmesh/adjacency.hpp"
#include "fastmesh/edge_model.hpp"
#include "fastmesh/fidelity.hpp"
#include "fastmesh/mesh.hpp"
#include "fastmesh_cli/config.hpp"

namespace fastmesh::cli {

inline constexpr int kSummarySchemaVersion = 1;

/// Builds the scorer named by `choice` over `vertices`. `truth` backs the
/// oracle scorer and is ignored otherwise.
std::unique_ptr<EdgeScorer> make_scorer(const std::string& choice, std::span<const Vec3> vertices,
                                        const AdjacencyMatrix& truth, std::size_t knn_k);

/// `originals` feed the snap oracle; they must be in the normalized frame.
std::unique_ptr<FidelityEnhancer> make_enhancer(const std::string& name,
                                                std::span<const Vec3> originals);

struct PipelineArtifacts {
  std::string stem;
  std::string reconstructed_obj;
  std::string tokens;
  std::string adjacency;
  std::string filter_stats_json;
  std::string summary_json;
};

/// Runs every stage in memory. Failures are fastmesh::Error with the stage
/// name prefixed to the message.
PipelineArtifacts run_pipeline(const PipelineConfig& config);

/// Writes all artifacts or none: files are staged under temporary names and
/// renamed once every write succeeded.
void write_artifacts(const PipelineArtifacts& artifacts, const std::filesystem::path& out_dir);

}  // namespace fastmesh::cli
