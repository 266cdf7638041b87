#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fastmesh::cli {

/// Bad flags, config keys or values; maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  int quantization_bits = 7;
  std::string scorer = "oracle";  // oracle | knn | toy:<model file>
  std::string enhancer = "snap_oracle";  // cell_center | snap_oracle
  std::size_t bandwidth_margin = 0;
  std::size_t candidate_margin = 0;
  std::size_t knn_k = 6;
  double temperature = 1.2;
  std::size_t top_k = 100;
  double top_p = 0.9;
  std::uint64_t seed = 0;
  std::size_t metric_points = 5000;
};

/// Overlays the keys of a JSON object onto `config`. Unknown keys, wrong
/// types and out-of-range values throw UsageError.
void apply_config_json(PipelineConfig& config, std::string_view json_text);

/// Range checks shared by the file and flag paths.
void validate(const PipelineConfig& config);

}  // namespace fastmesh::cli
