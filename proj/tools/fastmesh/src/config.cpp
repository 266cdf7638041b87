#include "fastmesh_cli/config.hpp"

#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

namespace fastmesh::cli {

using nlohmann::json;

namespace {

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw UsageError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw UsageError("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw UsageError("");
    } else {
      if (!v.is_string()) throw UsageError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

void apply_config_json(PipelineConfig& c, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");

  const std::map<std::string, std::function<void(const json&, const std::string&)>> setters{
      {"input", [&](const json& v, const std::string& k) { c.input = get_as<std::string>(v, k); }},
      {"output_dir", [&](const json& v, const std::string& k) { c.output_dir = get_as<std::string>(v, k); }},
      {"quantization_bits", [&](const json& v, const std::string& k) { c.quantization_bits = get_as<int>(v, k); }},
      {"scorer", [&](const json& v, const std::string& k) { c.scorer = get_as<std::string>(v, k); }},
      {"enhancer", [&](const json& v, const std::string& k) { c.enhancer = get_as<std::string>(v, k); }},
      {"bandwidth_margin", [&](const json& v, const std::string& k) { c.bandwidth_margin = get_as<std::size_t>(v, k); }},
      {"candidate_margin", [&](const json& v, const std::string& k) { c.candidate_margin = get_as<std::size_t>(v, k); }},
      {"knn_k", [&](const json& v, const std::string& k) { c.knn_k = get_as<std::size_t>(v, k); }},
      {"temperature", [&](const json& v, const std::string& k) { c.temperature = get_as<double>(v, k); }},
      {"top_k", [&](const json& v, const std::string& k) { c.top_k = get_as<std::size_t>(v, k); }},
      {"top_p", [&](const json& v, const std::string& k) { c.top_p = get_as<double>(v, k); }},
      {"seed", [&](const json& v, const std::string& k) { c.seed = get_as<std::uint64_t>(v, k); }},
      {"metric_points", [&](const json& v, const std::string& k) { c.metric_points = get_as<std::size_t>(v, k); }},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw UsageError("unknown config key '" + key + "'");
    it->second(value, key);
  }
}

void validate(const PipelineConfig& c) {
  if (c.quantization_bits != 7) throw UsageError("quantization_bits is fixed at 7");
  const bool toy = c.scorer.rfind("toy:", 0) == 0 && c.scorer.size() > 4;
  if (c.scorer != "oracle" && c.scorer != "knn" && !toy) {
    throw UsageError("scorer must be oracle, knn or toy:<model file>");
  }
  if (c.enhancer != "cell_center" && c.enhancer != "snap_oracle") {
    throw UsageError("enhancer must be cell_center or snap_oracle");
  }
  if (!(c.temperature > 0) || !std::isfinite(c.temperature)) throw UsageError("temperature must be > 0");
  if (c.top_k == 0) throw UsageError("top_k must be >= 1");
  if (!(c.top_p > 0 && c.top_p <= 1)) throw UsageError("top_p must be in (0, 1]");
  if (c.knn_k == 0) throw UsageError("knn_k must be >= 1");
  if (c.metric_points == 0 || c.metric_points > 10'000'000) {
    throw UsageError("metric_points must be in [1, 10000000]");
  }
  if (c.bandwidth_margin > 1'000'000 || c.candidate_margin > 1'000'000) {
    throw UsageError("filter margins must be <= 1000000");
  }
}

}  // namespace fastmesh::cli
