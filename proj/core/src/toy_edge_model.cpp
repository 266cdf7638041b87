#include "fastmesh/toy_edge_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include <json.hpp>

#include "fastmesh/error.hpp"
#include "fastmesh/face_builder.hpp"
#include "fastmesh/sampling.hpp"

namespace fastmesh {

namespace {

constexpr const char* kModelFormat = "fastmesh-toy-edge-model/1";

Vec3 model_input(const Vec3& p) { return {2.0 * p[0] - 1.0, 2.0 * p[1] - 1.0, 2.0 * p[2] - 1.0}; }

}  // namespace

ToyEdgeModel::ToyEdgeModel(ToyShape shape) : shape_(shape) {
  if (shape_.heads == 0 || shape_.dims < 2 || shape_.dims % 2 != 0 || shape_.hidden == 0 ||
      shape_.head_hidden == 0) {
    fail(ErrorCode::kPrecondition, "toy model needs heads >= 1, even dims >= 2 and non-zero widths");
  }
  const std::size_t e = embedding_size();
  const std::pair<const char*, std::size_t> layout[] = {
      {"embed.w1", shape_.hidden * 3},          {"embed.b1", shape_.hidden},
      {"embed.w2", e * shape_.hidden},          {"embed.b2", e},
      {"head.w1", shape_.head_hidden * shape_.heads}, {"head.b1", shape_.head_hidden},
      {"head.w2", shape_.head_hidden},          {"head.b2", 1},
  };
  std::size_t offset = 0;
  for (const auto& [name, size] : layout) {
    blocks_.push_back({name, offset, size});
    offset += size;
  }
  params_.assign(offset, 0.0);
  w1_ = blocks_[0].offset; b1_ = blocks_[1].offset;
  w2_ = blocks_[2].offset; b2_ = blocks_[3].offset;
  hw1_ = blocks_[4].offset; hb1_ = blocks_[5].offset;
  hw2_ = blocks_[6].offset; hb2_ = blocks_[7].offset;
}

void ToyEdgeModel::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill = [&](std::size_t offset, std::size_t fan_out, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < fan_out * fan_in; ++k) {
      params_[offset + k] = (2.0 * uniform_unit(rng) - 1.0) * limit;
    }
  };
  std::fill(params_.begin(), params_.end(), 0.0);
  fill(w1_, shape_.hidden, 3);
  fill(w2_, embedding_size(), shape_.hidden);
  fill(hw1_, shape_.head_hidden, shape_.heads);
  fill(hw2_, 1, shape_.head_hidden);
}

std::vector<double> ToyEdgeModel::embed(const Vec3& p) const {
  const Vec3 x = model_input(p);
  const std::size_t hid = shape_.hidden, e = embedding_size();
  std::vector<double> h(hid);
  for (std::size_t r = 0; r < hid; ++r) {
    const double* w = &params_[w1_ + r * 3];
    h[r] = std::tanh(w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + params_[b1_ + r]);
  }
  std::vector<double> out(e);
  for (std::size_t r = 0; r < e; ++r) {
    const double* w = &params_[w2_ + r * hid];
    double acc = params_[b2_ + r];
    for (std::size_t c = 0; c < hid; ++c) acc += w[c] * h[c];
    out[r] = acc;
  }
  return out;
}

double ToyEdgeModel::head(std::span<const double> feature) const {
  const std::size_t H = shape_.heads, hh = shape_.head_hidden;
  if (feature.size() != H) fail(ErrorCode::kShapeMismatch, "head: feature size != heads");
  double logit = params_[hb2_];
  for (std::size_t r = 0; r < hh; ++r) {
    double acc = params_[hb1_ + r];
    for (std::size_t c = 0; c < H; ++c) acc += params_[hw1_ + r * H + c] * feature[c];
    logit += params_[hw2_ + r] * std::tanh(acc);
  }
  return logit;
}

double ToyEdgeModel::logit(const Vec3& a, const Vec3& b) const {
  const auto ea = embed(a), eb = embed(b);
  return head(edge_feature(ea, eb, shape_.heads));
}

std::vector<double> ToyEdgeModel::head_backward(std::span<const double> feature, double upstream,
                                                std::span<double> grad) const {
  const std::size_t H = shape_.heads, hh = shape_.head_hidden;
  if (feature.size() != H || grad.size() != params_.size()) {
    fail(ErrorCode::kShapeMismatch, "head_backward: bad feature or gradient size");
  }
  std::vector<double> d_feature(H, 0.0);
  grad[hb2_] += upstream;
  for (std::size_t r = 0; r < hh; ++r) {
    double acc = params_[hb1_ + r];
    for (std::size_t c = 0; c < H; ++c) acc += params_[hw1_ + r * H + c] * feature[c];
    const double t = std::tanh(acc);
    grad[hw2_ + r] += upstream * t;
    const double da = upstream * params_[hw2_ + r] * (1.0 - t * t);
    grad[hb1_ + r] += da;
    for (std::size_t c = 0; c < H; ++c) {
      grad[hw1_ + r * H + c] += da * feature[c];
      d_feature[c] += da * params_[hw1_ + r * H + c];
    }
  }
  return d_feature;
}

void ToyEdgeModel::embed_backward(const Vec3& p, std::span<const double> upstream,
                                  std::span<double> grad) const {
  const std::size_t hid = shape_.hidden, e = embedding_size();
  if (upstream.size() != e || grad.size() != params_.size()) {
    fail(ErrorCode::kShapeMismatch, "embed_backward: bad upstream or gradient size");
  }
  const Vec3 x = model_input(p);
  std::vector<double> h(hid), dh(hid, 0.0);
  for (std::size_t r = 0; r < hid; ++r) {
    const double* w = &params_[w1_ + r * 3];
    h[r] = std::tanh(w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + params_[b1_ + r]);
  }
  for (std::size_t r = 0; r < e; ++r) {
    const double up = upstream[r];
    if (up == 0.0) continue;
    grad[b2_ + r] += up;
    for (std::size_t c = 0; c < hid; ++c) {
      grad[w2_ + r * hid + c] += up * h[c];
      dh[c] += up * params_[w2_ + r * hid + c];
    }
  }
  for (std::size_t r = 0; r < hid; ++r) {
    const double da = dh[r] * (1.0 - h[r] * h[r]);
    grad[b1_ + r] += da;
    for (int a = 0; a < 3; ++a) grad[w1_ + r * 3 + a] += da * x[a];
  }
}

EdgeTrainingSample make_training_sample(const Mesh& normalized_mesh) {
  return {normalized_mesh.vertices, adjacency_of(normalized_mesh)};
}

LossAndGradient edge_loss_and_gradient(const ToyEdgeModel& model,
                                       std::span<const EdgeTrainingSample> samples,
                                       const AsymmetricGammas& gammas) {
  const auto& shape = model.shape();
  const std::size_t H = shape.heads, D = shape.dims, half = D / 2, E = model.embedding_size();

  std::size_t total_pairs = 0;
  for (const auto& s : samples) total_pairs += s.vertices.size() * (s.vertices.size() - (s.vertices.empty() ? 0 : 1)) / 2;

  LossAndGradient out;
  out.gradient.assign(model.parameter_count(), 0.0);
  if (total_pairs == 0) return out;
  const double inv_pairs = 1.0 / static_cast<double>(total_pairs);

  const auto& blocks = model.blocks();
  const auto params = model.parameters();
  const std::size_t HH = shape.head_hidden;
  const double* hw1 = params.data() + blocks[4].offset;
  const double* hb1 = params.data() + blocks[5].offset;
  const double* hw2 = params.data() + blocks[6].offset;
  const double hb2 = params[blocks[7].offset];
  double* g_hw1 = out.gradient.data() + blocks[4].offset;
  double* g_hb1 = out.gradient.data() + blocks[5].offset;
  double* g_hw2 = out.gradient.data() + blocks[6].offset;
  double& g_hb2 = out.gradient[blocks[7].offset];

  std::vector<double> feature(H), d_feature(H), hidden(HH);
  for (const auto& sample : samples) {
    const std::size_t n = sample.vertices.size();
    std::vector<double> emb(n * E), d_emb(n * E, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto e = model.embed(sample.vertices[i]);
      std::copy(e.begin(), e.end(), emb.begin() + static_cast<std::ptrdiff_t>(i * E));
    }

    const auto edges = sample.edges.edges();
    std::size_t next_edge = 0;  // edges are sorted like the (i, j) loop below
    for (std::uint32_t i = 0; i < n; ++i) {
      const double* u = &emb[i * E];
      double* du = &d_emb[i * E];
      for (std::uint32_t j = i + 1; j < n; ++j) {
        bool positive = false;
        if (next_edge < edges.size() && edges[next_edge].i == i && edges[next_edge].j == j) {
          positive = true;
          ++next_edge;
        }
        const double* v = &emb[j * E];
        double* dv = &d_emb[j * E];
        for (std::size_t h = 0; h < H; ++h) {
          double space = 0.0, time = 0.0;
          for (std::size_t k = 0; k < half; ++k) {
            const double d = u[h * D + k] - v[h * D + k];
            space += d * d;
          }
          for (std::size_t k = half; k < D; ++k) {
            const double d = u[h * D + k] - v[h * D + k];
            time += d * d;
          }
          feature[h] = space - time;
        }
        // Logit head forward (same arithmetic as ToyEdgeModel::head).
        double z = hb2;
        for (std::size_t r = 0; r < HH; ++r) {
          double acc = hb1[r];
          for (std::size_t c = 0; c < H; ++c) acc += hw1[r * H + c] * feature[c];
          hidden[r] = std::tanh(acc);
          z += hw2[r] * hidden[r];
        }
        const EdgeLabel label = positive ? EdgeLabel::kPositive : EdgeLabel::kNegative;
        out.loss += asymmetric_loss_from_logit(z, label, gammas) * inv_pairs;
        const double dz = asymmetric_loss_grad(z, label, gammas) * inv_pairs;

        // Head backward.
        g_hb2 += dz;
        std::fill(d_feature.begin(), d_feature.end(), 0.0);
        for (std::size_t r = 0; r < HH; ++r) {
          g_hw2[r] += dz * hidden[r];
          const double da = dz * hw2[r] * (1.0 - hidden[r] * hidden[r]);
          g_hb1[r] += da;
          for (std::size_t c = 0; c < H; ++c) {
            g_hw1[r * H + c] += da * feature[c];
            d_feature[c] += da * hw1[r * H + c];
          }
        }
        // Spacetime distance backward.
        for (std::size_t h = 0; h < H; ++h) {
          for (std::size_t k = 0; k < D; ++k) {
            const double sign = k < half ? 2.0 : -2.0;
            const double g = sign * (u[h * D + k] - v[h * D + k]) * d_feature[h];
            du[h * D + k] += g;
            dv[h * D + k] -= g;
          }
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      model.embed_backward(sample.vertices[i], std::span<const double>(&d_emb[i * E], E), out.gradient);
    }
  }
  return out;
}

ToyTrainResult train_toy(std::span<const Mesh> normalized_meshes, const ToyTrainConfig& config,
                         const std::function<void(std::size_t, double)>& on_epoch) {
  if (normalized_meshes.empty()) fail(ErrorCode::kPrecondition, "train_toy: empty training set");
  std::vector<EdgeTrainingSample> samples;
  samples.reserve(normalized_meshes.size());
  for (const auto& m : normalized_meshes) {
    if (m.vertices.size() > kToyMaxVertices) {
      fail(ErrorCode::kPrecondition, "train_toy: mesh with " + std::to_string(m.vertices.size()) +
                                         " vertices exceeds the toy limit of " +
                                         std::to_string(kToyMaxVertices));
    }
    validate(m);
    samples.push_back(make_training_sample(m));
  }

  ToyTrainResult result{ToyEdgeModel(config.shape), {}};
  result.model.initialize(config.seed);
  result.loss_curve.reserve(config.epochs);
  auto params = result.model.parameters();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto step = edge_loss_and_gradient(result.model, samples, config.gammas);
    if (!std::isfinite(step.loss)) {
      fail(ErrorCode::kDivergence, "train_toy: non-finite loss at epoch " + std::to_string(epoch));
    }
    result.loss_curve.push_back(step.loss);
    if (on_epoch) on_epoch(epoch, step.loss);
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= config.learning_rate * step.gradient[k];
  }
  return result;
}

std::string write_toy_model(const ToyEdgeModel& model) {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["heads"] = model.shape().heads;
  j["dims"] = model.shape().dims;
  j["hidden"] = model.shape().hidden;
  j["head_hidden"] = model.shape().head_hidden;
  j["parameter_count"] = model.parameter_count();
  auto& params = j["params"];
  params = nlohmann::ordered_json::object();
  const auto values = model.parameters();
  for (const auto& b : model.blocks()) {
    params[b.name] = std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(b.offset),
                                         values.begin() + static_cast<std::ptrdiff_t>(b.offset + b.size));
  }
  return j.dump(1) + "\n";
}

ToyEdgeModel parse_toy_model(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedInput, std::string("toy model JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      fail(ErrorCode::kMalformedInput, "toy model JSON: unsupported format tag");
    }
    ToyShape shape{j.at("heads").get<std::size_t>(), j.at("dims").get<std::size_t>(),
                   j.at("hidden").get<std::size_t>(), j.at("head_hidden").get<std::size_t>()};
    ToyEdgeModel model(shape);
    auto values = model.parameters();
    const auto& params = j.at("params");
    if (params.size() != model.blocks().size()) {
      fail(ErrorCode::kMalformedInput, "toy model JSON: unexpected parameter blocks");
    }
    for (const auto& b : model.blocks()) {
      const auto arr = params.at(b.name).get<std::vector<double>>();
      if (arr.size() != b.size) {
        fail(ErrorCode::kMalformedInput, "toy model JSON: block " + b.name + " has wrong length");
      }
      std::copy(arr.begin(), arr.end(), values.begin() + static_cast<std::ptrdiff_t>(b.offset));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedInput, std::string("toy model JSON: ") + e.what());
  }
}

std::string write_loss_curve(std::span<const double> curve) {
  std::string out = "epoch,loss\n";
  char buf[64];
  for (std::size_t e = 0; e < curve.size(); ++e) {
    const auto res = std::to_chars(buf, buf + sizeof buf, curve[e]);
    out += std::to_string(e) + ',';
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

}  // namespace fastmesh
