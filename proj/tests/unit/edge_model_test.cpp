#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fastmesh/error.hpp"
#include "fastmesh/edge_model.hpp"
#include "fastmesh/face_builder.hpp"
#include "fastmesh/mesh_io.hpp"
#include "fastmesh/scorers.hpp"
#include "fastmesh/tokenizer.hpp"
#include "fastmesh/toy_edge_model.hpp"
#include "shapes.hpp"

namespace fastmesh {
namespace {

TEST(SpacetimeDistance, HandExamples) {
  const std::vector<double> o{0, 0, 0, 0};
  const std::vector<double> space{3, 4, 0, 0};
  const std::vector<double> time{0, 0, 3, 4};
  EXPECT_DOUBLE_EQ(spacetime_distance(o, space), 25.0);
  EXPECT_DOUBLE_EQ(spacetime_distance(o, time), -25.0);
  EXPECT_EQ(spacetime_distance(o, o), 0.0);
}

TEST(SpacetimeDistance, SymmetricBitForBit) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> u(8), v(8);
    for (auto& x : u) x = g(rng) * 1e3;
    for (auto& x : v) x = g(rng) * 1e-3;
    EXPECT_EQ(spacetime_distance(u, v), spacetime_distance(v, u));
  }
}

TEST(SpacetimeDistance, ShapeErrors) {
  const std::vector<double> a{1, 2, 3}, b{1, 2, 3}, c{1, 2};
  EXPECT_THROW(spacetime_distance(a, b), Error);
  EXPECT_THROW(spacetime_distance(c, a), Error);
}

TEST(EdgeFeature, PerHead) {
  const std::vector<double> u{0, 0, 0, 0, 0, 0, 0, 0};
  const std::vector<double> v{3, 4, 0, 0, 0, 0, 3, 4};
  EXPECT_EQ(edge_feature(u, v, 2), (std::vector<double>{25.0, -25.0}));
  EXPECT_THROW(edge_feature(u, v, 3), Error);
  EXPECT_THROW(edge_feature(u, v, 8), Error);
}

TEST(AsymmetricLoss, HandValues) {
  const AsymmetricGammas g{0.0, 3.0};
  EXPECT_NEAR(asymmetric_loss(0.5, EdgeLabel::kPositive, g), 0.693147, 1e-6);
  EXPECT_NEAR(asymmetric_loss(0.5, EdgeLabel::kNegative, g), 0.0866434, 1e-7);
  EXPECT_NEAR(asymmetric_loss(0.0, EdgeLabel::kPositive, g), -std::log(1e-7), 1e-9);
  EXPECT_NEAR(asymmetric_loss(1.0, EdgeLabel::kNegative, {0, 0}), -std::log(1e-7), 1e-6);
  EXPECT_THROW(asymmetric_loss(0.5, EdgeLabel::kNegative, {0.0, -1.0}), Error);
}

TEST(AsymmetricLoss, ZeroGammasIsBinaryCrossEntropy) {
  for (double p : {0.01, 0.3, 0.5, 0.9}) {
    EXPECT_NEAR(asymmetric_loss(p, EdgeLabel::kPositive, {0, 0}), -std::log(p), 1e-12);
    EXPECT_NEAR(asymmetric_loss(p, EdgeLabel::kNegative, {0, 0}), -std::log(1 - p), 1e-12);
  }
}

TEST(AsymmetricLoss, LogitFormAgreesAwayFromClamp) {
  for (double z = -12; z <= 12; z += 0.37) {
    for (auto label : {EdgeLabel::kPositive, EdgeLabel::kNegative}) {
      for (AsymmetricGammas g : {AsymmetricGammas{0, 3}, AsymmetricGammas{1, 2}, AsymmetricGammas{0, 0}}) {
        const double a = asymmetric_loss(sigmoid(z), label, g);
        const double b = asymmetric_loss_from_logit(z, label, g);
        EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST(AsymmetricLoss, GradientMatchesFiniteDifference) {
  const double h = 1e-5;
  for (double z = -9; z <= 9; z += 0.41) {
    for (auto label : {EdgeLabel::kPositive, EdgeLabel::kNegative}) {
      for (AsymmetricGammas g : {AsymmetricGammas{0, 3}, AsymmetricGammas{2, 1}, AsymmetricGammas{0, 0}}) {
        const double fd = (asymmetric_loss_from_logit(z + h, label, g) -
                           asymmetric_loss_from_logit(z - h, label, g)) / (2 * h);
        const double an = asymmetric_loss_grad(z, label, g);
        EXPECT_NEAR(an, fd, 1e-7 + 1e-6 * std::abs(fd)) << "z=" << z;
      }
    }
  }
}

TEST(AsymmetricLoss, NegativeFocusingDownweightsEasyNegatives) {
  const AsymmetricGammas asym{0, 3};
  const double easy = asymmetric_loss(0.05, EdgeLabel::kNegative, asym);
  const double bce = asymmetric_loss(0.05, EdgeLabel::kNegative, {0, 0});
  EXPECT_LT(easy, 1e-3 * bce);
}

TEST(CrossEntropy, UniformLogits) {
  const std::vector<double> full(kVocabSize, 0.0);
  EXPECT_NEAR(cross_entropy(full, 17), 8.4360, 1e-4);
  EXPECT_NEAR(cross_entropy(full, 17), std::log(4610.0), 1e-12);
  const std::vector<double> two{0.0, 0.0};
  EXPECT_NEAR(cross_entropy(two, 1), std::log(2.0), 1e-15);
  const std::vector<double> big{1000.0, 0.0};
  EXPECT_NEAR(cross_entropy(big, 0), 0.0, 1e-12);
  EXPECT_NEAR(cross_entropy(big, 1), 1000.0, 1e-9);
  EXPECT_THROW(cross_entropy(two, 2), Error);
}

TEST(L1Loss, Examples) {
  const std::vector<Vec3> v{{0, 0, 0}}, w{{0.5, 0.25, 0.25}};
  EXPECT_DOUBLE_EQ(l1_loss(v, w), 1.0);
  const std::vector<Vec3> v2{{0, 0, 0}, {1, 1, 1}}, w2{{0, 0, 1}, {1, 1, 1}};
  EXPECT_DOUBLE_EQ(l1_loss(v2, w2), 0.5);
  EXPECT_THROW(l1_loss(v, w2), Error);
}

TEST(ScorePairs, FullAndMasked) {
  const auto tet = testing::tetrahedron();
  const OracleScorer oracle(adjacency_of(tet));
  const auto all = score_pairs(oracle, 4);
  ASSERT_EQ(all.size(), 6u);
  for (const auto& e : all) EXPECT_EQ(e.logit, 1.0);
  const std::vector<VertexPair> mask{{0, 1}, {2, 3}};
  EXPECT_EQ(score_pairs(oracle, 4, std::span<const VertexPair>(mask)).size(), 2u);
  const std::vector<VertexPair> bad{{1, 1}};
  EXPECT_THROW(score_pairs(oracle, 4, std::span<const VertexPair>(bad)), Error);
}

TEST(KnnScorer, SymmetricAndPositiveForNearestNeighbour) {
  const auto m = testing::icosphere(2);
  const KnnScorer s(m.vertices);
  EXPECT_GT(s.tau(), 0.0);
  for (std::uint32_t i = 0; i < 20; ++i) {
    for (std::uint32_t j = i + 1; j < 40; ++j) EXPECT_EQ(s.score(i, j), s.score(j, i));
  }
}

class ToyModelTest : public ::testing::Test {
 protected:
  static ToyShape small_shape() { return {2, 4, 8, 5}; }
};

TEST_F(ToyModelTest, ParameterLayout) {
  ToyEdgeModel m;
  EXPECT_EQ(m.parameter_count(), 64u * 3 + 64 + 16 * 64 + 16 + 16 * 4 + 16 + 16 + 1);
  std::size_t offset = 0;
  for (const auto& b : m.blocks()) {
    EXPECT_EQ(b.offset, offset);
    offset += b.size;
  }
  EXPECT_EQ(offset, m.parameter_count());
  EXPECT_THROW(ToyEdgeModel(ToyShape{2, 3, 8, 5}), Error);
}

TEST_F(ToyModelTest, LogitIsSymmetric) {
  ToyEdgeModel m(small_shape());
  m.initialize(3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    const Vec3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    EXPECT_EQ(m.logit(a, b), m.logit(b, a));
  }
}

TEST_F(ToyModelTest, InitializationIsSeeded) {
  ToyEdgeModel a(small_shape()), b(small_shape()), c(small_shape());
  a.initialize(7);
  b.initialize(7);
  c.initialize(8);
  EXPECT_TRUE(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  EXPECT_FALSE(std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
}

// Every parameter of the fused loss gradient against central differences.
TEST_F(ToyModelTest, LossGradientMatchesFiniteDifferences) {
  ToyEdgeModel model(small_shape());
  model.initialize(12);
  // Nudge biases off zero so their gradients are exercised in general position.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (auto& p : model.parameters()) p += u(rng);

  std::mt19937_64 mrng(2);
  const std::vector<EdgeTrainingSample> samples{
      make_training_sample(normalize(testing::tetrahedron())),
      make_training_sample(testing::random_variant(testing::bipyramid(5), mrng, 0.2, 0.0))};
  for (const AsymmetricGammas g : {AsymmetricGammas{0, 3}, AsymmetricGammas{0, 0}}) {
    const auto lg = edge_loss_and_gradient(model, samples, g);
    ASSERT_EQ(lg.gradient.size(), model.parameter_count());
    const double h = 1e-4;
    for (std::size_t k = 0; k < model.parameter_count(); ++k) {
      ToyEdgeModel plus = model, minus = model;
      plus.parameters()[k] += h;
      minus.parameters()[k] -= h;
      const double fd = (edge_loss_and_gradient(plus, samples, g).loss -
                         edge_loss_and_gradient(minus, samples, g).loss) / (2 * h);
      EXPECT_NEAR(lg.gradient[k], fd, 1e-8 + 1e-5 * std::abs(fd)) << "parameter " << k;
    }
  }
}

TEST_F(ToyModelTest, LossIsMeanOverPairs) {
  ToyEdgeModel model(small_shape());
  model.initialize(1);
  const auto tet = normalize(testing::tetrahedron());
  const std::vector<EdgeTrainingSample> samples{make_training_sample(tet)};
  double sum = 0;
  for (std::uint32_t i = 0; i < 4; ++i) {
    for (std::uint32_t j = i + 1; j < 4; ++j) {
      sum += asymmetric_loss_from_logit(model.logit(tet.vertices[i], tet.vertices[j]),
                                        EdgeLabel::kPositive, {0, 3});
    }
  }
  EXPECT_NEAR(edge_loss_and_gradient(model, samples, {0, 3}).loss, sum / 6, 1e-12);
}

TEST_F(ToyModelTest, JsonRoundTripIsExact) {
  ToyEdgeModel m(small_shape());
  m.initialize(99);
  const auto back = parse_toy_model(write_toy_model(m));
  ASSERT_EQ(back.parameter_count(), m.parameter_count());
  EXPECT_TRUE(std::equal(m.parameters().begin(), m.parameters().end(), back.parameters().begin()));
  EXPECT_EQ(back.shape().heads, 2u);
  EXPECT_EQ(back.shape().head_hidden, 5u);
}

TEST_F(ToyModelTest, JsonErrors) {
  ToyEdgeModel m(small_shape());
  m.initialize(1);
  auto text = write_toy_model(m);
  EXPECT_THROW(parse_toy_model("{"), Error);
  EXPECT_THROW(parse_toy_model("[]"), Error);
  auto wrong_format = text;
  wrong_format.replace(wrong_format.find("fastmesh-toy-edge-model/1"), 25, "something-else/9999999999");
  EXPECT_THROW(parse_toy_model(wrong_format), Error);
  auto truncated = text;
  const auto pos = truncated.find("\"head.b2\"");
  ASSERT_NE(pos, std::string::npos);
  truncated.replace(pos, 9, "\"head.bX\"");
  EXPECT_THROW(parse_toy_model(truncated), Error);
}

TEST_F(ToyModelTest, TrainingReducesLossAndIsDeterministic) {
  const std::vector<Mesh> meshes{normalize(testing::icosphere(1)), normalize(testing::bipyramid(6))};
  ToyTrainConfig cfg;
  cfg.shape = small_shape();
  cfg.learning_rate = 0.5;
  cfg.epochs = 60;
  cfg.seed = 5;
  std::size_t calls = 0;
  const auto a = train_toy(meshes, cfg, [&](std::size_t, double) { ++calls; });
  const auto b = train_toy(meshes, cfg);
  EXPECT_EQ(calls, cfg.epochs);
  ASSERT_EQ(a.loss_curve.size(), cfg.epochs);
  EXPECT_LT(a.loss_curve.back(), a.loss_curve.front());
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  const auto csv = write_loss_curve(a.loss_curve);
  EXPECT_EQ(csv.rfind("epoch,loss\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(cfg.epochs + 1));
}

TEST_F(ToyModelTest, TrainingPreconditions) {
  ToyTrainConfig cfg;
  cfg.shape = small_shape();
  cfg.epochs = 3;
  try {
    train_toy({}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
  const std::vector<Mesh> big{normalize(testing::icosphere(3))};  // 642 vertices
  EXPECT_THROW(train_toy(big, cfg), Error);
  const std::vector<Mesh> ok{normalize(testing::tetrahedron())};
  cfg.learning_rate = std::numeric_limits<double>::quiet_NaN();
  try {
    train_toy(ok, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
  }
}

TEST_F(ToyModelTest, ToyScorerMatchesModel) {
  ToyEdgeModel m(small_shape());
  m.initialize(2);
  const auto mesh = normalize(testing::bipyramid(4));
  const ToyScorer s(m, mesh.vertices);
  EXPECT_EQ(s.vertex_count(), mesh.vertices.size());
  EXPECT_DOUBLE_EQ(s.score(1, 4), m.logit(mesh.vertices[1], mesh.vertices[4]));
}

}  // namespace
}  // namespace fastmesh
