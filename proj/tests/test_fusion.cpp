#include <gtest/gtest.h>

#include <algorithm>

#include "jumpvel/fusion/model.hpp"
#include "support.hpp"

using namespace jumpvel;
using namespace jumpvel::fusion;
using test::random_tensor;

namespace {

FusionModel<double> seeded_model(ViewSelection views, std::uint64_t seed) {
  FusionConfig cfg;
  cfg.views = views;
  FusionModel<double> m(cfg);
  Rng rng(seed);
  m.init(rng);
  return m;
}

Tensor<double> frames_of(const Tensor<double>& clip, const std::vector<std::size_t>& order) {
  const std::size_t per = clip.size() / clip.dim(0);
  Tensor<double> out({order.size(), clip.dim(1), clip.dim(2), clip.dim(3)});
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::copy(clip.data() + order[i] * per, clip.data() + (order[i] + 1) * per, out.data() + i * per);
  }
  return out;
}

}  // namespace

TEST(Fusion, SingleFrameClipEqualsBackbone) {
  auto m = seeded_model(ViewSelection::center, 1);
  std::mt19937_64 rng(2);
  const auto clip = random_tensor({1, 32, 32, 1}, rng, 0.0, 1.0);
  const auto feature = m.clip_feature(clip);
  const auto direct = m.backbone.forward(clip.reshaped({32, 32, 1}));
  ASSERT_EQ(feature.size(), direct.size());
  for (std::size_t i = 0; i < feature.size(); ++i) EXPECT_NEAR(feature[i], direct[i], 1e-12);
}

TEST(Fusion, TemporalMeanIgnoresOrderAndDuplication) {
  auto m = seeded_model(ViewSelection::center, 3);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    const auto clip = random_tensor({4, 32, 32, 1}, rng, 0.0, 1.0);
    const auto base = m.clip_feature(clip);
    const auto shuffled = m.clip_feature(frames_of(clip, {2, 0, 3, 1}));
    const auto doubled = m.clip_feature(frames_of(clip, {0, 1, 2, 3, 0, 1, 2, 3}));
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(base[i], shuffled[i], 1e-6);
      EXPECT_NEAR(base[i], doubled[i], 1e-6);
    }
  }
}

TEST(Fusion, ZeroFinalHeadPredictsBias) {
  auto m = seeded_model(ViewSelection::combined, 5);
  m.final_head.weight.value.fill(0.0);
  m.final_head.bias.value[0] = 0.437;
  std::mt19937_64 rng(6);
  std::vector<Tensor<double>> clips;
  for (int v = 0; v < 3; ++v) clips.push_back(random_tensor({2, 32, 32, 1}, rng, 0.0, 1.0));
  EXPECT_DOUBLE_EQ(m.predict(clips), 0.437);
}

TEST(Fusion, ViewOrderMatters) {
  auto m = seeded_model(ViewSelection::combined, 7);
  std::mt19937_64 rng(8);
  std::vector<Tensor<double>> clips;
  for (int v = 0; v < 3; ++v) clips.push_back(random_tensor({2, 32, 32, 1}, rng, 0.0, 1.0));
  const double a = m.predict(clips);
  std::swap(clips[0], clips[2]);
  EXPECT_NE(a, m.predict(clips));
}

TEST(Fusion, MissingViewAndWrongClipCount) {
  auto m = seeded_model(ViewSelection::combined, 9);
  VideoSample s;
  std::mt19937_64 rng(10);
  s.views[View::left] = random_tensor<float>({2, 32, 32, 1}, rng, 0.0, 1.0);
  s.views[View::center] = random_tensor<float>({2, 32, 32, 1}, rng, 0.0, 1.0);
  try {
    m.predict(s);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("right"), std::string::npos);
  }
  EXPECT_THROW(m.predict(std::vector<Tensor<double>>(2, Tensor<double>({1, 32, 32, 1}))), InputError);
}

TEST(Fusion, SingleViewUsesOnlyThatView) {
  auto m = seeded_model(ViewSelection::right, 11);
  EXPECT_EQ(m.views(), (std::vector<View>{View::right}));
  EXPECT_EQ(m.final_head.in_features(), m.config().view_dim);
  VideoSample s;
  std::mt19937_64 rng(12);
  s.views[View::right] = random_tensor<float>({2, 32, 32, 1}, rng, 0.0, 1.0);
  EXPECT_TRUE(std::isfinite(m.predict(s)));
}

TEST(Fusion, SaveLoadPreservesPredictions) {
  test::TempDir dir("fusion");
  auto m = seeded_model(ViewSelection::combined, 13);
  m.final_head.bias.value[0] = 0.5;
  m.save(dir.path() / "model.ckpt");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "model.ckpt.json"));
  auto back = FusionModel<double>::load(dir.path() / "model.ckpt");
  EXPECT_EQ(back.config().views, ViewSelection::combined);
  std::mt19937_64 rng(14);
  std::vector<Tensor<double>> clips;
  for (int v = 0; v < 3; ++v) clips.push_back(random_tensor({2, 32, 32, 1}, rng, 0.0, 1.0));
  EXPECT_EQ(m.predict(clips), back.predict(clips));
}

TEST(Fusion, LoadMissingSidecarIsIoError) {
  test::TempDir dir("fusion_missing");
  EXPECT_THROW(FusionModel<double>::load(dir.path() / "none.ckpt"), IoError);
}

TEST(Fusion, BackwardReturnsClipGradients) {
  auto m = seeded_model(ViewSelection::combined, 15);
  std::mt19937_64 rng(16);
  std::vector<Tensor<double>> clips;
  for (int v = 0; v < 3; ++v) clips.push_back(random_tensor({2, 32, 32, 1}, rng, 0.0, 1.0));
  PredictCache<double> cache;
  m.predict(clips, &cache);
  const auto grads = m.predict_backward(cache, 1.0);
  ASSERT_EQ(grads.size(), 3u);
  for (std::size_t v = 0; v < 3; ++v) EXPECT_EQ(grads[v].shape(), clips[v].shape());
}

TEST(Fusion, InvalidConfig) {
  FusionConfig cfg;
  cfg.view_dim = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = FusionConfig{};
  cfg.swin.heads = 3;
  EXPECT_THROW(FusionModel<double>{cfg}, ConfigError);
}
