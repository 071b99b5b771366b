#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "jumpvel/numerics/adam.hpp"
#include "jumpvel/numerics/grad_check.hpp"
#include "jumpvel/numerics/layers.hpp"
#include "jumpvel/numerics/vten.hpp"
#include "support.hpp"

using namespace jumpvel;
using test::random_tensor;

TEST(Tensor, RejectsDataOfWrongLength) {
  EXPECT_THROW(Tensor<float>({2, 3}, std::vector<float>(5)), DimensionError);
  Tensor<float> t({2, 3});
  EXPECT_THROW(t.reshape({4, 2}), DimensionError);
  EXPECT_NO_THROW(t.reshape({3, 2}));
}

TEST(Linear, ZeroInputGivesBiasRows) {
  std::mt19937_64 rng(1);
  const auto w = random_tensor({3, 2}, rng);
  const Tensor<double> b({2}, {0.5, -1.5});
  const auto out = linear(Tensor<double>({4, 3}), w, b);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(out(r, 0), 0.5);
    EXPECT_EQ(out(r, 1), -1.5);
  }
}

TEST(Linear, IdentityWeightReturnsInput) {
  std::mt19937_64 rng(2);
  const auto x = random_tensor({5, 4}, rng);
  Tensor<double> eye({4, 4});
  for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1.0;
  EXPECT_EQ(linear(x, eye, Tensor<double>({4})), x);
}

TEST(Linear, ShapeMismatchNamesBothShapes) {
  try {
    linear(Tensor<double>({2, 3}), Tensor<double>({4, 2}), Tensor<double>({2}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[4x2]"), std::string::npos) << msg;
  }
}

TEST(Linear, WeightGradientOfSumIsColumnBroadcastOfInputSums) {
  std::mt19937_64 rng(3);
  const auto x = random_tensor({6, 3}, rng);
  const auto w = random_tensor({3, 2}, rng);
  Tensor<double> dw({3, 2}), db({2});
  linear_backward(x, w, Tensor<double>({6, 2}, 1.0), dw, db);
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (std::size_t r = 0; r < 6; ++r) sum += x(r, i);
    EXPECT_NEAR(dw(i, 0), sum, 1e-12);
    EXPECT_NEAR(dw(i, 1), sum, 1e-12);
  }
  EXPECT_EQ(db[0], 6.0);
}

TEST(LayerNorm, ConstantVectorMapsToBeta) {
  const auto out = layer_norm(Tensor<double>({1, 3}, 1.0), Tensor<double>({3}, 1.0), Tensor<double>({3}), 1e-5);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(LayerNorm, HandExample) {
  const auto out = layer_norm(Tensor<double>({1, 3}, {1, 2, 3}), Tensor<double>({3}, 1.0), Tensor<double>({3}), 0.0);
  const double z = 1.0 / std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(out[0], -z, 1e-12);
  EXPECT_NEAR(out[1], 0.0, 1e-12);
  EXPECT_NEAR(out[2], z, 1e-12);
  EXPECT_NEAR(z, 1.2247, 1e-4);
}

TEST(LayerNorm, PreAffineMomentsProperty) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 2 + rng() % 30;
    const auto x = random_tensor({3, c}, rng, -5.0, 5.0);
    LayerNormCache<double> cache;
    layer_norm(x, Tensor<double>({c}, 1.0), Tensor<double>({c}), 0.0, &cache);
    for (std::size_t r = 0; r < 3; ++r) {
      double mean = 0.0, var = 0.0;
      for (std::size_t k = 0; k < c; ++k) mean += cache.normalized(r, k);
      mean /= static_cast<double>(c);
      for (std::size_t k = 0; k < c; ++k) var += std::pow(cache.normalized(r, k) - mean, 2);
      var /= static_cast<double>(c);
      EXPECT_LT(std::abs(mean), 1e-6);
      EXPECT_LT(std::abs(var - 1.0), 1e-5);
    }
  }
}

TEST(LayerNorm, ChannelMismatchThrows) {
  EXPECT_THROW(layer_norm(Tensor<double>({2, 3}), Tensor<double>({4}, 1.0), Tensor<double>({4}), 1e-5),
               DimensionError);
}

TEST(Softmax, Examples) {
  const auto u = softmax(Tensor<double>({3}, 7.0));
  for (double v : u.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  const auto p = softmax(Tensor<double>({2}, {0.0, std::log(2.0)}));
  EXPECT_NEAR(p[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 2.0 / 3.0, 1e-15);
}

TEST(Softmax, RowsSumToOneAndShiftInvariant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    const auto x = random_tensor({4, k}, rng, -20.0, 20.0);
    const auto y = softmax(x);
    Tensor<double> shifted = x;
    const double c = std::uniform_real_distribution<double>(-50, 50)(rng);
    for (auto& v : shifted.values()) v += c;
    const auto ys = softmax(shifted);
    for (std::size_t r = 0; r < 4; ++r) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        EXPECT_GE(y(r, j), 0.0);
        sum += y(r, j);
        EXPECT_NEAR(y(r, j), ys(r, j), 1e-7);
      }
      EXPECT_NEAR(sum, 1.0, 1e-6);
    }
  }
}

TEST(Gelu, MatchesTanhFormAndLimits) {
  EXPECT_EQ(gelu(0.0), 0.0);
  EXPECT_NEAR(gelu(10.0), 10.0, 1e-4);
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double ref = 0.5 * x * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (x + 0.044715 * x * x * x)));
    EXPECT_NEAR(gelu(x), ref, 1e-12) << x;
  }
  double prev = gelu(0.0);
  for (double x = 0.01; x < 8.0; x += 0.01) {
    EXPECT_GE(gelu(x), prev);
    prev = gelu(x);
  }
}

TEST(Gelu, GradientMatchesFiniteDifferences) {
  GradCheckFragment f{"gelu", [](const Tensor<double>& x) { return activate(x, Activation::gelu); }, nullptr, {}};
  auto input = std::make_shared<Tensor<double>>();
  f.forward = [input](const Tensor<double>& x) {
    *input = x;
    return activate(x, Activation::gelu);
  };
  f.backward = [input](const Tensor<double>& dy) { return activate_backward(*input, dy, Activation::gelu); };
  std::mt19937_64 rng(6);
  const auto report = grad_check(f, random_tensor({40}, rng, -4.0, 4.0), 1e-5);
  EXPECT_TRUE(report.passed) << report.max_rel_error;
}

TEST(L1Loss, ExamplesAndSubgradient) {
  const auto same = l1_loss(Tensor<double>({3}, {1, 2, 3}), Tensor<double>({3}, {1, 2, 3}));
  EXPECT_EQ(same.loss, 0.0);
  for (double g : same.grad.values()) EXPECT_EQ(g, 0.0);
  const auto r = l1_loss(Tensor<double>({2}, {0, 1}), Tensor<double>({2}, {1, 3}));
  EXPECT_DOUBLE_EQ(r.loss, 1.5);
  EXPECT_THROW(l1_loss(Tensor<double>({2}), Tensor<double>({3})), DimensionError);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    auto pred = random_tensor({n}, rng);
    const auto target = random_tensor({n}, rng);
    pred[0] = target[0];  // force a tie
    const auto out = l1_loss(pred, target);
    EXPECT_GT(out.loss, 0.0 - 1e-15);
    const double inv = 1.0 / static_cast<double>(n);
    EXPECT_EQ(out.grad[0], 0.0);
    for (double g : out.grad.values()) EXPECT_TRUE(g == 0.0 || g == inv || g == -inv);
    // joint permutation leaves the loss unchanged
    Tensor<double> rp(pred.shape()), rt(target.shape());
    for (std::size_t i = 0; i < n; ++i) {
      rp[i] = pred[n - 1 - i];
      rt[i] = target[n - 1 - i];
    }
    EXPECT_NEAR(l1_loss(rp, rt).loss, out.loss, 1e-15);
  }
}

TEST(Adam, ZeroGradientIsNoOp) {
  Parameter<double> p("p", Tensor<double>({3}, {1, -2, 3}));
  AdamState<double> s(p.value.shape(), AdamConfig{});
  const auto before = p.value;
  for (int i = 0; i < 5; ++i) adam_step(p, s);
  EXPECT_EQ(p.value, before);
  EXPECT_EQ(s.step, 5u);
}

TEST(Adam, FirstStepClosedForm) {
  AdamConfig cfg;
  cfg.lr = 0.1;
  cfg.eps_hat = 0.0;
  Parameter<double> p("p", Tensor<double>({1}, {0.0}));
  AdamState<double> s(p.value.shape(), cfg);
  p.grad[0] = 2.0;
  adam_step(p, s);
  EXPECT_NEAR(p.value[0], -0.1, 1e-15);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    AdamConfig c;
    c.lr = std::uniform_real_distribution<double>(1e-4, 1.0)(rng);
    Parameter<double> q("q", Tensor<double>({1}, {0.0}));
    AdamState<double> st(q.value.shape(), c);
    q.grad[0] = std::uniform_real_distribution<double>(-100, 100)(rng);
    adam_step(q, st);
    EXPECT_LE(std::abs(q.value[0]), c.lr * (1.0 + 1e-12));
  }
}

TEST(Adam, RejectsInvalidBetas) {
  AdamConfig cfg;
  cfg.beta1 = 1.0;
  EXPECT_THROW(AdamState<double>({1}, cfg), ConfigError);
}

TEST(GradCheck, IdentityFragmentHasZeroInputError) {
  GradCheckFragment f{"identity", [](const Tensor<double>& x) { return x; },
                      [](const Tensor<double>& dy) { return dy; }, {}};
  std::mt19937_64 rng(9);
  const auto report = grad_check(f, random_tensor({7}, rng), 1e-12);
  ASSERT_EQ(report.entries.size(), 1u);
  EXPECT_EQ(report.entries[0].max_rel_error, 0.0);
}

TEST(GradCheck, LinearLayerWithinAffineTolerance) {
  auto layer = std::make_shared<Linear<double>>("fc", 5, 4);
  auto input = std::make_shared<Tensor<double>>();
  std::mt19937_64 rng(10);
  layer->init(rng, 0.5);
  GradCheckFragment f{"linear",
                      [layer, input](const Tensor<double>& x) {
                        *input = x;
                        return layer->forward(x);
                      },
                      [layer, input](const Tensor<double>& dy) { return layer->backward(*input, dy); }, {}};
  layer->collect(f.parameters);
  const auto report = grad_check(f, random_tensor({3, 5}, rng), 1e-6);
  EXPECT_TRUE(report.passed) << report.max_rel_error;
  EXPECT_EQ(report.entries.size(), 3u);
}

TEST(GradCheck, DetectsWrongBackward) {
  GradCheckFragment f{"square", [](const Tensor<double>& x) {
                        Tensor<double> y = x;
                        for (auto& v : y.values()) v *= v;
                        return y;
                      },
                      [](const Tensor<double>& dy) { return dy; },  // missing the 2x factor
                      {}};
  std::mt19937_64 rng(11);
  const auto report = grad_check(f, random_tensor({6}, rng, 0.5, 1.0), 1e-4);
  EXPECT_FALSE(report.passed);
}

TEST(GradCheck, NonFiniteOutputNamesFragment) {
  GradCheckFragment f{"blowup", [](const Tensor<double>& x) {
                        Tensor<double> y = x;
                        y[0] = std::log(-1.0);
                        return y;
                      },
                      [](const Tensor<double>& dy) { return dy; }, {}};
  try {
    grad_check(f, Tensor<double>({2}, 1.0), 1e-4);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("blowup"), std::string::npos);
  }
}

TEST(Vten, RoundTripBothDtypes) {
  std::mt19937_64 rng(12);
  const auto f = random_tensor<float>({2, 3, 4}, rng);
  const auto d = random_tensor<double>({5}, rng);
  std::stringstream ss;
  write_vten(ss, f);
  write_vten(ss, d);
  EXPECT_EQ(read_vten<float>(ss, "s"), f);
  EXPECT_EQ(read_vten<double>(ss, "s"), d);
}

TEST(Vten, HeaderLayout) {
  std::stringstream ss;
  write_vten(ss, Tensor<float>({2, 1}, {1.0f, 2.0f}));
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 4 + 1 + 1 + 2 + 2 * 4 + 2 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "VTEN");
  EXPECT_EQ(bytes[4], 1);   // version, little-endian
  EXPECT_EQ(bytes[8], 0);   // f32
  EXPECT_EQ(bytes[9], 2);   // ndim
  EXPECT_EQ(bytes[12], 2);  // first extent
  float first;
  std::memcpy(&first, bytes.data() + 20, 4);
  EXPECT_EQ(first, 1.0f);
}

TEST(Vten, BadMagicAndTruncationAreFormatErrors) {
  std::stringstream bad("VTEX....");
  EXPECT_THROW(read_vten_any(bad, "bad"), FormatError);
  std::stringstream ss;
  write_vten(ss, Tensor<float>({4}, 1.0f));
  std::string cut = ss.str();
  cut.resize(cut.size() - 3);
  std::stringstream truncated(cut);
  EXPECT_THROW(read_vten_any(truncated, "cut"), FormatError);
  EXPECT_THROW(read_vten<float>(std::filesystem::path("/nonexistent/x.vten")), IoError);
}
