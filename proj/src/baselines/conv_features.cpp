#include "jumpvel/baselines/conv_features.hpp"

#include <cmath>

namespace jumpvel::baselines {
namespace {

void he_init(Linear<float>& layer, std::size_t fan_in, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  for (auto& w : layer.weight.value.values()) w = static_cast<float>(normal(rng));
  layer.bias.value.fill(0.0f);
}

void relu_inplace(Tensor<float>& x) {
  for (auto& v : x.values()) v = v > 0.0f ? v : 0.0f;
}

}  // namespace

void ConvFeatConfig::validate() const {
  if (image_size == 0 || in_channels == 0) throw ConfigError("conv features: empty input geometry");
  if (widths.empty()) throw ConfigError("conv features: need at least one stage");
  for (auto w : widths) {
    if (w == 0) throw ConfigError("conv features: stage width must be >= 1");
  }
  if (feature_dim == 0) throw ConfigError("conv features: feature_dim must be >= 1");
}

ConvFeatureExtractor::ConvFeatureExtractor(const ConvFeatConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(cfg_.seed);
  std::size_t in = cfg_.in_channels;
  for (std::size_t s = 0; s < cfg_.widths.size(); ++s) {
    const std::size_t w = cfg_.widths[s];
    Conv stem{Linear<float>("stem", 9 * in, w), s == 0 ? 1u : 2u};
    he_init(stem.kernel, 9 * in, rng);
    stems_.push_back(std::move(stem));
    blocks_.emplace_back();
    for (std::size_t b = 0; b < cfg_.blocks_per_stage; ++b) {
      Conv a{Linear<float>("a", 9 * w, w), 1};
      Conv c{Linear<float>("b", 9 * w, w), 1};
      he_init(a.kernel, 9 * w, rng);
      he_init(c.kernel, 9 * w, rng);
      // Damp the residual branch so activations stay O(1) through the stack.
      for (auto& v : c.kernel.weight.value.values()) v *= 0.5f;
      blocks_.back().emplace_back(std::move(a), std::move(c));
    }
    in = w;
  }
  projection_ = Linear<float>("projection", in, cfg_.feature_dim);
  he_init(projection_, in, rng);
}

Tensor<float> ConvFeatureExtractor::conv(const Conv& c, const Tensor<float>& x, std::size_t side,
                                         std::size_t& out_side) const {
  const std::size_t ch = x.dim(2);
  out_side = (side - 1) / c.stride + 1;
  Tensor<float> cols({out_side * out_side, 9 * ch});
  float* dst = cols.data();
  for (std::size_t oy = 0; oy < out_side; ++oy) {
    for (std::size_t ox = 0; ox < out_side; ++ox) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const long y = static_cast<long>(oy * c.stride) + dy;
          const long xx = static_cast<long>(ox * c.stride) + dx;
          if (y < 0 || xx < 0 || y >= static_cast<long>(side) || xx >= static_cast<long>(side)) {
            for (std::size_t k = 0; k < ch; ++k) *dst++ = 0.0f;
          } else {
            const float* src = x.data() + (static_cast<std::size_t>(y) * side + static_cast<std::size_t>(xx)) * ch;
            for (std::size_t k = 0; k < ch; ++k) *dst++ = src[k];
          }
        }
      }
    }
  }
  return c.kernel.forward(cols).reshaped({out_side, out_side, c.kernel.out_features()});
}

Tensor<float> ConvFeatureExtractor::frame_features(const Tensor<float>& frame) const {
  const Shape want{cfg_.image_size, cfg_.image_size, cfg_.in_channels};
  if (frame.shape() != want) {
    throw DimensionError("conv features: frame " + to_string(frame.shape()) + " does not match " + to_string(want));
  }
  Tensor<float> x = frame;
  std::size_t side = cfg_.image_size;
  for (std::size_t s = 0; s < stems_.size(); ++s) {
    std::size_t next = 0;
    x = conv(stems_[s], x, side, next);
    side = next;
    relu_inplace(x);
    for (const auto& [a, b] : blocks_[s]) {
      Tensor<float> h = conv(a, x, side, next);
      relu_inplace(h);
      h = conv(b, h, side, next);
      for (std::size_t i = 0; i < h.size(); ++i) h[i] += x[i];
      relu_inplace(h);
      x = std::move(h);
    }
  }
  const std::size_t ch = x.dim(2);
  Tensor<float> pooled({1, ch});
  for (std::size_t p = 0; p < side * side; ++p) {
    for (std::size_t k = 0; k < ch; ++k) pooled[k] += x[p * ch + k];
  }
  for (auto& v : pooled.values()) v /= static_cast<float>(side * side);
  return projection_.forward(pooled).reshaped({cfg_.feature_dim});
}

Tensor<float> ConvFeatureExtractor::clip_features(const Tensor<float>& frames) const {
  if (frames.rank() != 4 || frames.dim(0) == 0) {
    throw DimensionError("conv features: expected a non-empty [T, S, S, C] clip, got " + to_string(frames.shape()));
  }
  const std::size_t t = frames.dim(0);
  const std::size_t per = frames.size() / t;
  const Shape frame_shape{frames.dim(1), frames.dim(2), frames.dim(3)};
  std::vector<double> acc(cfg_.feature_dim, 0.0);
  for (std::size_t f = 0; f < t; ++f) {
    Tensor<float> frame(frame_shape, std::vector<float>(frames.data() + f * per, frames.data() + (f + 1) * per));
    const Tensor<float> feat = frame_features(frame);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += feat[k];
  }
  Tensor<float> out({cfg_.feature_dim});
  for (std::size_t k = 0; k < acc.size(); ++k) out[k] = static_cast<float>(acc[k] / static_cast<double>(t));
  return out;
}

Tensor<float> ConvFeatureExtractor::sample_features(const VideoSample& sample, ViewSelection selection) const {
  sample.require_views(selection);
  const auto views = active_views(selection);
  Tensor<float> out({views.size() * cfg_.feature_dim});
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Tensor<float> f = clip_features(sample.views.at(views[i]));
    std::copy(f.data(), f.data() + f.size(), out.data() + i * cfg_.feature_dim);
  }
  return out;
}

std::vector<const Parameter<float>*> ConvFeatureExtractor::parameters() const {
  std::vector<const Parameter<float>*> out;
  auto add = [&](const Linear<float>& l) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  };
  for (std::size_t s = 0; s < stems_.size(); ++s) {
    add(stems_[s].kernel);
    for (const auto& [a, b] : blocks_[s]) {
      add(a.kernel);
      add(b.kernel);
    }
  }
  add(projection_);
  return out;
}

}  // namespace jumpvel::baselines
