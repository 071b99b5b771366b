#pragma once

#include <cstdint>
#include <vector>

#include "jumpvel/data/sample.hpp"
#include "jumpvel/numerics/layers.hpp"

namespace jumpvel::baselines {

/// Small residual conv net standing in for a large pretrained extractor.
/// Each stage is a 3x3 conv (stride 1 for the first stage, 2 afterwards)
/// followed by `blocks_per_stage` residual blocks; the pooled map is
/// projected to `feature_dim`.
struct ConvFeatConfig {
  std::size_t image_size = 32;
  std::size_t in_channels = 1;
  std::vector<std::size_t> widths = {8, 16, 32};
  std::size_t blocks_per_stage = 1;
  std::size_t feature_dim = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

class ConvFeatureExtractor {
 public:
  explicit ConvFeatureExtractor(const ConvFeatConfig& cfg);

  /// Features of one [S, S, C] frame.
  Tensor<float> frame_features(const Tensor<float>& frame) const;

  /// Mean of per-frame features over a [T, S, S, C] clip.
  Tensor<float> clip_features(const Tensor<float>& frames) const;

  /// Clip features of every active view, concatenated in left, center, right order.
  Tensor<float> sample_features(const VideoSample& sample, ViewSelection selection) const;

  const ConvFeatConfig& config() const { return cfg_; }
  std::vector<const Parameter<float>*> parameters() const;

 private:
  struct Conv {
    Linear<float> kernel;  // [9 * in, out]
    std::size_t stride = 1;
  };
  Tensor<float> conv(const Conv& c, const Tensor<float>& x, std::size_t side, std::size_t& out_side) const;

  ConvFeatConfig cfg_;
  std::vector<Conv> stems_;
  std::vector<std::vector<std::pair<Conv, Conv>>> blocks_;
  Linear<float> projection_;
};

}  // namespace jumpvel::baselines
