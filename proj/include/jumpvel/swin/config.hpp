#pragma once

#include <string>
#include <vector>

#include "jumpvel/numerics/ops.hpp"

namespace jumpvel::swin {

/// Backbone hyper-parameters. Defaults are the desk configuration: 32x32
/// single-channel frames, 4x4 patches, 16 channels, 2 heads, 2x2 windows,
/// merges after the first two blocks (feature dimension 64).
struct SwinConfig {
  std::size_t image_size = 32;
  std::size_t in_channels = 1;
  std::size_t patch_size = 4;
  std::size_t embed_dim = 16;
  std::size_t num_blocks = 4;
  std::size_t heads = 2;
  std::size_t window = 2;
  double mlp_ratio = 2.0;
  std::vector<bool> merge_after_block = {true, true, false, false};
  bool use_rel_pos_bias = true;
  Activation activation = Activation::gelu;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  std::size_t shift() const { return window / 2; }
  std::size_t grid_side() const { return image_size / patch_size; }
  /// Grid side and channels seen by block `b`.
  std::size_t block_side(std::size_t b) const;
  std::size_t block_channels(std::size_t b) const;
  std::size_t feature_dim() const;
  std::size_t hidden_dim(std::size_t channels) const;

  std::string describe() const;
};

}  // namespace jumpvel::swin
