#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jumpvel/swin/block.hpp"

namespace jumpvel::swin {

template <typename T>
struct BackboneCache {
  Tensor<T> patches;
  std::vector<SwinBlockCache<T>> blocks;
  std::vector<Tensor<T>> merge_inputs;  // one per block; empty when that block has no merge
  LayerNormCache<T> norm;
  std::size_t tokens = 0;  // per frame
  std::size_t batch = 0;   // 0 for a single unstacked frame
};

/// Patch embedding, `num_blocks` windowed-attention blocks with optional
/// patch merging after each, final layer norm and a token mean.
/// Output is a feature vector of length cfg.feature_dim(); a stack of frames
/// [B x S x S x ch] gives one feature row per frame, [B x feature_dim].
template <typename T>
class Backbone {
 public:
  Backbone() = default;
  Backbone(const std::string& prefix, const SwinConfig& cfg);

  /// Truncated-normal weights (sigma 1/sqrt(fan_in)), zero biases, unit LN
  /// gains, relative position biases at sigma 0.02.
  void init(Rng& rng);

  Tensor<T> forward(const Tensor<T>& frame, BackboneCache<T>* cache = nullptr) const;
  /// Accumulates parameter gradients; returns the frame gradient.
  Tensor<T> backward(const BackboneCache<T>& cache, const Tensor<T>& dfeature);

  void collect(std::vector<Parameter<T>*>& out);
  const SwinConfig& config() const { return cfg_; }

  PatchEmbed<T> embed;
  std::vector<SwinBlock<T>> blocks;
  std::vector<std::optional<PatchMerge<T>>> merges;
  LayerNorm<T> norm;

 private:
  SwinConfig cfg_;
};

}  // namespace jumpvel::swin
