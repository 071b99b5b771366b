#pragma once

#include <string>
#include <vector>

#include "jumpvel/swin/attention.hpp"
#include "jumpvel/swin/config.hpp"
#include "jumpvel/swin/window.hpp"

namespace jumpvel::swin {

template <typename T>
struct SwinLayerCache {
  LayerNormCache<T> norm1;
  AttentionCache<T> attn;
  LayerNormCache<T> norm2;
  Tensor<T> norm2_out;
  Tensor<T> hidden_pre;   // fc1 output before activation
  Tensor<T> hidden_post;  // after activation
};

/// One residual attention layer followed by one residual MLP layer:
///   y = x + MSA(LN(x));  out = y + MLP(LN(y))
/// where MSA is windowed attention over the grid cyclically shifted by
/// `shift` (0 gives the plain windowed variant).
template <typename T>
class SwinLayer {
 public:
  SwinLayer() = default;
  SwinLayer(const std::string& name, std::size_t side, std::size_t channels, const SwinConfig& cfg,
            std::size_t shift);

  /// x: [side x side x C], or [B x side x side x C] for a stack of frames.
  Tensor<T> forward(const Tensor<T>& x, SwinLayerCache<T>* cache = nullptr) const;
  Tensor<T> backward(const SwinLayerCache<T>& cache, const Tensor<T>& dout);

  void init(Rng& rng);
  void collect(std::vector<Parameter<T>*>& out);

  std::size_t shift() const { return shift_; }
  const Tensor<T>* mask() const { return shift_ > 0 ? &mask_ : nullptr; }

  LayerNorm<T> norm1;
  WindowAttention<T> attn;
  LayerNorm<T> norm2;
  Linear<T> fc1;
  Linear<T> fc2;

 private:
  std::size_t side_ = 0;
  std::size_t channels_ = 0;
  std::size_t window_ = 1;
  std::size_t shift_ = 0;
  Activation activation_ = Activation::gelu;
  std::vector<std::size_t> gather_;
  Tensor<T> mask_;
};

template <typename T>
struct SwinBlockCache {
  SwinLayerCache<T> regular;
  SwinLayerCache<T> shifted;
};

/// Two successive layers: the first on regular windows, the second on
/// windows shifted by floor(window / 2).
template <typename T>
class SwinBlock {
 public:
  SwinBlock() = default;
  SwinBlock(const std::string& name, std::size_t side, std::size_t channels, const SwinConfig& cfg);

  Tensor<T> forward(const Tensor<T>& x, SwinBlockCache<T>* cache = nullptr) const;
  Tensor<T> backward(const SwinBlockCache<T>& cache, const Tensor<T>& dout);

  void init(Rng& rng);
  void collect(std::vector<Parameter<T>*>& out);

  SwinLayer<T> regular;
  SwinLayer<T> shifted;
};

/// Splits an S x S x ch frame into non-overlapping p x p patches, flattens
/// each as (row, col, channel) and projects it to C channels.
template <typename T>
class PatchEmbed {
 public:
  PatchEmbed() = default;
  PatchEmbed(const std::string& name, const SwinConfig& cfg);

  /// frame [S x S x ch] -> grid [(S/p) x (S/p) x C]; `patches` receives the
  /// flattened patch matrix for backward. A leading frame axis is carried through.
  Tensor<T> forward(const Tensor<T>& frame, Tensor<T>* patches = nullptr) const;
  Tensor<T> backward(const Tensor<T>& patches, const Tensor<T>& dout);

  Tensor<T> extract_patches(const Tensor<T>& frame) const;

  void init(Rng& rng) { proj.init(rng); }
  void collect(std::vector<Parameter<T>*>& out) { proj.collect(out); }

  Linear<T> proj;

 private:
  std::size_t image_ = 0;
  std::size_t patch_ = 0;
  std::size_t in_ch_ = 0;
};

/// Concatenates each 2x2 neighbourhood (order (0,0), (1,0), (0,1), (1,1)) to
/// 4C channels and reduces to 2C with an affine map.
template <typename T>
class PatchMerge {
 public:
  PatchMerge() = default;
  PatchMerge(const std::string& name, std::size_t channels) : reduction(name + ".reduction", 4 * channels, 2 * channels) {}

  /// grid [H x W x C] -> [H/2 x W/2 x 2C], optionally with a leading frame
  /// axis; `gathered` receives the 4C input.
  Tensor<T> forward(const Tensor<T>& grid, Tensor<T>* gathered = nullptr) const;
  Tensor<T> backward(const Tensor<T>& gathered, const Tensor<T>& dout);

  void init(Rng& rng) { reduction.init(rng); }
  void collect(std::vector<Parameter<T>*>& out) { reduction.collect(out); }

  Linear<T> reduction;
};

}  // namespace jumpvel::swin
