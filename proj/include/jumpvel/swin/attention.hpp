#pragma once

#include <string>
#include <vector>

#include "jumpvel/numerics/layers.hpp"

namespace jumpvel::swin {

template <typename T>
struct AttentionCache {
  Tensor<T> input;     // [nW x T x C]
  Tensor<T> qkv;       // [nW x T x 3C], channel layout q | k | v
  Tensor<T> probs;     // [nW x heads x T x T]
  Tensor<T> context;   // [nW x T x C], heads concatenated, before the output projection
};

/// Multi-head self-attention restricted to token windows (W-MSA / SW-MSA).
template <typename T>
class WindowAttention {
 public:
  WindowAttention() = default;
  WindowAttention(const std::string& name, std::size_t channels, std::size_t heads, std::size_t window,
                  bool rel_pos_bias);

  /// windows [nW x T x C]; mask is null or an [nM x T x T] additive bias with
  /// nM dividing nW, window w using mask w % nM.
  Tensor<T> forward(const Tensor<T>& windows, const Tensor<T>* mask, AttentionCache<T>* cache = nullptr) const;
  Tensor<T> backward(const AttentionCache<T>& cache, const Tensor<T>& dout);

  void init(Rng& rng);
  void collect(std::vector<Parameter<T>*>& out);

  std::size_t heads() const { return heads_; }
  std::size_t window() const { return window_; }
  bool has_rel_pos_bias() const { return has_bias_; }

  Linear<T> qkv;
  Linear<T> proj;
  Parameter<T> rel_pos_bias;  // [(2w-1)^2 x heads], present only when enabled

 private:
  std::size_t channels_ = 0;
  std::size_t heads_ = 1;
  std::size_t window_ = 1;
  bool has_bias_ = false;
  std::vector<std::size_t> rel_index_;
};

}  // namespace jumpvel::swin
