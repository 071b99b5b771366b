#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "jumpvel/numerics/ops.hpp"
#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel {

using Rng = std::mt19937_64;

/// Fills `t` with N(0, sigma^2) samples truncated to [-2 sigma, 2 sigma].
template <typename T>
void init_trunc_normal(Tensor<T>& t, double sigma, Rng& rng);

/// Affine layer: weight [in x out], bias [out]. Parameters start at zero.
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out)
      : weight(name + ".weight", Tensor<T>({in, out})), bias(name + ".bias", Tensor<T>({out})) {}

  std::size_t in_features() const { return weight.value.dim(0); }
  std::size_t out_features() const { return weight.value.dim(1); }

  Tensor<T> forward(const Tensor<T>& x) const { return linear(x, weight.value, bias.value); }
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& dy) {
    return linear_backward(x, weight.value, dy, weight.grad, bias.grad);
  }

  // Fan-in scaled: sigma 0.02 left the weights so small that fixed-size Adam
  // steps swamped them and training collapsed to a constant output.
  void init(Rng& rng) { init(rng, 1.0 / std::sqrt(static_cast<double>(in_features()))); }
  void init(Rng& rng, double sigma) {
    init_trunc_normal(weight.value, sigma, rng);
    bias.value.fill(T{0});
  }
  void collect(std::vector<Parameter<T>*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Parameter<T> weight;
  Parameter<T> bias;
};

template <typename T>
class LayerNorm {
 public:
  static constexpr double kDefaultEps = 1e-5;

  LayerNorm() = default;
  LayerNorm(const std::string& name, std::size_t channels, T eps = static_cast<T>(kDefaultEps))
      : gamma(name + ".gamma", Tensor<T>({channels}, T{1})), beta(name + ".beta", Tensor<T>({channels})), eps(eps) {}

  Tensor<T> forward(const Tensor<T>& x, LayerNormCache<T>* cache = nullptr) const {
    return layer_norm(x, gamma.value, beta.value, eps, cache);
  }
  Tensor<T> backward(const LayerNormCache<T>& cache, const Tensor<T>& dy) {
    return layer_norm_backward(cache, gamma.value, dy, gamma.grad, beta.grad);
  }
  void collect(std::vector<Parameter<T>*>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }

  Parameter<T> gamma;
  Parameter<T> beta;
  T eps = static_cast<T>(kDefaultEps);
};

}  // namespace jumpvel
