#pragma once

#include <string>
#include <vector>

#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel {

// Dense kernels with hand-written backward passes. Every backward function
// accumulates into parameter gradients (+=) and returns the input gradient.

/// out[..., Dout] = x[..., Din] * W[Din x Dout] + b[Dout]
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T>
Tensor<T> linear_backward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& dy, Tensor<T>& dweight,
                          Tensor<T>& dbias);

template <typename T>
struct LayerNormCache {
  Tensor<T> normalized;     // pre-affine output
  std::vector<T> inv_std;   // one per normalized vector
};

/// Population mean/variance normalization over the last axis followed by
/// gamma * xhat + beta.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps,
                     LayerNormCache<T>* cache = nullptr);

template <typename T>
Tensor<T> layer_norm_backward(const LayerNormCache<T>& cache, const Tensor<T>& gamma, const Tensor<T>& dy,
                              Tensor<T>& dgamma, Tensor<T>& dbeta);

/// Softmax over the last axis, max-subtracted.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x);

/// In-place variant over `rows` contiguous slices of length `k`.
template <typename T>
void softmax_rows(T* data, std::size_t rows, std::size_t k);

/// Gradient through softmax given its output `y`.
template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& y, const Tensor<T>& dy);

enum class Activation { gelu, relu };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

/// GELU, tanh approximation.
template <typename T>
T gelu(T x);
template <typename T>
T gelu_derivative(T x);

template <typename T>
Tensor<T> activate(const Tensor<T>& x, Activation a);

template <typename T>
Tensor<T> activate_backward(const Tensor<T>& x, const Tensor<T>& dy, Activation a);

template <typename T>
struct L1Result {
  T loss;
  Tensor<T> grad;  // d loss / d pred
};

/// Mean absolute error with subgradient; the subgradient at an exact tie is 0.
template <typename T>
L1Result<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target);

}  // namespace jumpvel
