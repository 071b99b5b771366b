#include "jumpvel/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jumpvel {

namespace {

// One 64-byte register (GCC/Clang vector extension): 16 floats or 8 doubles.
template <typename T>
struct Lanes {
  static constexpr std::size_t count = 64 / sizeof(T);
  typedef T type __attribute__((vector_size(64)));
};

template <typename T>
inline typename Lanes<T>::type load_lanes(const T* p) {
  typename Lanes<T>::type v;
  __builtin_memcpy(&v, p, sizeof(v));
  return v;
}

template <typename T>
inline void store_lanes(T* p, typename Lanes<T>::type v) {
  __builtin_memcpy(p, &v, sizeof(v));
}

// Four rows by NV registers of columns starting at column j0.
template <typename T, std::size_t NV>
inline void gemm_block(std::size_t m_rows, std::size_t n_cols, std::size_t p_len, const T* a, std::size_t a_rs,
                       std::size_t a_cs, const T* b, T* c, std::size_t j0) {
  using V = typename Lanes<T>::type;
  constexpr std::size_t L = Lanes<T>::count;
  std::size_t m = 0;
  for (; m + 4 <= m_rows; m += 4) {
    T* c0 = c + m * n_cols + j0;
    V r[4][NV];
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < NV; ++k) r[i][k] = load_lanes(c0 + i * n_cols + k * L);
    const T* a0 = a + m * a_rs;
    for (std::size_t p = 0; p < p_len; ++p) {
      const T* brow = b + p * n_cols + j0;
      V bv[NV];
      for (std::size_t k = 0; k < NV; ++k) bv[k] = load_lanes(brow + k * L);
      for (std::size_t i = 0; i < 4; ++i) {
        const T v = a0[i * a_rs + p * a_cs];
        for (std::size_t k = 0; k < NV; ++k) r[i][k] += v * bv[k];
      }
    }
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < NV; ++k) store_lanes(c0 + i * n_cols + k * L, r[i][k]);
  }
  for (; m < m_rows; ++m) {
    T* cr = c + m * n_cols + j0;
    V r[NV];
    for (std::size_t k = 0; k < NV; ++k) r[k] = load_lanes(cr + k * L);
    const T* ar = a + m * a_rs;
    for (std::size_t p = 0; p < p_len; ++p) {
      const T* brow = b + p * n_cols + j0;
      const T v = ar[p * a_cs];
      for (std::size_t k = 0; k < NV; ++k) r[k] += v * load_lanes(brow + k * L);
    }
    for (std::size_t k = 0; k < NV; ++k) store_lanes(cr + k * L, r[k]);
  }
}

// C[M x N] += A(M x P) * B[P x N], where A(m, p) = A[m * a_rs + p * a_cs] and B
// is row-major. Every output accumulates over p in increasing order, so results
// do not depend on the blocking.
template <typename T>
void gemm_accumulate(std::size_t m_rows, std::size_t n_cols, std::size_t p_len, const T* a, std::size_t a_rs,
                     std::size_t a_cs, const T* b, T* c) {
  constexpr std::size_t L = Lanes<T>::count;
  std::size_t j0 = 0;
  for (; j0 + 2 * L <= n_cols; j0 += 2 * L) gemm_block<T, 2>(m_rows, n_cols, p_len, a, a_rs, a_cs, b, c, j0);
  for (; j0 + L <= n_cols; j0 += L) gemm_block<T, 1>(m_rows, n_cols, p_len, a, a_rs, a_cs, b, c, j0);
  if (j0 == n_cols) return;
  for (std::size_t m = 0; m < m_rows; ++m) {
    T* cr = c + m * n_cols;
    const T* ar = a + m * a_rs;
    for (std::size_t p = 0; p < p_len; ++p) {
      const T v = ar[p * a_cs];
      const T* brow = b + p * n_cols;
      for (std::size_t j = j0; j < n_cols; ++j) cr[j] += v * brow[j];
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  std::size_t rows = 0;
  const std::size_t din = split_last_axis(x.shape(), rows);
  if (weight.rank() != 2 || weight.dim(0) != din) {
    throw DimensionError("linear: input " + to_string(x.shape()) + " incompatible with weight " +
                         to_string(weight.shape()));
  }
  const std::size_t dout = weight.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != dout) {
    throw DimensionError("linear: bias " + to_string(bias.shape()) + " incompatible with weight " +
                         to_string(weight.shape()));
  }
  Shape out_shape = x.shape();
  out_shape.back() = dout;
  Tensor<T> out(out_shape);
  T* o = out.data();
  for (std::size_t n = 0; n < rows; ++n) std::copy(bias.data(), bias.data() + dout, o + n * dout);
  gemm_accumulate(rows, dout, din, x.data(), din, std::size_t{1}, weight.data(), o);
  return out;
}

template <typename T>
Tensor<T> linear_backward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& dy, Tensor<T>& dweight,
                          Tensor<T>& dbias) {
  std::size_t rows = 0;
  const std::size_t din = split_last_axis(x.shape(), rows);
  const std::size_t dout = weight.dim(1);
  std::size_t dy_rows = 0;
  if (split_last_axis(dy.shape(), dy_rows) != dout || dy_rows != rows) {
    throw DimensionError("linear backward: output gradient " + to_string(dy.shape()) + " incompatible with input " +
                         to_string(x.shape()) + " and weight " + to_string(weight.shape()));
  }
  const T* g = dy.data();
  T* db = dbias.data();
  for (std::size_t n = 0; n < rows; ++n) {
    const T* grow = g + n * dout;
    for (std::size_t j = 0; j < dout; ++j) db[j] += grow[j];
  }
  // dW += x^T dy
  gemm_accumulate(din, dout, rows, x.data(), std::size_t{1}, din, g, dweight.data());
  // dx = dy W^T, through an explicit transpose so the broadcast kernel applies
  std::vector<T> wt(din * dout);
  const T* w = weight.data();
  for (std::size_t i = 0; i < din; ++i) {
    for (std::size_t j = 0; j < dout; ++j) wt[j * din + i] = w[i * dout + j];
  }
  Tensor<T> dx(x.shape());
  gemm_accumulate(rows, din, dout, g, dout, std::size_t{1}, wt.data(), dx.data());
  return dx;
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps,
                     LayerNormCache<T>* cache) {
  std::size_t rows = 0;
  const std::size_t c = split_last_axis(x.shape(), rows);
  if (gamma.size() != c || beta.size() != c) {
    throw DimensionError("layer_norm: last axis of " + to_string(x.shape()) + " does not match gamma " +
                         to_string(gamma.shape()) + " / beta " + to_string(beta.shape()));
  }
  Tensor<T> out(x.shape());
  if (cache) {
    cache->normalized = Tensor<T>(x.shape());
    cache->inv_std.assign(rows, T{0});
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.data() + r * c;
    T mean{0};
    for (std::size_t i = 0; i < c; ++i) mean += xr[i];
    mean /= static_cast<T>(c);
    T var{0};
    for (std::size_t i = 0; i < c; ++i) {
      const T d = xr[i] - mean;
      var += d * d;
    }
    var /= static_cast<T>(c);
    const T inv_std = T{1} / std::sqrt(var + eps);
    T* o = out.data() + r * c;
    T* nrm = cache ? cache->normalized.data() + r * c : nullptr;
    for (std::size_t i = 0; i < c; ++i) {
      const T xhat = (xr[i] - mean) * inv_std;
      if (nrm) nrm[i] = xhat;
      o[i] = gamma[i] * xhat + beta[i];
    }
    if (cache) cache->inv_std[r] = inv_std;
  }
  return out;
}

template <typename T>
Tensor<T> layer_norm_backward(const LayerNormCache<T>& cache, const Tensor<T>& gamma, const Tensor<T>& dy,
                              Tensor<T>& dgamma, Tensor<T>& dbeta) {
  require_same_shape(dy.shape(), cache.normalized.shape(), "layer_norm backward");
  std::size_t rows = 0;
  const std::size_t c = split_last_axis(dy.shape(), rows);
  Tensor<T> dx(dy.shape());
  std::vector<T> dxhat(c);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* g = dy.data() + r * c;
    const T* xhat = cache.normalized.data() + r * c;
    T mean_d{0};
    T mean_dx{0};
    for (std::size_t i = 0; i < c; ++i) {
      dgamma[i] += g[i] * xhat[i];
      dbeta[i] += g[i];
      dxhat[i] = g[i] * gamma[i];
      mean_d += dxhat[i];
      mean_dx += dxhat[i] * xhat[i];
    }
    mean_d /= static_cast<T>(c);
    mean_dx /= static_cast<T>(c);
    T* o = dx.data() + r * c;
    const T inv_std = cache.inv_std[r];
    for (std::size_t i = 0; i < c; ++i) o[i] = inv_std * (dxhat[i] - mean_d - xhat[i] * mean_dx);
  }
  return dx;
}

template <typename T>
void softmax_rows(T* data, std::size_t rows, std::size_t k) {
  for (std::size_t r = 0; r < rows; ++r) {
    T* row = data + r * k;
    T mx = row[0];
    for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, row[i]);
    T sum{0};
    for (std::size_t i = 0; i < k; ++i) {
      row[i] = std::exp(row[i] - mx);
      sum += row[i];
    }
    const T inv = T{1} / sum;
    for (std::size_t i = 0; i < k; ++i) row[i] *= inv;
  }
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x) {
  std::size_t rows = 0;
  const std::size_t k = split_last_axis(x.shape(), rows);
  if (k == 0) throw DimensionError("softmax: empty last axis in " + to_string(x.shape()));
  Tensor<T> out = x;
  softmax_rows(out.data(), rows, k);
  return out;
}

template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& y, const Tensor<T>& dy) {
  require_same_shape(dy.shape(), y.shape(), "softmax backward");
  std::size_t rows = 0;
  const std::size_t k = split_last_axis(y.shape(), rows);
  Tensor<T> dx(y.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* yr = y.data() + r * k;
    const T* gr = dy.data() + r * k;
    T dot{0};
    for (std::size_t i = 0; i < k; ++i) dot += yr[i] * gr[i];
    T* o = dx.data() + r * k;
    for (std::size_t i = 0; i < k; ++i) o[i] = yr[i] * (gr[i] - dot);
  }
  return dx;
}

Activation parse_activation(const std::string& name) {
  if (name == "gelu") return Activation::gelu;
  if (name == "relu") return Activation::relu;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string to_string(Activation a) { return a == Activation::gelu ? "gelu" : "relu"; }

namespace {
constexpr double kGeluC = 0.044715;
}

// 0.5 x (1 + tanh(u)) rewritten as x * sigmoid(2u); identical in exact
// arithmetic and avoids tanh.
template <typename T>
T gelu(T x) {
  const T k = static_cast<T>(2.0 * std::numbers::sqrt2 / std::sqrt(std::numbers::pi));  // 2 sqrt(2/pi)
  const T two_u = k * (x + static_cast<T>(kGeluC) * x * x * x);
  return x / (T{1} + std::exp(-two_u));
}

template <typename T>
T gelu_derivative(T x) {
  const T k = static_cast<T>(2.0 * std::numbers::sqrt2 / std::sqrt(std::numbers::pi));
  const T two_u = k * (x + static_cast<T>(kGeluC) * x * x * x);
  const T s = T{1} / (T{1} + std::exp(-two_u));
  const T d_two_u = k * (T{1} + T{3} * static_cast<T>(kGeluC) * x * x);
  return s + x * s * (T{1} - s) * d_two_u;
}

template <typename T>
Tensor<T> activate(const Tensor<T>& x, Activation a) {
  Tensor<T> out(x.shape());
  const std::size_t n = x.size();
  if (a == Activation::gelu) {
    for (std::size_t i = 0; i < n; ++i) out[i] = gelu(x[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > T{0} ? x[i] : T{0};
  }
  return out;
}

template <typename T>
Tensor<T> activate_backward(const Tensor<T>& x, const Tensor<T>& dy, Activation a) {
  require_same_shape(dy.shape(), x.shape(), "activation backward");
  Tensor<T> dx(x.shape());
  const std::size_t n = x.size();
  if (a == Activation::gelu) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = dy[i] * gelu_derivative(x[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > T{0} ? dy[i] : T{0};
  }
  return dx;
}

template <typename T>
L1Result<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.size() != target.size()) {
    throw DimensionError("l1_loss: prediction " + to_string(pred.shape()) + " and target " +
                         to_string(target.shape()) + " differ in length");
  }
  if (pred.size() == 0) throw InputError("l1_loss: empty input");
  const std::size_t n = pred.size();
  const T inv_n = T{1} / static_cast<T>(n);
  L1Result<T> r{T{0}, Tensor<T>(pred.shape())};
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const T d = pred[i] - target[i];
    sum += std::abs(static_cast<double>(d));
    r.grad[i] = d > T{0} ? inv_n : (d < T{0} ? -inv_n : T{0});
  }
  r.loss = static_cast<T>(sum / static_cast<double>(n));
  return r;
}

#define JUMPVEL_INSTANTIATE(T)                                                                                \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> linear_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Tensor<T>&,        \
                                     Tensor<T>&);                                                             \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T, LayerNormCache<T>*); \
  template Tensor<T> layer_norm_backward(const LayerNormCache<T>&, const Tensor<T>&, const Tensor<T>&,        \
                                         Tensor<T>&, Tensor<T>&);                                             \
  template void softmax_rows(T*, std::size_t, std::size_t);                                                   \
  template Tensor<T> softmax(const Tensor<T>&);                                                               \
  template Tensor<T> softmax_backward(const Tensor<T>&, const Tensor<T>&);                                    \
  template T gelu(T);                                                                                         \
  template T gelu_derivative(T);                                                                              \
  template Tensor<T> activate(const Tensor<T>&, Activation);                                                  \
  template Tensor<T> activate_backward(const Tensor<T>&, const Tensor<T>&, Activation);                       \
  template L1Result<T> l1_loss(const Tensor<T>&, const Tensor<T>&);

JUMPVEL_INSTANTIATE(float)
JUMPVEL_INSTANTIATE(double)

#undef JUMPVEL_INSTANTIATE

}  // namespace jumpvel
