#include "jumpvel/swin/attention.hpp"

#include <cmath>

#include "jumpvel/swin/window.hpp"

namespace jumpvel::swin {

template <typename T>
WindowAttention<T>::WindowAttention(const std::string& name, std::size_t channels, std::size_t heads,
                                    std::size_t window, bool use_bias)
    : qkv(name + ".qkv", channels, 3 * channels),
      proj(name + ".proj", channels, channels),
      channels_(channels),
      heads_(heads),
      window_(window),
      has_bias_(use_bias) {
  if (heads == 0 || channels % heads != 0) {
    throw ConfigError(name + ": channels " + std::to_string(channels) + " not divisible by heads " +
                      std::to_string(heads));
  }
  if (has_bias_) {
    const std::size_t span = 2 * window - 1;
    this->rel_pos_bias = Parameter<T>(name + ".rel_pos_bias", Tensor<T>({span * span, heads}));
    rel_index_ = relative_position_index(window);
  }
}

template <typename T>
void WindowAttention<T>::init(Rng& rng) {
  qkv.init(rng);
  proj.init(rng);
  if (has_bias_) init_trunc_normal(rel_pos_bias.value, 0.02, rng);
}

template <typename T>
void WindowAttention<T>::collect(std::vector<Parameter<T>*>& out) {
  qkv.collect(out);
  proj.collect(out);
  if (has_bias_) out.push_back(&rel_pos_bias);
}

template <typename T>
Tensor<T> WindowAttention<T>::forward(const Tensor<T>& windows, const Tensor<T>* mask,
                                      AttentionCache<T>* cache) const {
  if (windows.rank() != 3 || windows.dim(2) != channels_) {
    throw DimensionError("msa_forward: windows " + to_string(windows.shape()) + " do not carry " +
                         std::to_string(channels_) + " channels");
  }
  const std::size_t nw = windows.dim(0);
  const std::size_t t = windows.dim(1);
  if (has_bias_ && t != window_ * window_) {
    throw DimensionError("msa_forward: window of " + std::to_string(t) + " tokens, expected " +
                         std::to_string(window_ * window_));
  }
  // A mask covering one frame's windows repeats over stacked frames.
  const std::size_t mask_windows = mask ? mask->dim(0) : 1;
  if (mask && (mask->rank() != 3 || mask_windows == 0 || nw % mask_windows != 0 || mask->dim(1) != t ||
               mask->dim(2) != t)) {
    throw DimensionError("msa_forward: mask " + to_string(mask->shape()) + " does not match windows " +
                         to_string(windows.shape()));
  }
  const std::size_t c = channels_;
  const std::size_t dh = c / heads_;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  Tensor<T> qkv_out = qkv.forward(windows);
  Tensor<T> probs({nw, heads_, t, t});
  Tensor<T> context({nw, t, c});
  const T* q_all = qkv_out.data();
  for (std::size_t w = 0; w < nw; ++w) {
    const T* base = q_all + w * t * 3 * c;
    const T* wmask = mask ? mask->data() + (w % mask_windows) * t * t : nullptr;
    for (std::size_t h = 0; h < heads_; ++h) {
      T* p = probs.data() + (w * heads_ + h) * t * t;
      for (std::size_t i = 0; i < t; ++i) {
        const T* qi = base + i * 3 * c + h * dh;
        for (std::size_t j = 0; j < t; ++j) {
          const T* kj = base + j * 3 * c + c + h * dh;
          T s{0};
          for (std::size_t d = 0; d < dh; ++d) s += qi[d] * kj[d];
          s *= scale;
          if (has_bias_) s += rel_pos_bias.value[rel_index_[i * t + j] * heads_ + h];
          if (wmask) s += wmask[i * t + j];
          p[i * t + j] = s;
        }
      }
      softmax_rows(p, t, t);
      for (std::size_t i = 0; i < t; ++i) {
        T* ci = context.data() + (w * t + i) * c + h * dh;
        for (std::size_t j = 0; j < t; ++j) {
          const T pij = p[i * t + j];
          if (pij == T{0}) continue;
          const T* vj = base + j * 3 * c + 2 * c + h * dh;
          for (std::size_t d = 0; d < dh; ++d) ci[d] += pij * vj[d];
        }
      }
    }
  }
  Tensor<T> out = proj.forward(context);
  if (cache) {
    cache->input = windows;
    cache->qkv = std::move(qkv_out);
    cache->probs = std::move(probs);
    cache->context = std::move(context);
  }
  return out;
}

template <typename T>
Tensor<T> WindowAttention<T>::backward(const AttentionCache<T>& cache, const Tensor<T>& dout) {
  const std::size_t nw = cache.input.dim(0);
  const std::size_t t = cache.input.dim(1);
  const std::size_t c = channels_;
  const std::size_t dh = c / heads_;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  const Tensor<T> dcontext = proj.backward(cache.context, dout);
  Tensor<T> dqkv(cache.qkv.shape());
  std::vector<T> ds(t * t);
  for (std::size_t w = 0; w < nw; ++w) {
    const T* base = cache.qkv.data() + w * t * 3 * c;
    T* dbase = dqkv.data() + w * t * 3 * c;
    for (std::size_t h = 0; h < heads_; ++h) {
      const T* p = cache.probs.data() + (w * heads_ + h) * t * t;
      // dP and dV
      for (std::size_t i = 0; i < t; ++i) {
        const T* dci = dcontext.data() + (w * t + i) * c + h * dh;
        T rowdot{0};
        for (std::size_t j = 0; j < t; ++j) {
          const T* vj = base + j * 3 * c + 2 * c + h * dh;
          T* dvj = dbase + j * 3 * c + 2 * c + h * dh;
          const T pij = p[i * t + j];
          T dp{0};
          for (std::size_t d = 0; d < dh; ++d) {
            dp += dci[d] * vj[d];
            dvj[d] += pij * dci[d];
          }
          ds[i * t + j] = dp;
          rowdot += pij * dp;
        }
        for (std::size_t j = 0; j < t; ++j) ds[i * t + j] = p[i * t + j] * (ds[i * t + j] - rowdot);
      }
      if (has_bias_) {
        for (std::size_t k = 0; k < t * t; ++k) rel_pos_bias.grad[rel_index_[k] * heads_ + h] += ds[k];
      }
      for (std::size_t i = 0; i < t; ++i) {
        const T* qi = base + i * 3 * c + h * dh;
        T* dqi = dbase + i * 3 * c + h * dh;
        for (std::size_t j = 0; j < t; ++j) {
          const T g = ds[i * t + j] * scale;
          if (g == T{0}) continue;
          const T* kj = base + j * 3 * c + c + h * dh;
          T* dkj = dbase + j * 3 * c + c + h * dh;
          for (std::size_t d = 0; d < dh; ++d) {
            dqi[d] += g * kj[d];
            dkj[d] += g * qi[d];
          }
        }
      }
    }
  }
  return qkv.backward(cache.input, dqkv);
}

template class WindowAttention<float>;
template class WindowAttention<double>;

}  // namespace jumpvel::swin
