#include "jumpvel/swin/window.hpp"

#include <numeric>

namespace jumpvel::swin {

template <typename T>
TokenGrid<T>::TokenGrid(Tensor<T> v) : values(std::move(v)) {
  if (values.rank() != 3) throw DimensionError("token grid needs a rank-3 tensor, got " + to_string(values.shape()));
  height = values.dim(0);
  width = values.dim(1);
  channels = values.dim(2);
}

template <typename T>
Tensor<T> window_partition(const TokenGrid<T>& g, std::size_t window) {
  if (window == 0 || g.height % window != 0 || g.width % window != 0) {
    throw DimensionError("window_partition: grid " + std::to_string(g.height) + "x" + std::to_string(g.width) +
                         " not divisible by window " + std::to_string(window));
  }
  const std::size_t nwh = g.height / window;
  const std::size_t nww = g.width / window;
  const std::size_t c = g.channels;
  Tensor<T> out({nwh * nww, window * window, c});
  T* o = out.data();
  for (std::size_t wy = 0; wy < nwh; ++wy) {
    for (std::size_t wx = 0; wx < nww; ++wx) {
      for (std::size_t ty = 0; ty < window; ++ty) {
        for (std::size_t tx = 0; tx < window; ++tx) {
          const T* src = g.values.data() + ((wy * window + ty) * g.width + wx * window + tx) * c;
          std::copy(src, src + c, o);
          o += c;
        }
      }
    }
  }
  return out;
}

template <typename T>
TokenGrid<T> window_reverse(const Tensor<T>& windows, std::size_t height, std::size_t width) {
  if (windows.rank() != 3) {
    throw DimensionError("window_reverse: expected [numWindows x T x C], got " + to_string(windows.shape()));
  }
  const std::size_t nw = windows.dim(0);
  const std::size_t t = windows.dim(1);
  const std::size_t c = windows.dim(2);
  std::size_t window = 0;
  while (window * window < t) ++window;
  if (window * window != t || nw * t != height * width || height % window != 0 || width % window != 0) {
    throw DimensionError("window_reverse: windows " + to_string(windows.shape()) + " inconsistent with grid " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  TokenGrid<T> g(height, width, c);
  const std::size_t nww = width / window;
  const T* src = windows.data();
  for (std::size_t k = 0; k < nw; ++k) {
    const std::size_t wy = k / nww;
    const std::size_t wx = k % nww;
    for (std::size_t ty = 0; ty < window; ++ty) {
      for (std::size_t tx = 0; tx < window; ++tx) {
        T* dst = g.values.data() + ((wy * window + ty) * width + wx * window + tx) * c;
        std::copy(src, src + c, dst);
        src += c;
      }
    }
  }
  return g;
}

namespace {

template <typename T>
TokenGrid<T> roll(const TokenGrid<T>& g, std::size_t dy, std::size_t dx) {
  TokenGrid<T> out(g.height, g.width, g.channels);
  const std::size_t c = g.channels;
  for (std::size_t i = 0; i < g.height; ++i) {
    for (std::size_t j = 0; j < g.width; ++j) {
      const std::size_t si = (i + dy) % g.height;
      const std::size_t sj = (j + dx) % g.width;
      const T* src = g.values.data() + (si * g.width + sj) * c;
      std::copy(src, src + c, out.values.data() + (i * g.width + j) * c);
    }
  }
  return out;
}

}  // namespace

template <typename T>
TokenGrid<T> cyclic_shift(const TokenGrid<T>& g, std::size_t shift) {
  if (g.height == 0 || g.width == 0) return g;
  return roll(g, shift % g.height, shift % g.width);
}

template <typename T>
TokenGrid<T> inverse_shift(const TokenGrid<T>& g, std::size_t shift) {
  if (g.height == 0 || g.width == 0) return g;
  return roll(g, (g.height - shift % g.height) % g.height, (g.width - shift % g.width) % g.width);
}

namespace {

// Region id along one axis for the shifted layout: slices [0, n-w), [n-w, n-s), [n-s, n).
std::size_t region(std::size_t pos, std::size_t n, std::size_t window, std::size_t shift) {
  if (pos < n - window) return 0;
  if (pos < n - shift) return 1;
  return 2;
}

}  // namespace

template <typename T>
Tensor<T> build_attention_mask(std::size_t height, std::size_t width, std::size_t window, std::size_t shift) {
  if (window == 0 || height % window != 0 || width % window != 0) {
    throw DimensionError("build_attention_mask: grid " + std::to_string(height) + "x" + std::to_string(width) +
                         " not divisible by window " + std::to_string(window));
  }
  if (shift >= window && shift != 0) throw ConfigError("build_attention_mask: shift must be smaller than window");
  TokenGrid<double> ids(height, width, 1);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t id = shift == 0 ? 0 : region(i, height, window, shift) * 3 + region(j, width, window, shift);
      ids.values(i, j, 0) = static_cast<double>(id);
    }
  }
  const Tensor<double> win = window_partition(ids, window);
  const std::size_t nw = win.dim(0);
  const std::size_t t = win.dim(1);
  Tensor<T> mask({nw, t, t});
  for (std::size_t k = 0; k < nw; ++k) {
    for (std::size_t a = 0; a < t; ++a) {
      for (std::size_t b = 0; b < t; ++b) {
        mask(k, a, b) = win(k, a, 0) == win(k, b, 0) ? T{0} : static_cast<T>(kMaskValue);
      }
    }
  }
  return mask;
}

std::vector<std::size_t> window_gather_index(std::size_t height, std::size_t width, std::size_t window,
                                             std::size_t shift) {
  TokenGrid<double> ids(height, width, 1);
  std::iota(ids.values.values().begin(), ids.values.values().end(), 0.0);
  const Tensor<double> win = window_partition(cyclic_shift(ids, shift), window);
  std::vector<std::size_t> index(win.size());
  for (std::size_t k = 0; k < win.size(); ++k) index[k] = static_cast<std::size_t>(win[k]);
  return index;
}

std::vector<std::size_t> relative_position_index(std::size_t window) {
  const std::size_t t = window * window;
  const std::size_t span = 2 * window - 1;
  std::vector<std::size_t> index(t * t);
  for (std::size_t a = 0; a < t; ++a) {
    for (std::size_t b = 0; b < t; ++b) {
      const std::size_t dy = a / window + window - 1 - b / window;
      const std::size_t dx = a % window + window - 1 - b % window;
      index[a * t + b] = dy * span + dx;
    }
  }
  return index;
}

#define JUMPVEL_INSTANTIATE(T)                                                                       \
  template struct TokenGrid<T>;                                                                      \
  template Tensor<T> window_partition(const TokenGrid<T>&, std::size_t);                             \
  template TokenGrid<T> window_reverse(const Tensor<T>&, std::size_t, std::size_t);                  \
  template TokenGrid<T> cyclic_shift(const TokenGrid<T>&, std::size_t);                              \
  template TokenGrid<T> inverse_shift(const TokenGrid<T>&, std::size_t);                             \
  template Tensor<T> build_attention_mask<T>(std::size_t, std::size_t, std::size_t, std::size_t);

JUMPVEL_INSTANTIATE(float)
JUMPVEL_INSTANTIATE(double)

#undef JUMPVEL_INSTANTIATE

}  // namespace jumpvel::swin
