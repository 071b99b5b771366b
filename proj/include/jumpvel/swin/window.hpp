#pragma once

#include <vector>

#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel::swin {

/// Additive attention bias between masked token pairs.
inline constexpr double kMaskValue = -1e9;

/// Token grid H x W with C channels, stored row-major as [H x W x C].
template <typename T>
struct TokenGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  Tensor<T> values;

  TokenGrid() = default;
  TokenGrid(std::size_t h, std::size_t w, std::size_t c) : height(h), width(w), channels(c), values({h, w, c}) {}
  explicit TokenGrid(Tensor<T> v);

  std::size_t tokens() const { return height * width; }
  friend bool operator==(const TokenGrid&, const TokenGrid&) = default;
};

/// [numWindows x w*w x C]; windows row-major over the grid, tokens row-major
/// within each window.
template <typename T>
Tensor<T> window_partition(const TokenGrid<T>& g, std::size_t window);

/// Exact inverse of window_partition.
template <typename T>
TokenGrid<T> window_reverse(const Tensor<T>& windows, std::size_t height, std::size_t width);

/// Toroidal roll of both axes by -shift: out[i][j] = g[(i + s) % H][(j + s) % W].
template <typename T>
TokenGrid<T> cyclic_shift(const TokenGrid<T>& g, std::size_t shift);

/// Roll by +shift; undoes cyclic_shift.
template <typename T>
TokenGrid<T> inverse_shift(const TokenGrid<T>& g, std::size_t shift);

/// [numWindows x T x T] additive bias, T = window^2. An entry is 0 iff both
/// tokens of the shifted window come from the same pre-shift region,
/// otherwise kMaskValue. shift == 0 gives all zeros.
template <typename T>
Tensor<T> build_attention_mask(std::size_t height, std::size_t width, std::size_t window, std::size_t shift);

/// Source token index (row-major in the unshifted grid) for each position of
/// the shifted-then-partitioned layout. Gathering tokens through this map is
/// equivalent to window_partition(cyclic_shift(g, shift), window).
std::vector<std::size_t> window_gather_index(std::size_t height, std::size_t width, std::size_t window,
                                             std::size_t shift);

/// For each (query, key) token pair inside a window, the row of the relative
/// position bias table, (dy + w - 1) * (2w - 1) + (dx + w - 1).
std::vector<std::size_t> relative_position_index(std::size_t window);

}  // namespace jumpvel::swin
