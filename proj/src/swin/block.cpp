#include "jumpvel/swin/block.hpp"

#include <algorithm>

namespace jumpvel::swin {
namespace {

// Number of stacked items in a tensor shaped either `single` or
// [B x single...]; 0 when it is neither.
std::size_t batch_count(const Shape& shape, const Shape& single) {
  if (shape == single) return 1;
  if (shape.size() == single.size() + 1 && std::equal(single.begin(), single.end(), shape.begin() + 1)) {
    return shape[0];
  }
  return 0;
}

Shape with_batch(const Shape& single, std::size_t batch, bool batched) {
  if (!batched) return single;
  Shape out{batch};
  out.insert(out.end(), single.begin(), single.end());
  return out;
}

// The index map is applied to each of `batch` consecutive blocks of
// index.size() rows.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& src, const std::vector<std::size_t>& index, std::size_t c, std::size_t batch,
                      Shape shape) {
  Tensor<T> out(std::move(shape));
  const std::size_t n = index.size();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* base = src.data() + b * n * c;
    T* o = out.data() + b * n * c;
    for (std::size_t k = 0; k < n; ++k) std::copy(base + index[k] * c, base + (index[k] + 1) * c, o + k * c);
  }
  return out;
}

template <typename T>
Tensor<T> scatter_rows(const Tensor<T>& src, const std::vector<std::size_t>& index, std::size_t c, std::size_t batch,
                       Shape shape) {
  Tensor<T> out(std::move(shape));
  const std::size_t n = index.size();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* base = src.data() + b * n * c;
    T* o = out.data() + b * n * c;
    for (std::size_t k = 0; k < n; ++k) std::copy(base + k * c, base + (k + 1) * c, o + index[k] * c);
  }
  return out;
}

template <typename T>
void add_into(Tensor<T>& acc, const Tensor<T>& x) {
  T* a = acc.data();
  const T* b = x.data();
  for (std::size_t i = 0; i < acc.size(); ++i) a[i] += b[i];
}

}  // namespace

template <typename T>
SwinLayer<T>::SwinLayer(const std::string& name, std::size_t side, std::size_t channels, const SwinConfig& cfg,
                        std::size_t shift)
    : norm1(name + ".norm1", channels),
      attn(name + ".attn", channels, cfg.heads, cfg.window, cfg.use_rel_pos_bias),
      norm2(name + ".norm2", channels),
      fc1(name + ".mlp.fc1", channels, cfg.hidden_dim(channels)),
      fc2(name + ".mlp.fc2", cfg.hidden_dim(channels), channels),
      side_(side),
      channels_(channels),
      window_(cfg.window),
      shift_(shift),
      activation_(cfg.activation) {
  if (side % window_ != 0) {
    throw ConfigError(name + ": grid " + std::to_string(side) + " not divisible by window " + std::to_string(window_));
  }
  if (shift_ > 0 && shift_ >= window_) throw ConfigError(name + ": shift must be smaller than the window");
  gather_ = window_gather_index(side, side, window_, shift_);
  if (shift_ > 0) mask_ = build_attention_mask<T>(side, side, window_, shift_);
}

template <typename T>
void SwinLayer<T>::init(Rng& rng) {
  attn.init(rng);
  fc1.init(rng);
  fc2.init(rng);
}

template <typename T>
void SwinLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  norm1.collect(out);
  attn.collect(out);
  norm2.collect(out);
  fc1.collect(out);
  fc2.collect(out);
}

template <typename T>
Tensor<T> SwinLayer<T>::forward(const Tensor<T>& x, SwinLayerCache<T>* cache) const {
  const std::size_t batch = batch_count(x.shape(), {side_, side_, channels_});
  if (batch == 0) {
    throw DimensionError("swin layer: input " + to_string(x.shape()) + " expected " +
                         to_string(Shape{side_, side_, channels_}) + " or a stack of them");
  }
  const std::size_t nw = (side_ / window_) * (side_ / window_);
  const std::size_t t = window_ * window_;
  const Tensor<T> n1 = norm1.forward(x, cache ? &cache->norm1 : nullptr);
  const Tensor<T> windows = gather_rows(n1, gather_, channels_, batch, {batch * nw, t, channels_});
  const Tensor<T> attended = attn.forward(windows, mask(), cache ? &cache->attn : nullptr);
  Tensor<T> y = scatter_rows(attended, gather_, channels_, batch, x.shape());
  add_into(y, x);

  Tensor<T> n2 = norm2.forward(y, cache ? &cache->norm2 : nullptr);
  Tensor<T> pre = fc1.forward(n2);
  Tensor<T> post = activate(pre, activation_);
  Tensor<T> out = fc2.forward(post);
  add_into(out, y);
  if (cache) {
    cache->norm2_out = std::move(n2);
    cache->hidden_pre = std::move(pre);
    cache->hidden_post = std::move(post);
  }
  return out;
}

template <typename T>
Tensor<T> SwinLayer<T>::backward(const SwinLayerCache<T>& cache, const Tensor<T>& dout) {
  const std::size_t nw = (side_ / window_) * (side_ / window_);
  const std::size_t t = window_ * window_;
  const std::size_t batch = dout.size() / (side_ * side_ * channels_);
  // MLP branch
  const Tensor<T> dpost = fc2.backward(cache.hidden_post, dout);
  const Tensor<T> dpre = activate_backward(cache.hidden_pre, dpost, activation_);
  const Tensor<T> dn2 = fc1.backward(cache.norm2_out, dpre);
  Tensor<T> dy = norm2.backward(cache.norm2, dn2);
  add_into(dy, dout);
  // attention branch
  const Tensor<T> dattended = gather_rows(dy, gather_, channels_, batch, {batch * nw, t, channels_});
  const Tensor<T> dwindows = attn.backward(cache.attn, dattended);
  const Tensor<T> dn1 = scatter_rows(dwindows, gather_, channels_, batch, dy.shape());
  Tensor<T> dx = norm1.backward(cache.norm1, dn1);
  add_into(dx, dy);
  return dx;
}

template <typename T>
SwinBlock<T>::SwinBlock(const std::string& name, std::size_t side, std::size_t channels, const SwinConfig& cfg)
    : regular(name + ".layers.0", side, channels, cfg, 0), shifted(name + ".layers.1", side, channels, cfg, cfg.shift()) {}

template <typename T>
Tensor<T> SwinBlock<T>::forward(const Tensor<T>& x, SwinBlockCache<T>* cache) const {
  const Tensor<T> mid = regular.forward(x, cache ? &cache->regular : nullptr);
  return shifted.forward(mid, cache ? &cache->shifted : nullptr);
}

template <typename T>
Tensor<T> SwinBlock<T>::backward(const SwinBlockCache<T>& cache, const Tensor<T>& dout) {
  const Tensor<T> dmid = shifted.backward(cache.shifted, dout);
  return regular.backward(cache.regular, dmid);
}

template <typename T>
void SwinBlock<T>::init(Rng& rng) {
  regular.init(rng);
  shifted.init(rng);
}

template <typename T>
void SwinBlock<T>::collect(std::vector<Parameter<T>*>& out) {
  regular.collect(out);
  shifted.collect(out);
}

template <typename T>
PatchEmbed<T>::PatchEmbed(const std::string& name, const SwinConfig& cfg)
    : proj(name + ".proj", cfg.patch_size * cfg.patch_size * cfg.in_channels, cfg.embed_dim),
      image_(cfg.image_size),
      patch_(cfg.patch_size),
      in_ch_(cfg.in_channels) {
  if (patch_ == 0 || image_ % patch_ != 0) {
    throw ConfigError(name + ": image size " + std::to_string(image_) + " not divisible by patch size " +
                      std::to_string(patch_));
  }
}

template <typename T>
Tensor<T> PatchEmbed<T>::extract_patches(const Tensor<T>& frame) const {
  const Shape single{image_, image_, in_ch_};
  const std::size_t batch = batch_count(frame.shape(), single);
  if (batch == 0) {
    throw DimensionError("patch_embed: frame " + to_string(frame.shape()) + " expected " + to_string(single) +
                         " or a stack of them");
  }
  const std::size_t g = image_ / patch_;
  const std::size_t row = patch_ * in_ch_;
  Tensor<T> patches(with_batch({g, g, patch_ * row}, batch, frame.rank() == 4));
  T* o = patches.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* img = frame.data() + b * image_ * image_ * in_ch_;
    for (std::size_t gy = 0; gy < g; ++gy) {
      for (std::size_t gx = 0; gx < g; ++gx) {
        for (std::size_t py = 0; py < patch_; ++py) {
          const T* src = img + ((gy * patch_ + py) * image_ + gx * patch_) * in_ch_;
          std::copy(src, src + row, o);
          o += row;
        }
      }
    }
  }
  return patches;
}

template <typename T>
Tensor<T> PatchEmbed<T>::forward(const Tensor<T>& frame, Tensor<T>* patches) const {
  Tensor<T> p = extract_patches(frame);
  Tensor<T> out = proj.forward(p);
  if (patches) *patches = std::move(p);
  return out;
}

template <typename T>
Tensor<T> PatchEmbed<T>::backward(const Tensor<T>& patches, const Tensor<T>& dout) {
  const Tensor<T> dp = proj.backward(patches, dout);
  const std::size_t g = image_ / patch_;
  const std::size_t row = patch_ * in_ch_;
  const bool batched = patches.rank() == 4;
  const std::size_t batch = batched ? patches.dim(0) : 1;
  Tensor<T> dframe(with_batch({image_, image_, in_ch_}, batch, batched));
  const T* s = dp.data();
  for (std::size_t b = 0; b < batch; ++b) {
    T* img = dframe.data() + b * image_ * image_ * in_ch_;
    for (std::size_t gy = 0; gy < g; ++gy) {
      for (std::size_t gx = 0; gx < g; ++gx) {
        for (std::size_t py = 0; py < patch_; ++py) {
          std::copy(s, s + row, img + ((gy * patch_ + py) * image_ + gx * patch_) * in_ch_);
          s += row;
        }
      }
    }
  }
  return dframe;
}

template <typename T>
Tensor<T> PatchMerge<T>::forward(const Tensor<T>& grid, Tensor<T>* gathered) const {
  const std::size_t r = grid.rank();
  if ((r != 3 && r != 4) || grid.dim(r - 3) % 2 != 0 || grid.dim(r - 2) % 2 != 0) {
    throw DimensionError("patch_merge: grid " + to_string(grid.shape()) + " must have even height and width");
  }
  const std::size_t batch = r == 4 ? grid.dim(0) : 1;
  const std::size_t h = grid.dim(r - 3);
  const std::size_t w = grid.dim(r - 2);
  const std::size_t c = grid.dim(r - 1);
  if (4 * c != reduction.in_features()) {
    throw DimensionError("patch_merge: grid " + to_string(grid.shape()) + " does not match reduction " +
                         to_string(reduction.weight.value.shape()));
  }
  Tensor<T> cat(with_batch({h / 2, w / 2, 4 * c}, batch, r == 4));
  T* o = cat.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* src_grid = grid.data() + b * h * w * c;
    for (std::size_t i = 0; i < h / 2; ++i) {
      for (std::size_t j = 0; j < w / 2; ++j) {
        for (std::size_t q = 0; q < 4; ++q) {
          const std::size_t si = 2 * i + (q & 1);
          const std::size_t sj = 2 * j + (q >> 1);
          const T* src = src_grid + (si * w + sj) * c;
          std::copy(src, src + c, o);
          o += c;
        }
      }
    }
  }
  Tensor<T> out = reduction.forward(cat);
  if (gathered) *gathered = std::move(cat);
  return out;
}

template <typename T>
Tensor<T> PatchMerge<T>::backward(const Tensor<T>& gathered, const Tensor<T>& dout) {
  const Tensor<T> dcat = reduction.backward(gathered, dout);
  const std::size_t r = gathered.rank();
  const bool batched = r == 4;
  const std::size_t batch = batched ? gathered.dim(0) : 1;
  const std::size_t h = gathered.dim(r - 3) * 2;
  const std::size_t w = gathered.dim(r - 2) * 2;
  const std::size_t c = gathered.dim(r - 1) / 4;
  Tensor<T> dgrid(with_batch({h, w, c}, batch, batched));
  const T* s = dcat.data();
  for (std::size_t b = 0; b < batch; ++b) {
    T* dst_grid = dgrid.data() + b * h * w * c;
    for (std::size_t i = 0; i < h / 2; ++i) {
      for (std::size_t j = 0; j < w / 2; ++j) {
        for (std::size_t q = 0; q < 4; ++q) {
          const std::size_t si = 2 * i + (q & 1);
          const std::size_t sj = 2 * j + (q >> 1);
          std::copy(s, s + c, dst_grid + (si * w + sj) * c);
          s += c;
        }
      }
    }
  }
  return dgrid;
}

template class SwinLayer<float>;
template class SwinLayer<double>;
template class SwinBlock<float>;
template class SwinBlock<double>;
template class PatchEmbed<float>;
template class PatchEmbed<double>;
template class PatchMerge<float>;
template class PatchMerge<double>;

}  // namespace jumpvel::swin
