#include "jumpvel/swin/backbone.hpp"

#include <algorithm>

namespace jumpvel::swin {

template <typename T>
Backbone<T>::Backbone(const std::string& prefix, const SwinConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  embed = PatchEmbed<T>(prefix + "patch_embed", cfg_);
  for (std::size_t b = 0; b < cfg_.num_blocks; ++b) {
    const std::string name = prefix + "blocks." + std::to_string(b);
    blocks.emplace_back(name, cfg_.block_side(b), cfg_.block_channels(b), cfg_);
    if (cfg_.merge_after_block[b]) {
      merges.emplace_back(PatchMerge<T>(name + ".merge", cfg_.block_channels(b)));
    } else {
      merges.emplace_back(std::nullopt);
    }
  }
  norm = LayerNorm<T>(prefix + "norm", cfg_.feature_dim());
}

template <typename T>
void Backbone<T>::init(Rng& rng) {
  embed.init(rng);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].init(rng);
    if (merges[b]) merges[b]->init(rng);
  }
}

template <typename T>
void Backbone<T>::collect(std::vector<Parameter<T>*>& out) {
  embed.collect(out);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].collect(out);
    if (merges[b]) merges[b]->collect(out);
  }
  norm.collect(out);
}

template <typename T>
Tensor<T> Backbone<T>::forward(const Tensor<T>& frame, BackboneCache<T>* cache) const {
  if (cache) {
    cache->blocks.resize(blocks.size());
    cache->merge_inputs.resize(blocks.size());
  }
  Tensor<T> x = embed.forward(frame, cache ? &cache->patches : nullptr);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    x = blocks[b].forward(x, cache ? &cache->blocks[b] : nullptr);
    if (merges[b]) x = merges[b]->forward(x, cache ? &cache->merge_inputs[b] : nullptr);
  }
  const bool batched = frame.rank() == 4;
  const std::size_t batch = batched ? frame.dim(0) : 1;
  const std::size_t d = cfg_.feature_dim();
  const std::size_t tokens = x.size() / (batch * d);
  const Tensor<T> normed = norm.forward(x, cache ? &cache->norm : nullptr);
  Tensor<T> feature(batched ? Shape{batch, d} : Shape{d});
  const T inv = T{1} / static_cast<T>(tokens);
  for (std::size_t f = 0; f < batch; ++f) {
    T* out = feature.data() + f * d;
    for (std::size_t k = 0; k < tokens; ++k) {
      const T* row = normed.data() + (f * tokens + k) * d;
      for (std::size_t i = 0; i < d; ++i) out[i] += row[i];
    }
    for (std::size_t i = 0; i < d; ++i) out[i] *= inv;
  }
  if (cache) {
    cache->tokens = tokens;
    cache->batch = batched ? batch : 0;
  }
  return feature;
}

template <typename T>
Tensor<T> Backbone<T>::backward(const BackboneCache<T>& cache, const Tensor<T>& dfeature) {
  const std::size_t d = cfg_.feature_dim();
  const std::size_t batch = std::max<std::size_t>(cache.batch, 1);
  if (dfeature.size() != batch * d) {
    throw DimensionError("backbone backward: gradient " + to_string(dfeature.shape()) + " for " +
                         std::to_string(batch) + " frame(s) of feature dim " + std::to_string(d));
  }
  const std::size_t side = cfg_.block_side(cfg_.num_blocks);
  Tensor<T> dnormed(cache.batch ? Shape{batch, side, side, d} : Shape{side, side, d});
  const T inv = T{1} / static_cast<T>(cache.tokens);
  for (std::size_t f = 0; f < batch; ++f) {
    const T* g = dfeature.data() + f * d;
    for (std::size_t k = 0; k < cache.tokens; ++k) {
      T* row = dnormed.data() + (f * cache.tokens + k) * d;
      for (std::size_t i = 0; i < d; ++i) row[i] = g[i] * inv;
    }
  }
  Tensor<T> dx = norm.backward(cache.norm, dnormed);
  for (std::size_t b = blocks.size(); b-- > 0;) {
    if (merges[b]) dx = merges[b]->backward(cache.merge_inputs[b], dx);
    dx = blocks[b].backward(cache.blocks[b], dx);
  }
  return embed.backward(cache.patches, dx);
}

template class Backbone<float>;
template class Backbone<double>;

}  // namespace jumpvel::swin
