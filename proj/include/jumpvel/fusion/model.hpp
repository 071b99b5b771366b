#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jumpvel/data/sample.hpp"
#include "jumpvel/swin/backbone.hpp"

namespace jumpvel::fusion {

struct FusionConfig {
  swin::SwinConfig swin;
  ViewSelection views = ViewSelection::combined;
  std::size_t view_dim = 32;  // width of each per-view dense layer

  void validate() const;
};

template <typename T>
struct ClipCache {
  swin::BackboneCache<T> backbone;  // all frames of the clip as one stack
  std::size_t frames = 0;
};

template <typename T>
struct PredictCache {
  std::vector<ClipCache<T>> clips;        // one per active view
  std::vector<Tensor<T>> features;        // clip features, one per active view
  Tensor<T> concat;                       // [k * view_dim]
};

/// Shared backbone -> per-view temporal mean -> per-view dense layer ->
/// concatenation (left, center, right) -> final dense layer -> scalar.
///
/// Parameter names: "backbone.*", "view.<name>.{weight,bias}",
/// "final.{weight,bias}".
template <typename T>
class FusionModel {
 public:
  FusionModel() = default;
  explicit FusionModel(const FusionConfig& cfg);

  void init(Rng& rng);

  const FusionConfig& config() const { return cfg_; }
  const std::vector<View>& views() const { return views_; }

  /// frames [T x S x S x ch] -> mean of per-frame backbone features.
  Tensor<T> clip_feature(const Tensor<T>& frames, ClipCache<T>* cache = nullptr) const;
  /// Accumulates parameter gradients; returns the frame-stack gradient.
  Tensor<T> clip_feature_backward(const ClipCache<T>& cache, const Tensor<T>& dfeature);

  /// `clips` holds one frame stack per active view, in views() order.
  T predict(const std::vector<Tensor<T>>& clips, PredictCache<T>* cache = nullptr) const;
  T predict(const VideoSample& sample) const;
  /// Accumulates parameter gradients for d loss / d prediction = `dpred`;
  /// returns per-view frame-stack gradients.
  std::vector<Tensor<T>> predict_backward(const PredictCache<T>& cache, T dpred);

  /// Frame stacks of `sample` for this model's views, converted to T.
  std::vector<Tensor<T>> select_clips(const VideoSample& sample) const;

  std::vector<Parameter<T>*> parameters();

  /// Writes "<path>" (named-tensor checkpoint) and "<path>.json" (config).
  void save(const std::filesystem::path& path);
  static FusionModel load(const std::filesystem::path& path);

  swin::Backbone<T> backbone;
  std::vector<Linear<T>> view_heads;  // views() order
  Linear<T> final_head;

 private:
  FusionConfig cfg_;
  std::vector<View> views_;
};

std::string describe(const FusionConfig& cfg);

}  // namespace jumpvel::fusion
