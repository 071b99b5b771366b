#include "jumpvel/fusion/model.hpp"

#include <fstream>
#include <json.hpp>

#include "jumpvel/swin/checkpoint.hpp"

namespace jumpvel::fusion {
namespace {

nlohmann::json config_to_json(const FusionConfig& cfg) {
  const auto& s = cfg.swin;
  nlohmann::json j;
  j["image_size"] = s.image_size;
  j["in_channels"] = s.in_channels;
  j["patch_size"] = s.patch_size;
  j["embed_dim"] = s.embed_dim;
  j["num_blocks"] = s.num_blocks;
  j["heads"] = s.heads;
  j["window"] = s.window;
  j["mlp_ratio"] = s.mlp_ratio;
  j["merge_after_block"] = s.merge_after_block;
  j["use_rel_pos_bias"] = s.use_rel_pos_bias;
  j["activation"] = to_string(s.activation);
  j["views"] = to_string(cfg.views);
  j["view_dim"] = cfg.view_dim;
  return j;
}

FusionConfig config_from_json(const nlohmann::json& j) {
  FusionConfig cfg;
  auto& s = cfg.swin;
  s.image_size = j.at("image_size").get<std::size_t>();
  s.in_channels = j.at("in_channels").get<std::size_t>();
  s.patch_size = j.at("patch_size").get<std::size_t>();
  s.embed_dim = j.at("embed_dim").get<std::size_t>();
  s.num_blocks = j.at("num_blocks").get<std::size_t>();
  s.heads = j.at("heads").get<std::size_t>();
  s.window = j.at("window").get<std::size_t>();
  s.mlp_ratio = j.at("mlp_ratio").get<double>();
  s.merge_after_block = j.at("merge_after_block").get<std::vector<bool>>();
  s.use_rel_pos_bias = j.at("use_rel_pos_bias").get<bool>();
  s.activation = parse_activation(j.at("activation").get<std::string>());
  cfg.views = parse_view_selection(j.at("views").get<std::string>());
  cfg.view_dim = j.at("view_dim").get<std::size_t>();
  return cfg;
}

}  // namespace

void FusionConfig::validate() const {
  swin.validate();
  if (view_dim == 0) throw ConfigError("view_dim must be >= 1");
}

std::string describe(const FusionConfig& cfg) {
  return cfg.swin.describe() + " views=" + to_string(cfg.views) + " view_dim=" + std::to_string(cfg.view_dim);
}

template <typename T>
FusionModel<T>::FusionModel(const FusionConfig& cfg) : cfg_(cfg), views_(active_views(cfg.views)) {
  cfg_.validate();
  backbone = swin::Backbone<T>("backbone.", cfg_.swin);
  const std::size_t d = cfg_.swin.feature_dim();
  for (View v : views_) view_heads.emplace_back("view." + to_string(v), d, cfg_.view_dim);
  final_head = Linear<T>("final", views_.size() * cfg_.view_dim, 1);
}

template <typename T>
void FusionModel<T>::init(Rng& rng) {
  backbone.init(rng);
  for (auto& h : view_heads) h.init(rng);
  final_head.init(rng);
}

template <typename T>
std::vector<Parameter<T>*> FusionModel<T>::parameters() {
  std::vector<Parameter<T>*> out;
  backbone.collect(out);
  for (auto& h : view_heads) h.collect(out);
  final_head.collect(out);
  return out;
}

template <typename T>
Tensor<T> FusionModel<T>::clip_feature(const Tensor<T>& frames, ClipCache<T>* cache) const {
  if (frames.rank() != 4) throw DimensionError("clip_feature: expected [T x S x S x ch], got " + to_string(frames.shape()));
  const std::size_t count = frames.dim(0);
  if (count == 0) throw InputError("clip_feature: empty clip");
  const Tensor<T> per_frame = backbone.forward(frames, cache ? &cache->backbone : nullptr);
  if (cache) cache->frames = count;
  const std::size_t d = cfg_.swin.feature_dim();
  Tensor<T> feature({d});
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t i = 0; i < d; ++i) feature[i] += per_frame[t * d + i];
  }
  const T inv = T{1} / static_cast<T>(count);
  for (auto& v : feature.values()) v *= inv;
  return feature;
}

template <typename T>
Tensor<T> FusionModel<T>::clip_feature_backward(const ClipCache<T>& cache, const Tensor<T>& dfeature) {
  const std::size_t count = cache.frames;
  const std::size_t d = dfeature.size();
  const T inv = T{1} / static_cast<T>(count);
  Tensor<T> dper_frame({count, d});
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t i = 0; i < d; ++i) dper_frame[t * d + i] = dfeature[i] * inv;
  }
  return backbone.backward(cache.backbone, dper_frame);
}

template <typename T>
T FusionModel<T>::predict(const std::vector<Tensor<T>>& clips, PredictCache<T>* cache) const {
  if (clips.size() != views_.size()) {
    throw InputError("predict: model expects " + std::to_string(views_.size()) + " view(s), got " +
                     std::to_string(clips.size()));
  }
  const std::size_t k = views_.size();
  const std::size_t dv = cfg_.view_dim;
  Tensor<T> concat({k * dv});
  if (cache) {
    cache->clips.resize(k);
    cache->features.resize(k);
  }
  for (std::size_t v = 0; v < k; ++v) {
    Tensor<T> feature = clip_feature(clips[v], cache ? &cache->clips[v] : nullptr);
    const Tensor<T> head = view_heads[v].forward(feature.reshaped({1, feature.size()}));
    std::copy(head.data(), head.data() + dv, concat.data() + v * dv);
    if (cache) cache->features[v] = std::move(feature);
  }
  const Tensor<T> out = final_head.forward(concat.reshaped({1, k * dv}));
  if (cache) cache->concat = std::move(concat);
  return out[0];
}

template <typename T>
std::vector<Tensor<T>> FusionModel<T>::select_clips(const VideoSample& sample) const {
  sample.require_views(cfg_.views);
  std::vector<Tensor<T>> clips;
  for (View v : views_) {
    if constexpr (std::is_same_v<T, float>) {
      clips.push_back(sample.views.at(v));
    } else {
      clips.push_back(sample.views.at(v).template cast<T>());
    }
  }
  return clips;
}

template <typename T>
T FusionModel<T>::predict(const VideoSample& sample) const {
  return predict(select_clips(sample));
}

template <typename T>
std::vector<Tensor<T>> FusionModel<T>::predict_backward(const PredictCache<T>& cache, T dpred) {
  const std::size_t k = views_.size();
  const std::size_t dv = cfg_.view_dim;
  const Tensor<T> dconcat = final_head.backward(cache.concat.reshaped({1, k * dv}), Tensor<T>({1, 1}, dpred));
  std::vector<Tensor<T>> dclips;
  for (std::size_t v = 0; v < k; ++v) {
    Tensor<T> dhead({1, dv});
    std::copy(dconcat.data() + v * dv, dconcat.data() + (v + 1) * dv, dhead.data());
    const Tensor<T>& feature = cache.features[v];
    const Tensor<T> dfeature = view_heads[v].backward(feature.reshaped({1, feature.size()}), dhead);
    dclips.push_back(clip_feature_backward(cache.clips[v], dfeature.reshaped({feature.size()})));
  }
  return dclips;
}

template <typename T>
void FusionModel<T>::save(const std::filesystem::path& path) {
  swin::write_checkpoint(path, parameters());
  const auto json_path = std::filesystem::path(path.string() + ".json");
  std::ofstream os(json_path);
  if (!os) throw IoError("cannot open '" + json_path.string() + "' for writing");
  os << config_to_json(cfg_).dump(2) << '\n';
}

template <typename T>
FusionModel<T> FusionModel<T>::load(const std::filesystem::path& path) {
  const auto json_path = std::filesystem::path(path.string() + ".json");
  std::ifstream is(json_path);
  if (!is) throw IoError("cannot open '" + json_path.string() + "'");
  FusionConfig cfg;
  try {
    cfg = config_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(json_path.string() + ": " + e.what());
  }
  FusionModel<T> model(cfg);
  swin::load_parameters(swin::read_checkpoint(path), model.parameters(), path.string());
  return model;
}

template class FusionModel<float>;
template class FusionModel<double>;

}  // namespace jumpvel::fusion
