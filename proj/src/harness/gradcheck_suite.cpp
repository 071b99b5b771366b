#include "jumpvel/harness/gradcheck_suite.hpp"

#include <memory>

#include "jumpvel/fusion/model.hpp"
#include "jumpvel/swin/backbone.hpp"

namespace jumpvel::harness {
namespace {

using D = double;

void spread(const std::vector<Parameter<D>*>& params, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 0.3);
  for (auto* p : params) {
    const bool is_gamma = p->name.ends_with(".gamma");
    for (auto& v : p->value.values()) v = (is_gamma ? 1.0 : 0.0) + normal(rng);
  }
}

Tensor<D> random_tensor(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Tensor<D> t(shape);
  for (auto& v : t.values()) v = unif(rng);
  return t;
}

swin::SwinConfig small_swin() {
  swin::SwinConfig cfg;
  cfg.embed_dim = 8;
  return cfg;
}

}  // namespace

std::vector<CheckReport> run_gradcheck_suite(const GradCheckSuiteOptions& options) {
  Rng rng(options.seed);
  GradCheckOptions full;
  full.seed = options.seed;
  GradCheckOptions sampled = full;
  sampled.max_coords_per_tensor = options.model_coords;
  std::vector<CheckReport> reports;

  {
    auto layer = std::make_shared<Linear<D>>("linear", 6, 5);
    auto input = std::make_shared<Tensor<D>>();
    GradCheckFragment f{"linear",
                        [layer, input](const Tensor<D>& x) {
                          *input = x;
                          return layer->forward(x);
                        },
                        [layer, input](const Tensor<D>& dy) { return layer->backward(*input, dy); }, {}};
    layer->collect(f.parameters);
    spread(f.parameters, rng);
    reports.push_back(grad_check(f, random_tensor({4, 6}, rng), options.affine_tolerance, full));
  }
  {
    auto norm = std::make_shared<LayerNorm<D>>("layer_norm", 8);
    auto cache = std::make_shared<LayerNormCache<D>>();
    GradCheckFragment f{"layer_norm", [norm, cache](const Tensor<D>& x) { return norm->forward(x, cache.get()); },
                        [norm, cache](const Tensor<D>& dy) { return norm->backward(*cache, dy); }, {}};
    norm->collect(f.parameters);
    spread(f.parameters, rng);
    reports.push_back(grad_check(f, random_tensor({5, 8}, rng), options.tolerance, full));
  }
  for (bool masked : {false, true}) {
    auto attn = std::make_shared<swin::WindowAttention<D>>("attn", 8, 2, 2, true);
    auto cache = std::make_shared<swin::AttentionCache<D>>();
    auto mask = std::make_shared<Tensor<D>>(swin::build_attention_mask<D>(4, 4, 2, 1));
    const Tensor<D>* mask_ptr = masked ? mask.get() : nullptr;
    GradCheckFragment f{masked ? "msa_forward_shifted" : "msa_forward",
                        [attn, cache, mask, mask_ptr](const Tensor<D>& x) {
                          return attn->forward(x, mask_ptr, cache.get());
                        },
                        [attn, cache](const Tensor<D>& dy) { return attn->backward(*cache, dy); }, {}};
    attn->collect(f.parameters);
    spread(f.parameters, rng);
    reports.push_back(grad_check(f, random_tensor({4, 4, 8}, rng), options.tolerance, full));
  }
  {
    auto block = std::make_shared<swin::SwinBlock<D>>("block", 4, 8, small_swin());
    auto cache = std::make_shared<swin::SwinBlockCache<D>>();
    GradCheckFragment f{"swin_block", [block, cache](const Tensor<D>& x) { return block->forward(x, cache.get()); },
                        [block, cache](const Tensor<D>& dy) { return block->backward(*cache, dy); }, {}};
    block->collect(f.parameters);
    spread(f.parameters, rng);
    reports.push_back(grad_check(f, random_tensor({4, 4, 8}, rng), options.tolerance, full));
  }
  {
    auto merge = std::make_shared<swin::PatchMerge<D>>("merge", 8);
    auto gathered = std::make_shared<Tensor<D>>();
    GradCheckFragment f{"patch_merge",
                        [merge, gathered](const Tensor<D>& x) { return merge->forward(x, gathered.get()); },
                        [merge, gathered](const Tensor<D>& dy) { return merge->backward(*gathered, dy); }, {}};
    merge->collect(f.parameters);
    spread(f.parameters, rng);
    reports.push_back(grad_check(f, random_tensor({4, 4, 8}, rng), options.affine_tolerance, full));
  }
  {
    const swin::SwinConfig cfg;  // desk configuration
    auto backbone = std::make_shared<swin::Backbone<D>>("backbone.", cfg);
    auto cache = std::make_shared<swin::BackboneCache<D>>();
    GradCheckFragment f{"backbone",
                        [backbone, cache](const Tensor<D>& x) { return backbone->forward(x, cache.get()); },
                        [backbone, cache](const Tensor<D>& dy) { return backbone->backward(*cache, dy); }, {}};
    backbone->collect(f.parameters);
    spread(f.parameters, rng);
    const Tensor<D> frame = random_tensor({cfg.image_size, cfg.image_size, cfg.in_channels}, rng, 0.0, 1.0);
    reports.push_back(grad_check(f, frame, options.tolerance, sampled));
  }
  {
    fusion::FusionConfig cfg;
    cfg.views = ViewSelection::combined;
    auto model = std::make_shared<fusion::FusionModel<D>>(cfg);
    auto cache = std::make_shared<fusion::PredictCache<D>>();
    const std::size_t frames = 2;
    const std::size_t s = cfg.swin.image_size;
    const Shape clip_shape{frames, s, s, cfg.swin.in_channels};
    const std::size_t clip_size = shape_size(clip_shape);
    // The fragment input stacks the three clips: [views x T x S x S x ch].
    GradCheckFragment f{"fusion_predict",
                        [model, cache, clip_shape, clip_size](const Tensor<D>& x) {
                          std::vector<Tensor<D>> clips;
                          for (std::size_t v = 0; v < 3; ++v) {
                            clips.emplace_back(clip_shape, std::vector<D>(x.data() + v * clip_size,
                                                                          x.data() + (v + 1) * clip_size));
                          }
                          return Tensor<D>({1}, model->predict(clips, cache.get()));
                        },
                        [model, cache, clip_size](const Tensor<D>& dy) {
                          const auto dclips = model->predict_backward(*cache, dy[0]);
                          Tensor<D> dx({3 * clip_size});
                          for (std::size_t v = 0; v < 3; ++v) {
                            std::copy(dclips[v].data(), dclips[v].data() + clip_size, dx.data() + v * clip_size);
                          }
                          return dx.reshaped({3, clip_size});
                        },
                        model->parameters()};
    spread(f.parameters, rng);
    const Tensor<D> clips = random_tensor({3, clip_size}, rng, 0.0, 1.0);
    reports.push_back(grad_check(f, clips, options.tolerance, sampled));
  }
  return reports;
}

}  // namespace jumpvel::harness
