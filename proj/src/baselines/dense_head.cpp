#include "jumpvel/baselines/dense_head.hpp"

#include <cmath>
#include <optional>

#include "jumpvel/data/sampler.hpp"
#include "jumpvel/numerics/adam.hpp"

namespace jumpvel::baselines {
namespace {

Tensor<double> gather_rows(const Tensor<double>& X, const std::vector<std::size_t>& rows) {
  const std::size_t f = X.dim(1);
  Tensor<double> out({rows.size(), f});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(X.data() + rows[r] * f, X.data() + (rows[r] + 1) * f, out.data() + r * f);
  }
  return out;
}

}  // namespace

double DenseHead::predict(const double* x, std::size_t dim) const {
  if (dim != layer.in_features()) {
    throw DimensionError("dense head: feature dim " + std::to_string(dim) + " != " +
                         std::to_string(layer.in_features()));
  }
  double out = layer.bias.value[0];
  for (std::size_t k = 0; k < dim; ++k) out += layer.weight.value[k] * x[k];
  return out;
}

DenseHead dense_head_fit(const Tensor<double>& X, const std::vector<double>& y, const DenseHeadConfig& cfg) {
  if (X.rank() != 2) throw DimensionError("dense_head_fit: X must be [N x F], got " + to_string(X.shape()));
  const std::size_t n = X.dim(0);
  if (n == 0) throw InputError("dense_head_fit: no training points");
  if (y.size() != n) throw DimensionError("dense_head_fit: target count does not match rows");
  if (!(cfg.lr >= 0.0)) throw ConfigError("dense_head_fit: lr must be >= 0");

  DenseHead head{Linear<double>("dense", X.dim(1), 1), {}};
  std::vector<Parameter<double>*> params;
  head.layer.collect(params);
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  Adam<double> adam(params, adam_cfg);

  const Tensor<double> all_y({n, 1}, y);
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  std::optional<BalancedSampler> sampler;
  if (cfg.batch > 0) sampler.emplace(ids, y, SamplerConfig{cfg.bins, cfg.batch, cfg.seed});
  const std::size_t steps = cfg.batch > 0 ? (n + cfg.batch - 1) / cfg.batch : 1;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t s = 0; s < steps; ++s) {
      Tensor<double> xb = X;
      Tensor<double> yb = all_y;
      if (sampler) {
        const auto batch = sampler->next_batch();
        xb = gather_rows(X, batch);
        yb = gather_rows(all_y, batch);
      }
      adam.zero_grad();
      const auto pred = head.layer.forward(xb);
      const auto loss = l1_loss(pred, yb);
      if (!std::isfinite(loss.loss)) {
        throw NumericError("dense_head_fit: loss is not finite at epoch " + std::to_string(epoch));
      }
      head.layer.backward(xb, loss.grad);
      adam.step();
    }
    const auto full = l1_loss(head.layer.forward(X), all_y);
    if (!std::isfinite(full.loss)) {
      throw NumericError("dense_head_fit: loss is not finite at epoch " + std::to_string(epoch));
    }
    head.loss_trace.push_back(full.loss);
  }
  return head;
}

}  // namespace jumpvel::baselines
