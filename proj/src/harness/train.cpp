#include "jumpvel/harness/train.hpp"

#include <cmath>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "jumpvel/data/sampler.hpp"
#include "jumpvel/harness/metrics.hpp"
#include "jumpvel/numerics/adam.hpp"
#include "jumpvel/parallel.hpp"

namespace jumpvel::harness {

void keep_heap_resident() {
#if defined(__GLIBC__)
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("train: epochs must be >= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train: lr must be finite and >= 0");
  if (batch == 0) throw ConfigError("train: batch must be >= 1");
  if (bins == 0) throw ConfigError("train: bins must be >= 1");
}

std::vector<VideoSample> load_samples(const DatasetIndex& index, ViewSelection selection, unsigned threads) {
  std::vector<VideoSample> out(index.records.size());
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = load_sample(index, i, selection); });
  return out;
}

TrainResult train(Model& model, const std::vector<VideoSample>& samples, const std::vector<std::size_t>& ids,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (ids.empty()) throw InputError("train: empty training split");
  std::vector<double> labels;
  labels.reserve(ids.size());
  for (auto id : ids) {
    if (id >= samples.size()) throw InputError("train: sample id " + std::to_string(id) + " out of range");
    samples[id].require_views(model.config().views);
    labels.push_back(samples[id].velocity);
  }

  auto params = model.parameters();
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  Adam<float> adam(params, adam_cfg);
  BalancedSampler sampler(ids, labels, SamplerConfig{cfg.bins, cfg.batch, cfg.seed});

  // One replica per worker; each sample's gradient lands in its own slot and
  // slots are summed in batch order.
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.batch)));
  std::vector<Model> replicas(workers, model);
  std::vector<std::vector<Parameter<float>*>> replica_params;
  for (auto& r : replicas) replica_params.push_back(r.parameters());
  std::vector<std::vector<std::vector<float>>> slot_grads(cfg.batch);
  std::vector<float> slot_loss(cfg.batch);

  const std::size_t steps = (ids.size() + cfg.batch - 1) / cfg.batch;
  const float scale = 1.0f / static_cast<float>(cfg.batch);
  TrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
      const auto batch = sampler.next_batch();
      const std::size_t per = (batch.size() + workers - 1) / workers;
      parallel_for(workers, workers, [&](std::size_t w) {
        Model& replica = replicas[w];
        auto& rp = replica_params[w];
        for (std::size_t b = w * per; b < std::min(batch.size(), (w + 1) * per); ++b) {
          const VideoSample& s = samples[batch[b]];
          for (auto* p : rp) p->zero_grad();
          fusion::PredictCache<float> cache;
          const float pred = replica.predict(replica.select_clips(s), &cache);
          if (!std::isfinite(pred)) {
            throw NumericError("train: non-finite prediction at epoch " + std::to_string(epoch));
          }
          const float diff = pred - static_cast<float>(s.velocity);
          slot_loss[b] = std::abs(diff);
          const float dpred = diff > 0.0f ? scale : diff < 0.0f ? -scale : 0.0f;
          replica.predict_backward(cache, dpred);
          auto& slot = slot_grads[b];
          slot.resize(rp.size());
          for (std::size_t k = 0; k < rp.size(); ++k) {
            slot[k].assign(rp[k]->grad.data(), rp[k]->grad.data() + rp[k]->grad.size());
          }
        }
      });
      adam.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        batch_loss += slot_loss[b];
        for (std::size_t k = 0; k < params.size(); ++k) {
          float* g = params[k]->grad.data();
          const auto& src = slot_grads[b][k];
          for (std::size_t i = 0; i < src.size(); ++i) g[i] += src[i];
        }
      }
      batch_loss /= static_cast<double>(batch.size());
      if (!std::isfinite(batch_loss)) throw NumericError("train: loss is NaN at epoch " + std::to_string(epoch));
      epoch_loss += batch_loss;
      adam.step();
      for (auto& rp : replica_params) {
        for (std::size_t k = 0; k < params.size(); ++k) rp[k]->value = params[k]->value;
      }
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(steps));
  }
  return result;
}

double Evaluation::require_r() const {
  if (!r) throw UndefinedCorrelationError(r_error.empty() ? "R undefined" : r_error);
  return *r;
}

Evaluation score(std::vector<double> actual, std::vector<double> predicted) {
  Evaluation e;
  e.mae = mae(predicted, actual);
  try {
    e.r = pearson_r(actual, predicted);
  } catch (const UndefinedCorrelationError& err) {
    e.r_error = err.what();
  } catch (const InputError& err) {
    e.r_error = err.what();
  }
  e.actual = std::move(actual);
  e.predicted = std::move(predicted);
  return e;
}

Evaluation evaluate(const Model& model, const std::vector<VideoSample>& samples, const std::vector<std::size_t>& ids,
                    unsigned threads) {
  if (ids.empty()) throw InputError("evaluate: empty test split");
  std::vector<double> actual(ids.size()), predicted(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const VideoSample& s = samples.at(ids[i]);
    actual[i] = s.velocity;
    predicted[i] = model.predict(model.select_clips(s));
  });
  return score(std::move(actual), std::move(predicted));
}

}  // namespace jumpvel::harness
