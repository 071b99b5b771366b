#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumpvel/data/dataset.hpp"
#include "jumpvel/fusion/model.hpp"

namespace jumpvel::harness {

using Model = fusion::FusionModel<float>;

struct TrainConfig {
  std::size_t epochs = 100;
  double lr = 1e-3;
  std::size_t batch = 8;
  std::size_t bins = 10;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean batch L1 per epoch
};

/// Stops glibc from returning freed heap to the OS after every step. Training
/// allocates and frees the same few hundred KB per sample, and the default
/// trim policy turns that into page faults. Process-wide; call it from main.
void keep_heap_resident();

/// Every sample of `index`, loaded with the views of `selection`.
std::vector<VideoSample> load_samples(const DatasetIndex& index, ViewSelection selection, unsigned threads = 1);

/// Balanced mini-batch L1 training with Adam on samples[ids]. Gradients are
/// reduced in batch order, so the result does not depend on cfg.threads.
TrainResult train(Model& model, const std::vector<VideoSample>& samples, const std::vector<std::size_t>& ids,
                  const TrainConfig& cfg);

struct Evaluation {
  std::vector<double> actual;
  std::vector<double> predicted;
  double mae = 0.0;
  std::optional<double> r;  // empty when undefined
  std::string r_error;

  /// Throws UndefinedCorrelationError if R is undefined.
  double require_r() const;
};

Evaluation evaluate(const Model& model, const std::vector<VideoSample>& samples, const std::vector<std::size_t>& ids,
                    unsigned threads = 1);

/// Metrics of already computed (actual, predicted) pairs.
Evaluation score(std::vector<double> actual, std::vector<double> predicted);

}  // namespace jumpvel::harness
