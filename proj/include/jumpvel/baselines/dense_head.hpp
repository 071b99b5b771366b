#pragma once

#include <cstdint>
#include <vector>

#include "jumpvel/numerics/layers.hpp"

namespace jumpvel::baselines {

struct DenseHeadConfig {
  std::size_t epochs = 100;
  double lr = 1e-3;
  std::size_t batch = 0;  // 0 = full batch; otherwise balanced mini-batches
  std::size_t bins = 10;
  std::uint64_t seed = 0;
};

/// Affine F -> 1 regressor over frozen features, zero-initialized.
struct DenseHead {
  Linear<double> layer;
  std::vector<double> loss_trace;  // full training-set L1 after each epoch

  double predict(const double* x, std::size_t dim) const;
};

/// Trains with L1 loss and Adam. Throws NumericError if the loss becomes NaN.
DenseHead dense_head_fit(const Tensor<double>& X, const std::vector<double>& y, const DenseHeadConfig& cfg = {});

}  // namespace jumpvel::baselines
