#pragma once

#include <vector>

#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

/// Moment estimates for one parameter.
template <typename T>
struct AdamState {
  std::size_t step = 0;
  Tensor<T> m;
  Tensor<T> v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  AdamState() = default;
  AdamState(const Shape& shape, const AdamConfig& cfg);
};

/// One bias-corrected Adam update of `p.value` from `p.grad`.
template <typename T>
void adam_step(Parameter<T>& p, AdamState<T>& s);

/// Adam over a fixed list of parameters; the list order is the update order.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Parameter<T>*> params, const AdamConfig& cfg);

  void step();
  void zero_grad();
  const AdamConfig& config() const { return cfg_; }
  const std::vector<AdamState<T>>& states() const { return states_; }

 private:
  AdamConfig cfg_;
  std::vector<Parameter<T>*> params_;
  std::vector<AdamState<T>> states_;
};

}  // namespace jumpvel
