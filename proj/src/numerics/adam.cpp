#include "jumpvel/numerics/adam.hpp"

#include <cmath>

namespace jumpvel {

template <typename T>
AdamState<T>::AdamState(const Shape& shape, const AdamConfig& cfg)
    : m(shape), v(shape), lr(cfg.lr), beta1(cfg.beta1), beta2(cfg.beta2), eps_hat(cfg.eps_hat) {
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam: beta1 and beta2 must lie in (0, 1)");
  }
}

template <typename T>
void adam_step(Parameter<T>& p, AdamState<T>& s) {
  require_same_shape(s.m.shape(), p.value.shape(), "adam_step: state for '" + p.name + "'");
  require_same_shape(p.grad.shape(), p.value.shape(), "adam_step: gradient of '" + p.name + "'");
  ++s.step;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  const T b1 = static_cast<T>(s.beta1);
  const T b2 = static_cast<T>(s.beta2);
  const T step_size = static_cast<T>(s.lr / bc1);
  const T inv_sqrt_bc2 = static_cast<T>(1.0 / std::sqrt(bc2));
  const T eps = static_cast<T>(s.eps_hat);
  T* x = p.value.data();
  const T* g = p.grad.data();
  T* m = s.m.data();
  T* v = s.v.data();
  const std::size_t n = p.value.size();
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (T{1} - b1) * g[i];
    v[i] = b2 * v[i] + (T{1} - b2) * g[i] * g[i];
    x[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_sqrt_bc2 + eps);
  }
}

template <typename T>
Adam<T>::Adam(std::vector<Parameter<T>*> params, const AdamConfig& cfg) : cfg_(cfg), params_(std::move(params)) {
  states_.reserve(params_.size());
  for (auto* p : params_) states_.emplace_back(p->value.shape(), cfg_);
}

template <typename T>
void Adam<T>::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) adam_step(*params_[i], states_[i]);
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(Parameter<float>&, AdamState<float>&);
template void adam_step(Parameter<double>&, AdamState<double>&);
template class Adam<float>;
template class Adam<double>;

}  // namespace jumpvel
