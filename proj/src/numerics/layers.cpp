#include "jumpvel/numerics/layers.hpp"

namespace jumpvel {

template <typename T>
void init_trunc_normal(Tensor<T>& t, double sigma, Rng& rng) {
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& x : t.values()) {
    double v = normal(rng);
    while (std::abs(v) > 2.0 * sigma) v = normal(rng);
    x = static_cast<T>(v);
  }
}

template void init_trunc_normal(Tensor<float>&, double, Rng&);
template void init_trunc_normal(Tensor<double>&, double, Rng&);

}  // namespace jumpvel
