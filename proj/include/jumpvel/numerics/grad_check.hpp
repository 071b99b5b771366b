#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel {

/// A 64-bit model piece under test. `backward` is always called right after
/// `forward` on the same input and must accumulate into the parameter grads.
struct GradCheckFragment {
  std::string name;
  std::function<Tensor<double>(const Tensor<double>&)> forward;
  std::function<Tensor<double>(const Tensor<double>&)> backward;
  std::vector<Parameter<double>*> parameters;
};

struct GradCheckEntry {
  std::string name;  // parameter name, or "input"
  double max_rel_error = 0.0;
};

struct CheckReport {
  std::string fragment;
  double tolerance = 0.0;
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradCheckOptions {
  double step = 1e-5;
  std::uint64_t seed = 0;
  /// Check at most this many coordinates per tensor (0 = all), spread evenly.
  std::size_t max_coords_per_tensor = 0;
};

/// Compares analytic gradients of L = sum(r * forward(input)), with r fixed
/// uniform(-1, 1) weights, against central differences on every parameter
/// and on the input.
///
/// Per tensor the error is max_i |analytic_i - numeric_i| divided by the
/// larger of the two gradients' max-norms. The numeric derivative divides by
/// the realized step (x + h) - (x - h), so exactly linear maps report 0.
CheckReport grad_check(GradCheckFragment& fragment, const Tensor<double>& input, double tolerance,
                       const GradCheckOptions& options = {});

}  // namespace jumpvel
