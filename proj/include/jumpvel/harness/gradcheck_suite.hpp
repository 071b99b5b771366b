#pragma once

#include <vector>

#include "jumpvel/numerics/grad_check.hpp"

namespace jumpvel::harness {

struct GradCheckSuiteOptions {
  double tolerance = 1e-4;         // fragments with non-linearities
  double affine_tolerance = 1e-6;  // purely affine fragments
  std::uint64_t seed = 0;
  /// Coordinates checked per tensor for the two full-model fragments.
  std::size_t model_coords = 16;
};

/// Finite-difference checks at 64-bit of: linear, layer_norm, msa_forward
/// (plain and masked), swin_block, patch_merge, backbone and fusion predict.
/// Parameters are drawn with O(1) spread so every path carries signal.
std::vector<CheckReport> run_gradcheck_suite(const GradCheckSuiteOptions& options = {});

}  // namespace jumpvel::harness
