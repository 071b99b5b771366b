#pragma once

#include <vector>

namespace jumpvel::harness {

/// Mean absolute error; throws on length mismatch or empty input.
double mae(const std::vector<double>& pred, const std::vector<double>& target);

/// Sample Pearson correlation. Throws UndefinedCorrelationError when either
/// input is constant and InputError when fewer than two pairs are given.
double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation; 0 for a single value
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace jumpvel::harness
