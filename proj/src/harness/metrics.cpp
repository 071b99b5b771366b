#include "jumpvel/harness/metrics.hpp"

#include <cmath>
#include <string>

#include "jumpvel/errors.hpp"

namespace jumpvel::harness {

double mae(const std::vector<double>& pred, const std::vector<double>& target) {
  if (pred.size() != target.size()) {
    throw DimensionError("mae: " + std::to_string(pred.size()) + " predictions vs " + std::to_string(target.size()) +
                         " targets");
  }
  if (pred.empty()) throw InputError("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - target[i]);
  return sum / static_cast<double>(pred.size());
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw DimensionError("pearson_r: lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw InputError("pearson_r: need at least 2 pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError(std::string("pearson_r: ") + (sxx == 0.0 ? "first" : "second") +
                                    " input is constant");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::fmax(-1.0, std::fmin(1.0, r));
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) throw InputError("mean_std: empty input");
  MeanStd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace jumpvel::harness
