#include "jumpvel/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace jumpvel {
namespace {

Tensor<double> checked_forward(GradCheckFragment& f, const Tensor<double>& x) {
  Tensor<double> out = f.forward(x);
  if (!out.all_finite()) throw NumericError("grad_check: non-finite output from '" + f.name + "'");
  return out;
}

double weighted_difference(const Tensor<double>& plus, const Tensor<double>& minus, const Tensor<double>& weights,
                           double realized_step) {
  double acc = 0.0;
  for (std::size_t j = 0; j < plus.size(); ++j) {
    const double d = plus[j] - minus[j];
    if (d != 0.0) acc += weights[j] * (d / realized_step);
  }
  return acc;
}

double compare(const Tensor<double>& analytic, const Tensor<double>& numeric, const std::vector<std::size_t>& coords) {
  double max_diff = 0.0;
  double scale = 0.0;
  for (auto i : coords) {
    max_diff = std::max(max_diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  if (max_diff == 0.0) return 0.0;
  return scale > 0.0 ? max_diff / scale : max_diff;
}

std::vector<std::size_t> pick_coords(std::size_t n, std::size_t limit) {
  std::vector<std::size_t> coords;
  if (limit == 0 || limit >= n) {
    coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    return coords;
  }
  for (std::size_t k = 0; k < limit; ++k) coords.push_back(k * n / limit);
  return coords;
}

}  // namespace

CheckReport grad_check(GradCheckFragment& fragment, const Tensor<double>& input, double tolerance,
                       const GradCheckOptions& options) {
  if (!input.all_finite()) throw NumericError("grad_check: non-finite input to '" + fragment.name + "'");
  const double h = options.step;

  for (auto* p : fragment.parameters) p->zero_grad();
  const Tensor<double> out = checked_forward(fragment, input);
  Tensor<double> weights(out.shape());
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& w : weights.values()) w = unif(rng);
  const Tensor<double> input_grad = fragment.backward(weights);
  require_same_shape(input_grad.shape(), input.shape(), "grad_check '" + fragment.name + "' input gradient");

  CheckReport report;
  report.fragment = fragment.name;
  report.tolerance = tolerance;

  for (auto* p : fragment.parameters) {
    const Tensor<double> analytic = p->grad;
    Tensor<double> numeric(analytic.shape());
    const auto coords = pick_coords(p->value.size(), options.max_coords_per_tensor);
    for (auto i : coords) {
      const double saved = p->value[i];
      const double up = saved + h;
      const double down = saved - h;
      p->value[i] = up;
      const Tensor<double> plus = checked_forward(fragment, input);
      p->value[i] = down;
      const Tensor<double> minus = checked_forward(fragment, input);
      p->value[i] = saved;
      numeric[i] = weighted_difference(plus, minus, weights, up - down);
    }
    report.entries.push_back({p->name, compare(analytic, numeric, coords)});
  }

  {
    Tensor<double> x = input;
    Tensor<double> numeric(input.shape());
    const auto coords = pick_coords(x.size(), options.max_coords_per_tensor);
    for (auto i : coords) {
      const double saved = x[i];
      const double up = saved + h;
      const double down = saved - h;
      x[i] = up;
      const Tensor<double> plus = checked_forward(fragment, x);
      x[i] = down;
      const Tensor<double> minus = checked_forward(fragment, x);
      x[i] = saved;
      numeric[i] = weighted_difference(plus, minus, weights, up - down);
    }
    report.entries.push_back({"input", compare(input_grad, numeric, coords)});
  }

  for (const auto& e : report.entries) report.max_rel_error = std::max(report.max_rel_error, e.max_rel_error);
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace jumpvel
