#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "jumpvel/baselines/svr.hpp"

namespace jumpvel::test {

// Exhaustive face enumeration for the epsilon-SVR dual
//   max -1/2 b'Kb - eps |b|_1 + y'b   s.t. sum b = 0, -C <= b <= C.
// Each coordinate is at -C, 0 or +C, or free with a fixed sign. On a face the
// optimum solves the stationarity system K_FF b_F + lambda 1 = y_F - eps s_F
// - K_FB b_B with sum b = 0. The best feasible face optimum is the global one.
inline double brute_force_dual(const Tensor<double>& K, const std::vector<double>& y, double C, double eps) {
  const std::size_t n = y.size();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 5;
  double best = -1e300;
  for (std::size_t code = 0; code < combos; ++code) {
    std::vector<int> state(n);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i, c /= 5) state[i] = static_cast<int>(c % 5);
    // 0: -C, 1: 0, 2: +C, 3: free positive, 4: free negative
    std::vector<double> beta(n, 0.0);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 0) beta[i] = -C;
      if (state[i] == 2) beta[i] = C;
      if (state[i] >= 3) free.push_back(i);
    }
    const std::size_t f = free.size();
    if (f > 0) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(f + 1, f + 1);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f + 1);
      double fixed_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) fixed_sum += beta[i];
      for (std::size_t a = 0; a < f; ++a) {
        const std::size_t i = free[a];
        const double s = state[i] == 3 ? 1.0 : -1.0;
        double r = y[i] - eps * s;
        for (std::size_t j = 0; j < n; ++j) r -= K(i, j) * beta[j];
        for (std::size_t b = 0; b < f; ++b) A(a, b) = K(i, free[b]);
        A(a, f) = 1.0;
        A(f, a) = 1.0;
        rhs(a) = r;
      }
      rhs(f) = -fixed_sum;
      const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
      if ((A * sol - rhs).norm() > 1e-9) continue;
      bool ok = true;
      for (std::size_t a = 0; a < f; ++a) {
        const double v = sol(a);
        const bool pos = state[free[a]] == 3;
        if (pos ? !(v >= -1e-12 && v <= C + 1e-12) : !(v <= 1e-12 && v >= -C - 1e-12)) ok = false;
        beta[free[a]] = v;
      }
      if (!ok) continue;
    } else {
      double sum = 0.0;
      for (double b : beta) sum += b;
      if (std::abs(sum) > 1e-12) continue;
    }
    best = std::max(best, baselines::svr_dual_objective(K, y, beta, eps));
  }
  return best;
}

inline double max_kkt_violation(const Tensor<double>& K, const std::vector<double>& y, const baselines::SvrSolution& s, double C,
                         double eps) {
  double worst = 0.0;
  const double tiny = 1e-12 * C;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double f = s.bias;
    for (std::size_t j = 0; j < y.size(); ++j) f += K(i, j) * s.beta[j];
    const double r = y[i] - f;
    const double b = s.beta[i];
    double v = 0.0;
    if (std::abs(b) <= tiny) {
      v = std::max(0.0, std::abs(r) - eps);
    } else if (b >= C - tiny) {
      v = std::max(0.0, eps - r);
    } else if (b <= -C + tiny) {
      v = std::max(0.0, r + eps);
    } else {
      v = std::abs(r - (b > 0 ? eps : -eps));
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace jumpvel::test
