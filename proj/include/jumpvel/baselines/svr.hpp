#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel::baselines {

struct SvrConfig {
  std::string kernel = "rbf";
  int degree = 3;      // polynomial kernels only; inert for rbf
  double coef0 = 0.0;  // polynomial/sigmoid kernels only; inert for rbf
  double tol = 1e-4;
  double C = 1.0;
  double epsilon = 0.01;
  std::optional<double> gamma;  // empty = "scale": 1 / (F * var(X))
  std::size_t max_passes = 10000;

  void validate() const;
};

/// 1 / (F * var(X)) over all entries of X, or 1 when X is constant.
double scale_gamma(const Tensor<double>& X);

double rbf_kernel(const double* u, const double* v, std::size_t dim, double gamma);
Tensor<double> rbf_gram(const Tensor<double>& X, double gamma);

/// Dual solution over all training points, before support-vector compression.
struct SvrSolution {
  std::vector<double> beta;  // alpha - alpha*
  double bias = 0.0;
  double gamma = 0.0;
  double gap = 0.0;  // final maximal KKT violation
  std::size_t iterations = 0;
};

/// The dual objective -1/2 b'Kb - eps sum|b| + y'b.
double svr_dual_objective(const Tensor<double>& K, const std::vector<double>& y, const std::vector<double>& beta,
                          double epsilon);

/// Pairwise coordinate ascent with second-order working-set selection.
SvrSolution svr_solve(const Tensor<double>& X, const std::vector<double>& y, const SvrConfig& cfg);

struct SvrModel {
  SvrConfig config;
  double gamma = 0.0;
  Tensor<double> support;  // [M x F]
  Tensor<double> beta;     // [M]
  double bias = 0.0;

  std::size_t feature_dim() const { return support.dim(1); }
};

SvrModel svr_fit(const Tensor<double>& X, const std::vector<double>& y, const SvrConfig& cfg = {});
double svr_predict(const SvrModel& m, const Tensor<double>& x);
double svr_predict(const SvrModel& m, const double* x, std::size_t dim);

/// "SVRM" container, little-endian.
void write_svr(std::ostream& os, const SvrModel& m);
void write_svr(const std::filesystem::path& path, const SvrModel& m);
SvrModel read_svr(std::istream& is, const std::string& context = "svr model");
SvrModel read_svr(const std::filesystem::path& path);

}  // namespace jumpvel::baselines
