#include "jumpvel/baselines/svr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "jumpvel/numerics/vten.hpp"

namespace jumpvel::baselines {
namespace {

constexpr double kTau = 1e-12;  // floor for non-positive curvature

void require_finite(const Tensor<double>& X, const std::vector<double>& y) {
  if (!X.all_finite()) throw InputError("svr_fit: non-finite feature value");
  for (double v : y) {
    if (!std::isfinite(v)) throw InputError("svr_fit: non-finite target value");
  }
}

}  // namespace

void SvrConfig::validate() const {
  if (kernel != "rbf") throw ConfigError("svr: unsupported kernel '" + kernel + "' (only rbf)");
  if (!(C > 0.0)) throw ConfigError("svr: C must be positive");
  if (!(epsilon >= 0.0)) throw ConfigError("svr: epsilon must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("svr: tol must be positive");
  if (gamma && !(*gamma > 0.0)) throw ConfigError("svr: gamma must be positive");
  if (max_passes == 0) throw ConfigError("svr: max_passes must be >= 1");
}

double scale_gamma(const Tensor<double>& X) {
  if (X.rank() != 2 || X.size() == 0) throw DimensionError("scale_gamma: expected a non-empty [N x F] matrix");
  double mean = 0.0;
  for (double v : X.values()) mean += v;
  mean /= static_cast<double>(X.size());
  double var = 0.0;
  for (double v : X.values()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(X.size());
  return var > 0.0 ? 1.0 / (static_cast<double>(X.dim(1)) * var) : 1.0;
}

double rbf_kernel(const double* u, const double* v, std::size_t dim, double gamma) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = u[k] - v[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

Tensor<double> rbf_gram(const Tensor<double>& X, double gamma) {
  const std::size_t n = X.dim(0);
  const std::size_t f = X.dim(1);
  Tensor<double> K({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      K(i, j) = K(j, i) = rbf_kernel(X.data() + i * f, X.data() + j * f, f, gamma);
    }
  }
  return K;
}

double svr_dual_objective(const Tensor<double>& K, const std::vector<double>& y, const std::vector<double>& beta,
                          double epsilon) {
  const std::size_t n = beta.size();
  double quad = 0.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += K(i, j) * beta[j];
    quad += beta[i] * row;
    lin += y[i] * beta[i] - epsilon * std::abs(beta[i]);
  }
  return -0.5 * quad + lin;
}

SvrSolution svr_solve(const Tensor<double>& X, const std::vector<double>& y, const SvrConfig& cfg) {
  cfg.validate();
  if (X.rank() != 2) throw DimensionError("svr_fit: X must be [N x F], got " + to_string(X.shape()));
  const std::size_t n = X.dim(0);
  if (n == 0) throw InputError("svr_fit: no training points");
  if (y.size() != n) {
    throw DimensionError("svr_fit: " + std::to_string(n) + " rows but " + std::to_string(y.size()) + " targets");
  }
  require_finite(X, y);

  SvrSolution sol;
  sol.gamma = cfg.gamma ? *cfg.gamma : scale_gamma(X);
  const Tensor<double> K = rbf_gram(X, sol.gamma);

  // Doubled formulation: index t < n is alpha_t (sign +1), t >= n is alpha*_{t-n} (sign -1).
  // Minimize 1/2 a'Qa + p'a with Q_tu = s_t s_u K, sum s_t a_t = 0, 0 <= a <= C.
  const std::size_t l = 2 * n;
  const double C = cfg.C;
  std::vector<double> alpha(l, 0.0), grad(l);
  std::vector<int> sign(l);
  for (std::size_t t = 0; t < l; ++t) {
    sign[t] = t < n ? 1 : -1;
    grad[t] = t < n ? cfg.epsilon - y[t] : cfg.epsilon + y[t - n];
  }
  auto Q = [&](std::size_t a, std::size_t b) { return sign[a] * sign[b] * K(a % n, b % n); };
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  const std::size_t max_iter = cfg.max_passes * std::max<std::size_t>(n, 1);
  double gap = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < l; ++t) {
      if (sign[t] == 1 ? !upper(t) : !lower(t)) {
        const double v = -sign[t] * grad[t];
        if (v >= gmax) {
          gmax = v;
          i = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    std::ptrdiff_t j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < l; ++t) {
      if (sign[t] == 1 ? lower(t) : upper(t)) continue;
      const double v = sign[t] * grad[t];
      gmax2 = std::max(gmax2, v);
      if (i < 0) continue;
      const double diff = gmax + v;
      if (diff > 0.0) {
        const auto ui = static_cast<std::size_t>(i);
        double quad = Q(ui, ui) + Q(t, t) - 2.0 * sign[ui] * sign[t] * Q(ui, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -diff * diff / quad;
        if (obj <= best) {
          best = obj;
          j = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    gap = gmax + gmax2;
    if (i < 0 || j < 0 || gap < cfg.tol) break;
    if (iter >= max_iter) {
      throw ConvergenceError("svr_fit: no convergence after " + std::to_string(iter) + " iterations, KKT violation " +
                                 std::to_string(gap),
                             gap);
    }

    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(j);
    const double old_a = alpha[a];
    const double old_b = alpha[b];
    const double qab = Q(a, b);
    if (sign[a] != sign[b]) {
      double quad = Q(a, a) + Q(b, b) + 2.0 * qab;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[a] - grad[b]) / quad;
      const double diff = alpha[a] - alpha[b];
      alpha[a] += delta;
      alpha[b] += delta;
      if (diff > 0.0) {
        if (alpha[b] < 0.0) {
          alpha[b] = 0.0;
          alpha[a] = diff;
        }
      } else if (alpha[a] < 0.0) {
        alpha[a] = 0.0;
        alpha[b] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[a] > C) {
          alpha[a] = C;
          alpha[b] = C - diff;
        }
      } else if (alpha[b] > C) {
        alpha[b] = C;
        alpha[a] = C + diff;
      }
    } else {
      double quad = Q(a, a) + Q(b, b) - 2.0 * qab;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[a] - grad[b]) / quad;
      const double sum = alpha[a] + alpha[b];
      alpha[a] -= delta;
      alpha[b] += delta;
      if (sum > C) {
        if (alpha[a] > C) {
          alpha[a] = C;
          alpha[b] = sum - C;
        }
      } else if (alpha[b] < 0.0) {
        alpha[b] = 0.0;
        alpha[a] = sum;
      }
      if (sum > C) {
        if (alpha[b] > C) {
          alpha[b] = C;
          alpha[a] = sum - C;
        }
      } else if (alpha[a] < 0.0) {
        alpha[a] = 0.0;
        alpha[b] = sum;
      }
    }
    const double da = alpha[a] - old_a;
    const double db = alpha[b] - old_b;
    for (std::size_t t = 0; t < l; ++t) grad[t] += Q(a, t) * da + Q(b, t) * db;
  }
  sol.iterations = iter;
  sol.gap = gap;

  // Bias: average over free variables, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = sign[t] * grad[t];
    if (upper(t)) {
      if (sign[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (sign[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  sol.bias = -rho;
  sol.beta.resize(n);
  for (std::size_t k = 0; k < n; ++k) sol.beta[k] = alpha[k] - alpha[k + n];
  return sol;
}

SvrModel svr_fit(const Tensor<double>& X, const std::vector<double>& y, const SvrConfig& cfg) {
  const SvrSolution sol = svr_solve(X, y, cfg);
  const std::size_t f = X.dim(1);
  SvrModel m;
  m.config = cfg;
  m.gamma = sol.gamma;
  m.bias = sol.bias;
  std::vector<double> sv, beta;
  for (std::size_t i = 0; i < sol.beta.size(); ++i) {
    if (sol.beta[i] == 0.0) continue;
    sv.insert(sv.end(), X.data() + i * f, X.data() + (i + 1) * f);
    beta.push_back(sol.beta[i]);
  }
  m.beta = Tensor<double>({beta.size()}, beta);
  m.support = Tensor<double>({beta.size(), f}, sv);
  return m;
}

double svr_predict(const SvrModel& m, const double* x, std::size_t dim) {
  if (dim != m.feature_dim()) {
    throw DimensionError("svr_predict: feature dim " + std::to_string(dim) + " != model dim " +
                         std::to_string(m.feature_dim()));
  }
  double out = m.bias;
  for (std::size_t i = 0; i < m.beta.size(); ++i) {
    out += m.beta[i] * rbf_kernel(m.support.data() + i * dim, x, dim, m.gamma);
  }
  return out;
}

double svr_predict(const SvrModel& m, const Tensor<double>& x) {
  if (x.rank() != 1) throw DimensionError("svr_predict: expected a feature vector, got " + to_string(x.shape()));
  return svr_predict(m, x.data(), x.size());
}

void write_svr(std::ostream& os, const SvrModel& m) {
  os.write("SVRM", 4);
  write_u32(os, 1);
  write_u16(os, static_cast<std::uint16_t>(m.config.kernel.size()));
  os.write(m.config.kernel.data(), static_cast<std::streamsize>(m.config.kernel.size()));
  write_u32(os, static_cast<std::uint32_t>(m.config.degree));
  write_f64(os, m.config.coef0);
  write_f64(os, m.config.tol);
  write_f64(os, m.config.C);
  write_f64(os, m.config.epsilon);
  write_u8(os, m.config.gamma ? 0 : 1);  // 1 = "scale"
  write_f64(os, m.gamma);
  write_u32(os, static_cast<std::uint32_t>(m.config.max_passes));
  write_vten(os, m.support);
  write_vten(os, m.beta);
  write_f64(os, m.bias);
}

void write_svr(const std::filesystem::path& path, const SvrModel& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  write_svr(os, m);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

SvrModel read_svr(std::istream& is, const std::string& context) {
  expect_magic(is, "SVRM", context);
  const std::uint32_t version = read_u32(is, context);
  if (version != 1) throw FormatError(context + ": unsupported SVRM version " + std::to_string(version));
  SvrModel m;
  std::string kernel(read_u16(is, context), '\0');
  if (!is.read(kernel.data(), static_cast<std::streamsize>(kernel.size()))) {
    throw FormatError(context + ": truncated kernel name");
  }
  m.config.kernel = kernel;
  m.config.degree = static_cast<int>(read_u32(is, context));
  m.config.coef0 = read_f64(is, context);
  m.config.tol = read_f64(is, context);
  m.config.C = read_f64(is, context);
  m.config.epsilon = read_f64(is, context);
  const bool scale = read_u8(is, context) != 0;
  m.gamma = read_f64(is, context);
  if (!scale) m.config.gamma = m.gamma;
  m.config.max_passes = read_u32(is, context);
  m.support = read_vten<double>(is, context);
  m.beta = read_vten<double>(is, context);
  m.bias = read_f64(is, context);
  if (m.support.rank() != 2 || m.beta.rank() != 1 || m.beta.size() != m.support.dim(0)) {
    throw FormatError(context + ": support " + to_string(m.support.shape()) + " and beta " +
                      to_string(m.beta.shape()) + " disagree");
  }
  return m;
}

SvrModel read_svr(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_svr(is, path.string());
}

}  // namespace jumpvel::baselines
