#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jumpvel/baselines/conv_features.hpp"
#include "jumpvel/baselines/dense_head.hpp"
#include "jumpvel/baselines/svr.hpp"
#include "jumpvel/data/folds.hpp"
#include "jumpvel/harness/metrics.hpp"
#include "jumpvel/harness/train.hpp"

namespace jumpvel::harness {

struct MetricsReport {
  std::string label;  // view selection or baseline name
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<double> fold_mae;
  std::vector<double> fold_r;
  MeanStd mae;
  MeanStd r;
};

struct FoldResult {
  Evaluation eval;
  std::vector<double> loss_trace;
};

struct CrossValResult {
  MetricsReport report;
  FoldSplit split;
  std::vector<FoldResult> folds;
};

struct CrossValConfig {
  fusion::FusionConfig model;
  TrainConfig train;
  std::size_t folds = 3;
  // Start the final bias at the mean training label instead of 0.
  bool bias_from_labels = true;
};

/// 64-bit FNV-1a of the canonical config text, as 16 hex digits.
std::string config_hash(const std::string& text);
std::string describe(const CrossValConfig& cfg);

/// Fresh model for one fold: seeded init, optional label-mean bias.
Model make_model(const CrossValConfig& cfg, std::size_t fold, const std::vector<double>& train_labels);

/// Folds come from split_folds(participants, cfg.folds, cfg.train.seed);
/// every fold is trained from scratch on the others and scored on itself.
CrossValResult cross_validate(const DatasetIndex& index, const std::vector<VideoSample>& samples,
                              const CrossValConfig& cfg);
CrossValResult cross_validate(const DatasetIndex& index, const CrossValConfig& cfg);

/// Cross-validation for left, right, center and combined, in that order.
std::vector<CrossValResult> ablate(const DatasetIndex& index, const CrossValConfig& cfg);

enum class BaselineMethod { svr, dense };
BaselineMethod parse_baseline_method(const std::string& s);
std::string to_string(BaselineMethod m);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::svr;
  ViewSelection views = ViewSelection::combined;
  std::uint64_t seed = 0;
  std::size_t folds = 3;
  baselines::ConvFeatConfig features;
  baselines::SvrConfig svr;
  baselines::DenseHeadConfig dense{100, 1e-3, 8, 10, 0};
  unsigned threads = 1;
};

std::string describe(const BaselineConfig& cfg);

/// Frozen conv features, standardized with training-fold statistics, then an
/// SVR or dense head per fold.
CrossValResult run_baseline(const DatasetIndex& index, const std::vector<VideoSample>& samples,
                            const BaselineConfig& cfg);
CrossValResult run_baseline(const DatasetIndex& index, const BaselineConfig& cfg);

/// Published figures kept for side-by-side reporting; not reproduced here.
struct ReferenceRow {
  std::string name;
  double mae = 0.0;
  double mae_std = 0.0;
  double r = 0.0;
  double r_std = 0.0;
};
std::vector<ReferenceRow> reference_methods();  // fusion model and the two baselines
std::vector<ReferenceRow> reference_views();     // per-view and combined

}  // namespace jumpvel::harness
