#include "jumpvel/harness/crossval.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "jumpvel/numerics/seed.hpp"
#include "jumpvel/parallel.hpp"

namespace jumpvel::harness {
namespace {

constexpr std::uint64_t kInitTag = 0x696e6974;
constexpr std::uint64_t kSamplerTag = 0x73616d70;

void assert_disjoint(const DatasetIndex& index, const std::vector<std::size_t>& train,
                     const std::vector<std::size_t>& test, std::size_t fold) {
  std::set<int> seen;
  for (auto i : train) seen.insert(index.records[i].participant);
  for (auto i : test) {
    if (seen.count(index.records[i].participant)) {
      throw InputError("fold " + std::to_string(fold) + ": participant " +
                       std::to_string(index.records[i].participant) + " is in both train and test");
    }
  }
}

void finish_report(MetricsReport& report, const std::vector<FoldResult>& folds) {
  report.fold_mae.clear();
  report.fold_r.clear();
  for (std::size_t k = 0; k < folds.size(); ++k) {
    report.fold_mae.push_back(folds[k].eval.mae);
    try {
      report.fold_r.push_back(folds[k].eval.require_r());
    } catch (const UndefinedCorrelationError& e) {
      throw UndefinedCorrelationError("fold " + std::to_string(k) + ": " + e.what());
    }
  }
  report.mae = mean_std(report.fold_mae);
  report.r = mean_std(report.fold_r);
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string describe(const CrossValConfig& cfg) {
  std::ostringstream os;
  os << fusion::describe(cfg.model) << " epochs=" << cfg.train.epochs << " lr=" << fixed(cfg.train.lr)
     << " batch=" << cfg.train.batch << " bins=" << cfg.train.bins << " seed=" << cfg.train.seed
     << " folds=" << cfg.folds << " bias_from_labels=" << (cfg.bias_from_labels ? 1 : 0);
  return os.str();
}

Model make_model(const CrossValConfig& cfg, std::size_t fold, const std::vector<double>& train_labels) {
  Model model(cfg.model);
  Rng rng(derive_seed(cfg.train.seed, fold, 0, kInitTag));
  model.init(rng);
  if (cfg.bias_from_labels && !train_labels.empty()) {
    double mean = 0.0;
    for (double v : train_labels) mean += v;
    model.final_head.bias.value[0] = static_cast<float>(mean / static_cast<double>(train_labels.size()));
  }
  return model;
}

CrossValResult cross_validate(const DatasetIndex& index, const std::vector<VideoSample>& samples,
                              const CrossValConfig& cfg) {
  cfg.model.validate();
  cfg.train.validate();
  if (samples.size() != index.records.size()) throw InputError("cross_validate: samples do not match the index");
  CrossValResult result;
  const auto participants = index.participants();
  result.split = split_folds(participants, cfg.folds, cfg.train.seed);
  check_partition(result.split, participants);
  result.report.label = to_string(cfg.model.views);
  result.report.seed = cfg.train.seed;
  result.report.config_hash = config_hash(describe(cfg));

  for (std::size_t k = 0; k < cfg.folds; ++k) {
    const auto train_ids = result.split.train_ids(index, k);
    const auto test_ids = result.split.test_ids(index, k);
    assert_disjoint(index, train_ids, test_ids, k);
    std::vector<double> labels;
    for (auto i : train_ids) labels.push_back(index.records[i].velocity);
    Model model = make_model(cfg, k, labels);
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.train.seed, k, 0, kSamplerTag);
    FoldResult fold;
    try {
      fold.loss_trace = train(model, samples, train_ids, tc).loss_trace;
      fold.eval = evaluate(model, samples, test_ids, cfg.train.threads);
    } catch (const NumericError& e) {
      throw NumericError("fold " + std::to_string(k) + ": " + e.what());
    }
    result.folds.push_back(std::move(fold));
  }
  finish_report(result.report, result.folds);
  return result;
}

CrossValResult cross_validate(const DatasetIndex& index, const CrossValConfig& cfg) {
  return cross_validate(index, load_samples(index, cfg.model.views, cfg.train.threads), cfg);
}

std::vector<CrossValResult> ablate(const DatasetIndex& index, const CrossValConfig& cfg) {
  const auto samples = load_samples(index, ViewSelection::combined, cfg.train.threads);
  std::vector<CrossValResult> out;
  for (auto sel : {ViewSelection::left, ViewSelection::right, ViewSelection::center, ViewSelection::combined}) {
    CrossValConfig c = cfg;
    c.model.views = sel;
    out.push_back(cross_validate(index, samples, c));
  }
  return out;
}

BaselineMethod parse_baseline_method(const std::string& s) {
  if (s == "svr") return BaselineMethod::svr;
  if (s == "dense") return BaselineMethod::dense;
  throw InputError("unknown baseline method '" + s + "' (expected svr|dense)");
}

std::string to_string(BaselineMethod m) { return m == BaselineMethod::svr ? "svr" : "dense"; }

std::string describe(const BaselineConfig& cfg) {
  std::ostringstream os;
  os << "method=" << to_string(cfg.method) << " views=" << to_string(cfg.views) << " seed=" << cfg.seed
     << " folds=" << cfg.folds << " widths=";
  for (std::size_t i = 0; i < cfg.features.widths.size(); ++i) os << (i ? "/" : "") << cfg.features.widths[i];
  os << " blocks=" << cfg.features.blocks_per_stage << " F=" << cfg.features.feature_dim;
  if (cfg.method == BaselineMethod::svr) {
    os << " kernel=" << cfg.svr.kernel << " C=" << fixed(cfg.svr.C) << " epsilon=" << fixed(cfg.svr.epsilon)
       << " tol=" << fixed(cfg.svr.tol) << " gamma=" << (cfg.svr.gamma ? fixed(*cfg.svr.gamma) : "scale")
       << " degree=" << cfg.svr.degree << " coef0=" << fixed(cfg.svr.coef0);
  } else {
    os << " epochs=" << cfg.dense.epochs << " lr=" << fixed(cfg.dense.lr) << " batch=" << cfg.dense.batch
       << " bins=" << cfg.dense.bins;
  }
  return os.str();
}

CrossValResult run_baseline(const DatasetIndex& index, const std::vector<VideoSample>& samples,
                            const BaselineConfig& cfg) {
  if (samples.size() != index.records.size()) throw InputError("run_baseline: samples do not match the index");
  baselines::ConvFeatConfig fc = cfg.features;
  fc.seed = derive_seed(cfg.seed, 0, 0, 0x66656174);
  const baselines::ConvFeatureExtractor extractor(fc);
  const std::size_t dim = active_views(cfg.views).size() * fc.feature_dim;
  Tensor<double> features({samples.size(), dim});
  parallel_for(samples.size(), cfg.threads, [&](std::size_t i) {
    const Tensor<float> f = extractor.sample_features(samples[i], cfg.views);
    for (std::size_t k = 0; k < dim; ++k) features(i, k) = f[k];
  });

  CrossValResult result;
  const auto participants = index.participants();
  result.split = split_folds(participants, cfg.folds, cfg.seed);
  check_partition(result.split, participants);
  result.report.label = to_string(cfg.method) + ":" + to_string(cfg.views);
  result.report.seed = cfg.seed;
  result.report.config_hash = config_hash(describe(cfg));

  for (std::size_t k = 0; k < cfg.folds; ++k) {
    const auto train_ids = result.split.train_ids(index, k);
    const auto test_ids = result.split.test_ids(index, k);
    assert_disjoint(index, train_ids, test_ids, k);
    // Standardize each feature with training statistics only.
    std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
    for (auto i : train_ids) {
      for (std::size_t d = 0; d < dim; ++d) mean[d] += features(i, d);
    }
    for (auto& m : mean) m /= static_cast<double>(train_ids.size());
    for (auto i : train_ids) {
      for (std::size_t d = 0; d < dim; ++d) sd[d] += (features(i, d) - mean[d]) * (features(i, d) - mean[d]);
    }
    for (auto& s : sd) s = s > 0.0 ? std::sqrt(s / static_cast<double>(train_ids.size())) : 1.0;
    auto gather = [&](const std::vector<std::size_t>& ids) {
      Tensor<double> X({ids.size(), dim});
      for (std::size_t r = 0; r < ids.size(); ++r) {
        for (std::size_t d = 0; d < dim; ++d) X(r, d) = (features(ids[r], d) - mean[d]) / sd[d];
      }
      return X;
    };
    const Tensor<double> Xtrain = gather(train_ids);
    const Tensor<double> Xtest = gather(test_ids);
    std::vector<double> ytrain, actual, predicted;
    for (auto i : train_ids) ytrain.push_back(index.records[i].velocity);
    for (auto i : test_ids) actual.push_back(index.records[i].velocity);

    FoldResult fold;
    if (cfg.method == BaselineMethod::svr) {
      const auto model = baselines::svr_fit(Xtrain, ytrain, cfg.svr);
      for (std::size_t r = 0; r < test_ids.size(); ++r) {
        predicted.push_back(baselines::svr_predict(model, Xtest.data() + r * dim, dim));
      }
    } else {
      baselines::DenseHeadConfig dc = cfg.dense;
      dc.seed = derive_seed(cfg.seed, k, 0, kSamplerTag);
      const auto head = baselines::dense_head_fit(Xtrain, ytrain, dc);
      fold.loss_trace = head.loss_trace;
      for (std::size_t r = 0; r < test_ids.size(); ++r) predicted.push_back(head.predict(Xtest.data() + r * dim, dim));
    }
    fold.eval = score(std::move(actual), std::move(predicted));
    result.folds.push_back(std::move(fold));
  }
  finish_report(result.report, result.folds);
  return result;
}

CrossValResult run_baseline(const DatasetIndex& index, const BaselineConfig& cfg) {
  return run_baseline(index, load_samples(index, cfg.views, cfg.threads), cfg);
}

std::vector<ReferenceRow> reference_methods() {
  return {
      {"svm-baseline", 0.19, 0.017, 0.12, 0.06},
      {"dense-baseline", 0.28, 0.017, 0.16, 0.05},
      {"combined", 0.21, 0.015, 0.71, 0.06},
  };
}

std::vector<ReferenceRow> reference_views() {
  return {
      {"left", 0.16, 0.016, 0.35, 0.06},
      {"right", 0.20, 0.014, 0.34, 0.04},
      {"center", 0.19, 0.014, 0.56, 0.06},
      {"combined", 0.21, 0.015, 0.71, 0.06},
  };
}

}  // namespace jumpvel::harness
