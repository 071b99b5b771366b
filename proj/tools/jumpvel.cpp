// Command-line entry point. Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "jumpvel/data/manifest.hpp"
#include "jumpvel/harness/crossval.hpp"
#include "jumpvel/harness/gradcheck_suite.hpp"
#include "jumpvel/harness/report.hpp"
#include "jumpvel/synth/generator.hpp"

namespace fs = std::filesystem;
using namespace jumpvel;

namespace {

const std::vector<std::string> kSelections = {"left", "right", "center", "combined"};

unsigned default_threads() {
  if (const char* env = std::getenv("JUMPVEL_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring JUMPVEL_THREADS='" << env << "'\n";
  }
  return 1;
}

DatasetIndex open_dataset(const fs::path& data) {
  return load_manifest(fs::is_directory(data) ? data / "manifest.tsv" : data);
}

void print_metrics(const harness::MetricsReport& m) {
  std::printf("%-16s MAE %.6f +- %.6f   R %.6f +- %.6f\n", m.label.c_str(), m.mae.mean, m.mae.std, m.r.mean, m.r.std);
  for (std::size_t k = 0; k < m.fold_mae.size(); ++k) {
    std::printf("  fold %zu: MAE %.6f  R %.6f\n", k, m.fold_mae[k], m.fold_r[k]);
  }
}

struct TrainFlags {
  std::string data;
  std::string view = "combined";
  std::size_t epochs = 100;
  double lr = 1e-3;
  std::size_t batch = 8;
  std::uint64_t seed = 0;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_view) {
  cmd->add_option("--data", f.data, "Dataset directory or manifest.tsv")->required();
  if (with_view) {
    cmd->add_option("--view", f.view, "left|right|center|combined")->check(CLI::IsMember(kSelections));
  }
  cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "Adam learning rate")->check(CLI::NonNegativeNumber);
  cmd->add_option("--batch", f.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Seed for folds, init and sampling");
}

harness::CrossValConfig make_cv_config(const TrainFlags& f, unsigned threads) {
  harness::CrossValConfig cfg;
  cfg.model.views = parse_view_selection(f.view);
  cfg.train.epochs = f.epochs;
  cfg.train.lr = f.lr;
  cfg.train.batch = f.batch;
  cfg.train.seed = f.seed;
  cfg.train.threads = threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  harness::keep_heap_resident();
  CLI::App app{"jumpvel: jump-velocity estimation from multi-view video"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = default_threads();
  app.add_option("--threads", threads, "Worker threads (default 1, or JUMPVEL_THREADS)")->check(CLI::PositiveNumber);

  synth::SyntheticSpec spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "Render a synthetic multi-view jump dataset");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--participants", spec.participants, "Participants")->check(CLI::PositiveNumber);
  gen->add_option("--jumps", spec.jumps_per_participant, "Jumps per participant")->check(CLI::PositiveNumber);
  gen->add_option("--frames", spec.frames, "Frames per clip")->check(CLI::PositiveNumber);
  gen->add_option("--size", spec.image_size, "Frame side in pixels")->check(CLI::PositiveNumber);
  gen->add_option("--seed", spec.seed, "Master seed");

  TrainFlags train_flags;
  std::string train_out;
  std::optional<std::size_t> train_fold;
  auto* train = app.add_subcommand("train", "Train a fusion model");
  add_train_flags(train, train_flags, true);
  train->add_option("--out", train_out, "Model checkpoint path")->required();
  train->add_option("--fold", train_fold, "Hold out this fold (0-2); default trains on all samples")
      ->check(CLI::Range(0, 2));

  std::string eval_data, eval_model;
  std::optional<std::size_t> eval_fold;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a saved model");
  eval->add_option("--data", eval_data, "Dataset directory or manifest.tsv")->required();
  eval->add_option("--model", eval_model, "Model checkpoint path")->required();
  eval->add_option("--fold", eval_fold, "Evaluate on this fold (0-2); default all samples")->check(CLI::Range(0, 2));
  eval->add_option("--seed", eval_seed, "Seed of the fold split");

  TrainFlags cv_flags;
  std::string cv_dir;
  auto* cv = app.add_subcommand("cross-validate", "3-fold participant-disjoint cross-validation");
  add_train_flags(cv, cv_flags, true);
  cv->add_option("--report-dir", cv_dir, "Report output directory")->required();

  TrainFlags ab_flags;
  std::string ab_dir;
  auto* ab = app.add_subcommand("ablate", "Cross-validate every view selection");
  add_train_flags(ab, ab_flags, false);
  ab->add_option("--report-dir", ab_dir, "Report output directory")->required();

  std::string bl_data, bl_method = "svr", bl_view = "combined", bl_dir;
  std::uint64_t bl_seed = 0;
  auto* bl = app.add_subcommand("baseline", "Conv-feature SVR or dense-head baseline");
  bl->add_option("--data", bl_data, "Dataset directory or manifest.tsv")->required();
  bl->add_option("--method", bl_method, "svr|dense")->check(CLI::IsMember({"svr", "dense"}));
  bl->add_option("--view", bl_view, "left|right|center|combined")->check(CLI::IsMember(kSelections));
  bl->add_option("--report-dir", bl_dir, "Report output directory")->required();
  bl->add_option("--seed", bl_seed, "Seed for folds and feature weights");

  harness::GradCheckSuiteOptions gc_opts;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference checks of every layer");
  gc->add_option("--tolerance", gc_opts.tolerance, "Max relative error")->check(CLI::PositiveNumber);

  if (argc < 2) {
    std::cerr << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) {
      std::printf("config: participants=%zu jumps=%zu frames=%zu size=%zu threads=%u out=%s\n", spec.participants,
                  spec.jumps_per_participant, spec.frames, spec.image_size, threads, gen_out.c_str());
      std::printf("seed: %llu\n", static_cast<unsigned long long>(spec.seed));
      const auto index = synth::generate_dataset(spec, gen_out, threads);
      std::printf("wrote %zu samples (%zu view files) to %s\n", index.records.size(), 3 * index.records.size(),
                  gen_out.c_str());
    } else if (*train) {
      auto cfg = make_cv_config(train_flags, threads);
      std::printf("config: %s data=%s out=%s fold=%s threads=%u\n", harness::describe(cfg).c_str(),
                  train_flags.data.c_str(), train_out.c_str(),
                  train_fold ? std::to_string(*train_fold).c_str() : "none", threads);
      std::printf("seed: %llu\n", static_cast<unsigned long long>(train_flags.seed));
      const auto index = open_dataset(train_flags.data);
      const auto samples = harness::load_samples(index, cfg.model.views, threads);
      std::vector<std::size_t> ids;
      if (train_fold) {
        ids = split_folds(index.participants(), 3, train_flags.seed).train_ids(index, *train_fold);
      } else {
        for (std::size_t i = 0; i < index.records.size(); ++i) ids.push_back(i);
      }
      std::vector<double> labels;
      for (auto i : ids) labels.push_back(index.records[i].velocity);
      auto model = harness::make_model(cfg, train_fold.value_or(0), labels);
      const auto result = harness::train(model, samples, ids, cfg.train);
      for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
        if ((e + 1) % 10 == 0 || e + 1 == result.loss_trace.size()) {
          std::printf("epoch %zu loss %.6f\n", e + 1, result.loss_trace[e]);
        }
      }
      model.save(train_out);
      std::printf("saved %s\n", train_out.c_str());
    } else if (*eval) {
      std::printf("config: data=%s model=%s fold=%s threads=%u\n", eval_data.c_str(), eval_model.c_str(),
                  eval_fold ? std::to_string(*eval_fold).c_str() : "all", threads);
      std::printf("seed: %llu\n", static_cast<unsigned long long>(eval_seed));
      const auto model = harness::Model::load(eval_model);
      const auto index = open_dataset(eval_data);
      const auto samples = harness::load_samples(index, model.config().views, threads);
      std::vector<std::size_t> ids;
      if (eval_fold) {
        ids = split_folds(index.participants(), 3, eval_seed).test_ids(index, *eval_fold);
      } else {
        for (std::size_t i = 0; i < index.records.size(); ++i) ids.push_back(i);
      }
      const auto result = harness::evaluate(model, samples, ids, threads);
      std::printf("samples %zu  MAE %.6f  ", ids.size(), result.mae);
      if (result.r) {
        std::printf("R %.6f\n", *result.r);
      } else {
        std::printf("R undefined (%s)\n", result.r_error.c_str());
      }
    } else if (*cv) {
      const auto cfg = make_cv_config(cv_flags, threads);
      std::printf("config: %s data=%s report_dir=%s threads=%u\n", harness::describe(cfg).c_str(),
                  cv_flags.data.c_str(), cv_dir.c_str(), threads);
      std::printf("seed: %llu\n", static_cast<unsigned long long>(cv_flags.seed));
      const auto index = open_dataset(cv_flags.data);
      const auto result = harness::cross_validate(index, cfg);
      harness::emit_reports(result, index, cv_dir);
      print_metrics(result.report);
    } else if (*ab) {
      const auto cfg = make_cv_config(ab_flags, threads);
      std::printf("config: %s data=%s report_dir=%s threads=%u\n", harness::describe(cfg).c_str(),
                  ab_flags.data.c_str(), ab_dir.c_str(), threads);
      std::printf("seed: %llu\n", static_cast<unsigned long long>(ab_flags.seed));
      const auto index = open_dataset(ab_flags.data);
      const auto rows = harness::ablate(index, cfg);
      for (const auto& r : rows) {
        harness::emit_reports(r, index, fs::path(ab_dir) / r.report.label);
        print_metrics(r.report);
      }
      harness::write_ablation(fs::path(ab_dir) / "ablation.tsv", rows, harness::reference_views());
      std::printf("wrote %s\n", (fs::path(ab_dir) / "ablation.tsv").c_str());
    } else if (*bl) {
      harness::BaselineConfig cfg;
      cfg.method = harness::parse_baseline_method(bl_method);
      cfg.views = parse_view_selection(bl_view);
      cfg.seed = bl_seed;
      cfg.threads = threads;
      std::printf("config: %s data=%s report_dir=%s threads=%u\n", harness::describe(cfg).c_str(), bl_data.c_str(),
                  bl_dir.c_str(), threads);
      std::printf("seed: %llu\n", static_cast<unsigned long long>(bl_seed));
      const auto index = open_dataset(bl_data);
      const auto result = harness::run_baseline(index, cfg);
      harness::emit_reports(result, index, bl_dir);
      print_metrics(result.report);
      harness::write_ablation(fs::path(bl_dir) / "comparison.tsv", {result}, harness::reference_methods());
    } else if (*gc) {
      std::printf("config: tolerance=%g affine_tolerance=%g coords_per_tensor=%zu\n", gc_opts.tolerance,
                  gc_opts.affine_tolerance, gc_opts.model_coords);
      std::printf("seed: %llu\n", static_cast<unsigned long long>(gc_opts.seed));
      bool ok = true;
      for (const auto& r : harness::run_gradcheck_suite(gc_opts)) {
        std::printf("%-20s max rel err %.3e  (tol %.0e)  %s\n", r.fragment.c_str(), r.max_rel_error, r.tolerance,
                    r.passed ? "pass" : "FAIL");
        ok = ok && r.passed;
      }
      return ok ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
