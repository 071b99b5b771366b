#pragma once

#include <filesystem>
#include <vector>

#include "jumpvel/harness/crossval.hpp"

namespace jumpvel::harness {

/// Writes metrics.tsv, folds.tsv, scatter_fold<k>.tsv and hist_fold<k>.tsv.
/// Histogram bins span all labels of `index` so folds are comparable.
void emit_reports(const CrossValResult& result, const DatasetIndex& index, const std::filesystem::path& out_dir,
                  std::size_t hist_bins = 10);

void write_metrics(const std::filesystem::path& path, const MetricsReport& report);
MetricsReport read_metrics(const std::filesystem::path& path);

/// ablation.tsv: measured rows followed by the published reference rows.
void write_ablation(const std::filesystem::path& path, const std::vector<CrossValResult>& rows,
                    const std::vector<ReferenceRow>& references);

}  // namespace jumpvel::harness
