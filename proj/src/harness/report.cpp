#include "jumpvel/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "jumpvel/data/sampler.hpp"

namespace jumpvel::harness {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  return os;
}

void close_out(std::ofstream& os, const std::filesystem::path& path) {
  os.close();
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t line, std::size_t col, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, col, context + ": invalid number '" + s + "'");
  }
}

}  // namespace

void write_metrics(const std::filesystem::path& path, const MetricsReport& report) {
  auto os = open_out(path);
  os << "# label\t" << report.label << '\n';
  os << "# seed\t" << report.seed << '\n';
  os << "# config_hash\t" << report.config_hash << '\n';
  os << "# std\tsample (n-1) over " << report.fold_mae.size() << " folds\n";
  os << "metric\tmean\tstd";
  for (std::size_t k = 0; k < report.fold_mae.size(); ++k) os << "\tfold" << k;
  os << '\n';
  os << "MAE\t" << fmt(report.mae.mean) << '\t' << fmt(report.mae.std);
  for (double v : report.fold_mae) os << '\t' << fmt(v);
  os << '\n';
  os << "R\t" << fmt(report.r.mean) << '\t' << fmt(report.r.std);
  for (double v : report.fold_r) os << '\t' << fmt(v);
  os << '\n';
  close_out(os, path);
}

MetricsReport read_metrics(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  MetricsReport report;
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  while (std::getline(is, raw)) {
    ++line;
    if (raw.empty()) continue;
    const auto fields = split_tabs(raw);
    if (raw.rfind("# ", 0) == 0) {
      if (fields.size() < 2) continue;
      const std::string key = fields[0].substr(2);
      if (key == "label") report.label = fields[1];
      if (key == "seed") report.seed = std::stoull(fields[1]);
      if (key == "config_hash") report.config_hash = fields[1];
      continue;
    }
    if (!header) {
      if (fields.size() < 3 || fields[0] != "metric") throw ParseError(line, 1, path.string() + ": missing header");
      header = true;
      continue;
    }
    if (fields.size() < 3) throw ParseError(line, 1, path.string() + ": too few fields");
    MeanStd ms{parse_real(fields[1], line, 2, path.string()), parse_real(fields[2], line, 3, path.string())};
    std::vector<double> folds;
    for (std::size_t c = 3; c < fields.size(); ++c) folds.push_back(parse_real(fields[c], line, c + 1, path.string()));
    if (fields[0] == "MAE") {
      report.mae = ms;
      report.fold_mae = folds;
    } else if (fields[0] == "R") {
      report.r = ms;
      report.fold_r = folds;
    } else {
      throw ParseError(line, 1, path.string() + ": unknown metric '" + fields[0] + "'");
    }
  }
  return report;
}

void emit_reports(const CrossValResult& result, const DatasetIndex& index, const std::filesystem::path& out_dir,
                  std::size_t hist_bins) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  write_metrics(out_dir / "metrics.tsv", result.report);
  write_folds(out_dir / "folds.tsv", result.split);
  const LabelBins bins = LabelBins::fit(index.labels(), hist_bins);
  for (std::size_t k = 0; k < result.folds.size(); ++k) {
    const auto& eval = result.folds[k].eval;
    const auto scatter_path = out_dir / ("scatter_fold" + std::to_string(k) + ".tsv");
    auto os = open_out(scatter_path);
    for (std::size_t i = 0; i < eval.actual.size(); ++i) os << fmt(eval.actual[i]) << '\t' << fmt(eval.predicted[i]) << '\n';
    close_out(os, scatter_path);

    std::vector<std::size_t> counts(bins.count, 0);
    for (double v : eval.actual) ++counts[bins.bin_of(v)];
    const auto hist_path = out_dir / ("hist_fold" + std::to_string(k) + ".tsv");
    auto hs = open_out(hist_path);
    for (std::size_t b = 0; b < bins.count; ++b) {
      hs << fmt(bins.edge(b)) << '\t' << fmt(bins.edge(b + 1)) << '\t' << counts[b] << '\n';
    }
    close_out(hs, hist_path);
  }
}

void write_ablation(const std::filesystem::path& path, const std::vector<CrossValResult>& rows,
                    const std::vector<ReferenceRow>& references) {
  auto os = open_out(path);
  os << "selection\tMAE_mean\tMAE_std\tR_mean\tR_std\tsource\n";
  for (const auto& r : rows) {
    const auto& m = r.report;
    os << m.label << '\t' << fmt(m.mae.mean) << '\t' << fmt(m.mae.std) << '\t' << fmt(m.r.mean) << '\t'
       << fmt(m.r.std) << "\tmeasured\n";
  }
  for (const auto& r : references) {
    os << r.name << '\t' << fmt(r.mae) << '\t' << fmt(r.mae_std) << '\t' << fmt(r.r) << '\t' << fmt(r.r_std)
       << "\tpublished (reference only)\n";
  }
  close_out(os, path);
}

}  // namespace jumpvel::harness
