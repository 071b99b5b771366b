#include "jumpvel/data/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jumpvel/errors.hpp"

namespace jumpvel {

void SamplerConfig::validate() const {
  if (bins == 0) throw ConfigError("sampler: bins must be >= 1");
  if (batch == 0) throw ConfigError("sampler: batch must be >= 1");
}

LabelBins LabelBins::fit(const std::vector<double>& labels, std::size_t bins) {
  if (labels.empty()) throw InputError("label bins: no labels");
  if (bins == 0) throw ConfigError("label bins: bins must be >= 1");
  LabelBins b;
  auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
  b.low = *lo;
  b.high = *hi;
  if (!std::isfinite(b.low) || !std::isfinite(b.high)) throw NumericError("label bins: non-finite label");
  b.count = b.high > b.low ? bins : 1;
  return b;
}

std::size_t LabelBins::bin_of(double label) const {
  if (count == 1 || !(label > low)) return 0;
  const double pos = (label - low) / (high - low) * static_cast<double>(count);
  return std::min(count - 1, static_cast<std::size_t>(pos));
}

double LabelBins::edge(std::size_t i) const {
  if (i >= count) return high;
  return low + (high - low) * static_cast<double>(i) / static_cast<double>(count);
}

BalancedSampler::BalancedSampler(std::vector<std::size_t> ids, const std::vector<double>& labels,
                                 const SamplerConfig& cfg)
    : cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  if (ids.size() != labels.size()) {
    throw DimensionError("sampler: " + std::to_string(ids.size()) + " ids but " + std::to_string(labels.size()) +
                         " labels");
  }
  if (ids.empty()) throw InputError("sampler: empty training split");
  bins_ = LabelBins::fit(labels, cfg_.bins);
  std::vector<std::vector<std::size_t>> all(bins_.count);
  for (std::size_t i = 0; i < ids.size(); ++i) all[bins_.bin_of(labels[i])].push_back(ids[i]);
  for (auto& m : all) {
    if (!m.empty()) members_.push_back(std::move(m));
  }
}

std::size_t BalancedSampler::draw() {
  // Modulo draws keep the stream identical across standard library implementations.
  const auto& bin = members_[rng_() % members_.size()];
  return bin[rng_() % bin.size()];
}

std::vector<std::size_t> BalancedSampler::next_batch() {
  std::vector<std::size_t> batch(cfg_.batch);
  for (auto& id : batch) id = draw();
  return batch;
}

std::vector<std::vector<std::size_t>> balanced_batches(const std::vector<std::size_t>& ids,
                                                       const std::vector<double>& labels, const SamplerConfig& cfg,
                                                       std::size_t steps) {
  BalancedSampler sampler(ids, labels, cfg);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) out.push_back(sampler.next_batch());
  return out;
}

}  // namespace jumpvel
