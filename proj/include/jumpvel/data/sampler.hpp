#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace jumpvel {

struct SamplerConfig {
  std::size_t bins = 10;
  std::size_t batch = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Equal-width label bins over [min, max]; the top edge belongs to the last bin.
struct LabelBins {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 1;

  static LabelBins fit(const std::vector<double>& labels, std::size_t bins);
  std::size_t bin_of(double label) const;
  double edge(std::size_t i) const;  // i in [0, count]
};

/// Draws mini-batches with replacement: a uniformly chosen non-empty bin, then
/// a uniformly chosen sample inside it.
class BalancedSampler {
 public:
  BalancedSampler(std::vector<std::size_t> ids, const std::vector<double>& labels, const SamplerConfig& cfg);

  std::vector<std::size_t> next_batch();
  std::size_t draw();

  const LabelBins& bins() const { return bins_; }
  const std::vector<std::vector<std::size_t>>& members() const { return members_; }  // non-empty bins only

 private:
  SamplerConfig cfg_;
  LabelBins bins_;
  std::vector<std::vector<std::size_t>> members_;
  std::mt19937_64 rng_;
};

/// `steps` consecutive batches from a fresh sampler.
std::vector<std::vector<std::size_t>> balanced_batches(const std::vector<std::size_t>& ids,
                                                       const std::vector<double>& labels, const SamplerConfig& cfg,
                                                       std::size_t steps);

}  // namespace jumpvel
