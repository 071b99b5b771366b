#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "jumpvel/data/dataset.hpp"
#include "jumpvel/data/folds.hpp"
#include "jumpvel/data/manifest.hpp"
#include "jumpvel/data/sampler.hpp"
#include "jumpvel/numerics/vten.hpp"
#include "support.hpp"

using namespace jumpvel;

namespace {

DatasetIndex small_index() {
  DatasetIndex index;
  for (int p = 0; p < 3; ++p) {
    for (int j = 0; j < 2; ++j) {
      SampleRecord r;
      r.participant = p;
      r.jump = j;
      r.type = j == 0 ? JumpType::cmj : JumpType::drop;
      r.velocity = 0.4 + 0.05 * p + 0.012345 * j;
      for (View v : kAllViews) r.paths[static_cast<std::size_t>(v)] = "f/p" + std::to_string(p) + "_" + to_string(v);
      index.records.push_back(r);
    }
  }
  return index;
}

std::vector<int> iota_ids(int n) {
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

}  // namespace

TEST(Manifest, RoundTrip) {
  const auto index = small_index();
  std::stringstream ss;
  write_manifest(ss, index);
  const auto back = read_manifest(ss);
  EXPECT_EQ(back.records, index.records);
}

TEST(Manifest, EmptyInputGivesEmptyIndex) {
  std::stringstream ss;
  EXPECT_TRUE(read_manifest(ss).records.empty());
  std::stringstream blank("\n\n");
  EXPECT_TRUE(read_manifest(blank).records.empty());
}

TEST(Manifest, WrongFieldCountNamesLine) {
  std::stringstream ss("0\t0\tcmj\t0.5\ta\tb\tc\n1\t0\tcmj\t0.5\ta\tb\n");
  try {
    read_manifest(ss);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Manifest, BadFieldsReportColumn) {
  std::stringstream type("0\t0\tsquat\t0.5\ta\tb\tc\n");
  try {
    read_manifest(type);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_GT(e.column(), 1u);
  }
  std::stringstream vel("0\t0\tcmj\tfast\ta\tb\tc\n");
  EXPECT_THROW(read_manifest(vel), ParseError);
  std::stringstream dup("0\t0\tcmj\t0.5\ta\tb\tc\n0\t0\tdrop\t0.6\td\te\tf\n");
  EXPECT_THROW(read_manifest(dup), ParseError);
}

TEST(Manifest, MissingFileIsIoError) {
  EXPECT_THROW(load_manifest("/nonexistent/jumpvel/manifest.tsv"), IoError);
}

TEST(Dataset, ParticipantsSortedUnique) {
  auto index = small_index();
  std::reverse(index.records.begin(), index.records.end());
  EXPECT_EQ(index.participants(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(index.labels().size(), 6u);
}

TEST(Dataset, LoadSampleAndErrors) {
  test::TempDir dir("data");
  DatasetIndex index;
  index.root = dir.path();
  SampleRecord r;
  r.velocity = 0.5;
  r.paths = {"l.vten", "c.vten", "r.vten"};
  index.records.push_back(r);
  std::mt19937_64 rng(1);
  const auto clip = test::random_tensor<float>({2, 4, 4, 1}, rng, 0.0, 1.0);
  write_vten(dir.path() / "l.vten", clip);
  write_vten(dir.path() / "c.vten", clip);
  write_vten(dir.path() / "r.vten", Tensor<float>({2, 4, 4}));

  const auto center = load_sample(index, 0, ViewSelection::center);
  EXPECT_EQ(center.views.size(), 1u);
  EXPECT_EQ(center.views.at(View::center), clip);
  EXPECT_THROW(load_sample(index, 0, ViewSelection::combined), FormatError);  // right is rank 3

  write_vten(dir.path() / "r.vten", Tensor<float>({2, 8, 8, 1}));
  EXPECT_THROW(load_sample(index, 0, ViewSelection::combined), DimensionError);

  {
    std::ofstream os(dir.path() / "l.vten", std::ios::binary);
    os << "XXXXjunk";
  }
  try {
    load_sample(index, 0, ViewSelection::left);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("l.vten"), std::string::npos);
  }
  EXPECT_THROW(load_sample(index, 5, ViewSelection::left), InputError);
}

TEST(Folds, SizesFor86) {
  const auto split = split_folds(iota_ids(86), 3, 0);
  ASSERT_EQ(split.size(), 3u);
  std::vector<std::size_t> sizes;
  for (const auto& f : split.folds) sizes.push_back(f.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{28, 29, 29}));
  EXPECT_NO_THROW(check_partition(split, iota_ids(86)));
}

TEST(Folds, DisjointAndCoveringOverSeeds) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 60);
    std::vector<int> ids;
    std::set<int> seen;
    while (static_cast<int>(ids.size()) < n) {
      const int id = static_cast<int>(rng() % 1000);
      if (seen.insert(id).second) ids.push_back(id);
    }
    const auto split = split_folds(ids, 3, rng());
    std::multiset<int> all;
    for (const auto& f : split.folds) {
      EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
      all.insert(f.begin(), f.end());
    }
    EXPECT_EQ(all, std::multiset<int>(ids.begin(), ids.end()));
    for (int id : ids) EXPECT_GE(split.fold_of(id), 0);
  }
}

TEST(Folds, DeterministicPerSeedAndTooFewThrows) {
  EXPECT_EQ(split_folds(iota_ids(20), 3, 7).folds, split_folds(iota_ids(20), 3, 7).folds);
  EXPECT_NE(split_folds(iota_ids(20), 3, 7).folds, split_folds(iota_ids(20), 3, 8).folds);
  EXPECT_THROW(split_folds(iota_ids(2), 3, 0), InputError);
}

TEST(Folds, TrainTestIdsArePartitionOfRecords) {
  const auto index = small_index();
  const auto split = split_folds(index.participants(), 3, 1);
  for (std::size_t k = 0; k < 3; ++k) {
    auto test = split.test_ids(index, k);
    auto train = split.train_ids(index, k);
    EXPECT_EQ(test.size(), 2u);
    EXPECT_EQ(train.size(), 4u);
    for (auto t : test) {
      for (auto r : train) EXPECT_NE(index.records[t].participant, index.records[r].participant);
    }
  }
}

TEST(Folds, FileRoundTrip) {
  test::TempDir dir("folds");
  const auto split = split_folds(iota_ids(10), 3, 2);
  write_folds(dir.path() / "folds.tsv", split);
  EXPECT_EQ(read_folds(dir.path() / "folds.tsv").folds, split.folds);
}

TEST(Folds, OverlapDetected) {
  FoldSplit split;
  split.folds = {{0, 1}, {1, 2}, {3}};
  EXPECT_THROW(check_partition(split, {0, 1, 2, 3}), InputError);
  split.folds = {{0}, {1}, {2}};
  EXPECT_THROW(check_partition(split, {0, 1, 2, 3}), InputError);
}

TEST(LabelBins, EdgesAndTopInclusive) {
  const auto bins = LabelBins::fit({0.0, 0.5, 1.0}, 4);
  EXPECT_EQ(bins.count, 4u);
  EXPECT_DOUBLE_EQ(bins.edge(0), 0.0);
  EXPECT_DOUBLE_EQ(bins.edge(2), 0.5);
  EXPECT_EQ(bins.bin_of(0.0), 0u);
  EXPECT_EQ(bins.bin_of(0.3), 1u);
  EXPECT_EQ(bins.bin_of(1.0), 3u);
  EXPECT_EQ(LabelBins::fit({0.7, 0.7}, 10).count, 1u);
}

TEST(BalancedSampler, RareBinDrawnHalfTheTime) {
  // One sample alone in the bottom bin, 99 in the top bin.
  std::vector<std::size_t> ids(100);
  std::vector<double> labels(100, 1.0);
  for (std::size_t i = 0; i < 100; ++i) ids[i] = i;
  labels[0] = 0.0;
  BalancedSampler sampler(ids, labels, SamplerConfig{10, 8, 5});
  EXPECT_EQ(sampler.members().size(), 2u);
  int rare = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) rare += sampler.draw() == 0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(rare) / draws, 0.5, 0.02);
}

TEST(BalancedSampler, ConstantLabelsUniform) {
  std::vector<std::size_t> ids{10, 11, 12, 13};
  std::vector<double> labels(4, 0.5);
  BalancedSampler sampler(ids, labels, SamplerConfig{10, 8, 2});
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 8000; ++i) ++counts[sampler.draw() - 10];
  for (int c : counts) EXPECT_NEAR(c / 8000.0, 0.25, 0.03);
}

TEST(BalancedSampler, DeterministicBatches) {
  std::vector<std::size_t> ids{0, 1, 2, 3, 4, 5};
  std::vector<double> labels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto a = balanced_batches(ids, labels, SamplerConfig{3, 4, 9}, 5);
  const auto b = balanced_batches(ids, labels, SamplerConfig{3, 4, 9}, 5);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 5u);
  for (const auto& batch : a) {
    EXPECT_EQ(batch.size(), 4u);
    for (auto id : batch) EXPECT_LT(id, 6u);
  }
}

TEST(BalancedSampler, InvalidConfig) {
  std::vector<std::size_t> ids{0};
  std::vector<double> labels{0.5};
  EXPECT_THROW(BalancedSampler(ids, labels, SamplerConfig{0, 8, 0}), ConfigError);
  EXPECT_THROW(BalancedSampler(ids, labels, SamplerConfig{10, 0, 0}), ConfigError);
  EXPECT_THROW(BalancedSampler({}, {}, SamplerConfig{}), InputError);
}
