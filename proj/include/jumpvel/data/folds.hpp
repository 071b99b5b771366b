#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "jumpvel/data/dataset.hpp"

namespace jumpvel {

struct FoldSplit {
  std::vector<std::vector<int>> folds;  // participant ids, each sorted

  std::size_t size() const { return folds.size(); }
  int fold_of(int participant) const;  // -1 if absent

  /// Record indices whose participant is in fold k (test) or any other fold (train).
  std::vector<std::size_t> test_ids(const DatasetIndex& index, std::size_t k) const;
  std::vector<std::size_t> train_ids(const DatasetIndex& index, std::size_t k) const;
};

/// Seeded shuffle of the sorted participant ids, then round-robin assignment.
FoldSplit split_folds(std::vector<int> participants, std::size_t k = 3, std::uint64_t seed = 0);

/// Throws InputError if folds overlap or miss a participant of `index`.
void check_partition(const FoldSplit& split, const std::vector<int>& participants);

/// "folds.tsv": participant id, fold.
void write_folds(const std::filesystem::path& path, const FoldSplit& split);
FoldSplit read_folds(const std::filesystem::path& path);

}  // namespace jumpvel
