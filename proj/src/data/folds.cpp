#include "jumpvel/data/folds.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace jumpvel {

int FoldSplit::fold_of(int participant) const {
  for (std::size_t k = 0; k < folds.size(); ++k) {
    if (std::binary_search(folds[k].begin(), folds[k].end(), participant)) return static_cast<int>(k);
  }
  return -1;
}

std::vector<std::size_t> FoldSplit::test_ids(const DatasetIndex& index, std::size_t k) const {
  if (k >= folds.size()) throw InputError("fold " + std::to_string(k) + " out of range");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < index.records.size(); ++i) {
    if (std::binary_search(folds[k].begin(), folds[k].end(), index.records[i].participant)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldSplit::train_ids(const DatasetIndex& index, std::size_t k) const {
  if (k >= folds.size()) throw InputError("fold " + std::to_string(k) + " out of range");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < index.records.size(); ++i) {
    const int f = fold_of(index.records[i].participant);
    if (f >= 0 && static_cast<std::size_t>(f) != k) out.push_back(i);
  }
  return out;
}

FoldSplit split_folds(std::vector<int> participants, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InputError("split_folds: k must be >= 1");
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()), participants.end());
  if (participants.size() < k) {
    throw InputError("split_folds: " + std::to_string(participants.size()) + " participants cannot fill " +
                     std::to_string(k) + " folds");
  }
  // Fisher-Yates with explicit index draws so the order is fixed across standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = participants.size() - 1; i > 0; --i) {
    const std::size_t j = rng() % (i + 1);
    std::swap(participants[i], participants[j]);
  }
  FoldSplit split;
  split.folds.resize(k);
  for (std::size_t i = 0; i < participants.size(); ++i) split.folds[i % k].push_back(participants[i]);
  for (auto& f : split.folds) std::sort(f.begin(), f.end());
  return split;
}

void check_partition(const FoldSplit& split, const std::vector<int>& participants) {
  std::set<int> seen;
  for (std::size_t k = 0; k < split.folds.size(); ++k) {
    for (int p : split.folds[k]) {
      if (!seen.insert(p).second) {
        throw InputError("participant " + std::to_string(p) + " appears in more than one fold");
      }
    }
  }
  for (int p : participants) {
    if (!seen.count(p)) throw InputError("participant " + std::to_string(p) + " is not assigned to a fold");
  }
}

void write_folds(const std::filesystem::path& path, const FoldSplit& split) {
  std::map<int, std::size_t> rows;
  for (std::size_t k = 0; k < split.folds.size(); ++k) {
    for (int p : split.folds[k]) rows[p] = k;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& [p, k] : rows) os << p << '\t' << k << '\n';
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

FoldSplit read_folds(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  FoldSplit split;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (raw.empty()) continue;
    std::istringstream ss(raw);
    long p = 0;
    long k = 0;
    std::string rest;
    if (!(ss >> p >> k) || (ss >> rest) || k < 0) {
      throw ParseError(line, 1, path.string() + ": expected '<participant>\\t<fold>'");
    }
    if (split.folds.size() <= static_cast<std::size_t>(k)) split.folds.resize(static_cast<std::size_t>(k) + 1);
    split.folds[static_cast<std::size_t>(k)].push_back(static_cast<int>(p));
  }
  for (auto& f : split.folds) std::sort(f.begin(), f.end());
  return split;
}

}  // namespace jumpvel
