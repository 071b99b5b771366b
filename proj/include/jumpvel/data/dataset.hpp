#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "jumpvel/data/sample.hpp"

namespace jumpvel {

/// One manifest row; paths are relative to the manifest's directory unless absolute.
struct SampleRecord {
  int participant = 0;
  int jump = 0;
  JumpType type = JumpType::cmj;
  double velocity = 0.0;
  std::array<std::string, 3> paths;  // left, center, right

  const std::string& path(View v) const { return paths[static_cast<std::size_t>(v)]; }
  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct DatasetIndex {
  std::filesystem::path root;
  std::vector<SampleRecord> records;

  std::vector<int> participants() const;  // sorted, unique
  std::vector<double> labels() const;
  std::filesystem::path resolve(const std::string& path) const;
};

/// Reads the views of record `id` required by `selection`. Every loaded clip
/// must be rank 4 [T, S, S, C] and all views must agree in shape.
VideoSample load_sample(const DatasetIndex& index, std::size_t id, ViewSelection selection);

}  // namespace jumpvel
