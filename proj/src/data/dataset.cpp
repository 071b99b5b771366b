#include "jumpvel/data/dataset.hpp"

#include <algorithm>

#include "jumpvel/numerics/vten.hpp"

namespace jumpvel {

std::vector<int> DatasetIndex::participants() const {
  std::vector<int> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.participant);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<double> DatasetIndex::labels() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.velocity);
  return out;
}

std::filesystem::path DatasetIndex::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : root / p;
}

VideoSample load_sample(const DatasetIndex& index, std::size_t id, ViewSelection selection) {
  if (id >= index.records.size()) {
    throw InputError("load_sample: sample id " + std::to_string(id) + " not in index of " +
                     std::to_string(index.records.size()));
  }
  const SampleRecord& rec = index.records[id];
  VideoSample s;
  s.participant = rec.participant;
  s.jump = rec.jump;
  s.type = rec.type;
  s.velocity = rec.velocity;
  Shape expected;
  for (View v : active_views(selection)) {
    const auto path = index.resolve(rec.path(v));
    Tensor<float> clip = read_vten<float>(path);
    if (clip.rank() != 4) {
      throw FormatError(path.string() + ": expected a [T, S, S, C] clip, got " + to_string(clip.shape()));
    }
    if (expected.empty()) {
      expected = clip.shape();
    } else if (clip.shape() != expected) {
      throw DimensionError(path.string() + ": shape " + to_string(clip.shape()) + " differs from " +
                           to_string(expected) + " of the other views");
    }
    s.views.emplace(v, std::move(clip));
  }
  return s;
}

}  // namespace jumpvel
