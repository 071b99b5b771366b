#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "jumpvel/data/dataset.hpp"
#include "jumpvel/data/sample.hpp"

namespace jumpvel::synth {

/// Parameters of a synthetic jump dataset. The whole dataset is a pure
/// function of this struct.
struct SyntheticSpec {
  std::size_t participants = 86;
  std::size_t jumps_per_participant = 2;
  std::size_t frames = 16;
  std::size_t image_size = 32;
  std::size_t channels = 1;
  double drop_fraction = 0.5;
  double velocity_mean = 0.5;
  double velocity_sd = 0.1;
  double velocity_min = 0.2;
  double velocity_max = 0.9;
  double noise = 0.02;  // additive uniform pixel noise amplitude
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t sample_count() const { return participants * jumps_per_participant; }
};

struct ParticipantProfile {
  int id = 0;
  double body_width = 0.0;   // pixels at image_size 32, scaled with the frame
  double body_height = 0.0;
  double intensity = 0.0;
  double crouch_depth = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ParticipantProfile&, const ParticipantProfile&) = default;
};

struct RenderSettings {
  std::size_t channels = 1;
  double noise = 0.02;
  std::uint64_t noise_seed = 0;
  double velocity_max = 0.9;  // velocity whose apex just fits the frame
};

/// Deterministic in (spec.seed, index).
ParticipantProfile sample_profile(const SyntheticSpec& spec, std::size_t index);

/// Peak height of the ballistic phase in pixels; proportional to v^2.
double apex_displacement(double velocity, double velocity_max, std::size_t image_size);

/// Vertical elevation of the feet above the ground (pixels) at frame time
/// `t`, and the crouch compression of the body (pixels).
struct Pose {
  double elevation = 0.0;
  double crouch = 0.0;
};
Pose pose_at(double t, double velocity, JumpType type, const ParticipantProfile& profile, double velocity_max,
             std::size_t image_size);

/// Renders a crouch, take-off, ballistic flight and landing from three
/// cameras. Center is frontal; left and right are offset by -/+ S/8 and
/// scaled 0.9 horizontally. Drop jumps start on a box and rebound with
/// the given take-off velocity.
std::map<View, Tensor<float>> render_jump(const ParticipantProfile& profile, double velocity, JumpType type,
                                          std::size_t frames, std::size_t image_size,
                                          const RenderSettings& settings = {});

/// Sample `jump` of participant `participant`, labels rounded to 6 decimals.
VideoSample generate_sample(const SyntheticSpec& spec, std::size_t participant, std::size_t jump);

/// All samples, participant-major.
std::vector<VideoSample> generate_samples(const SyntheticSpec& spec, unsigned threads = 1);

/// Writes frames/<...>.vten for every view plus manifest.tsv under `out_dir`.
DatasetIndex generate_dataset(const SyntheticSpec& spec, const std::filesystem::path& out_dir, unsigned threads = 1);

}  // namespace jumpvel::synth
