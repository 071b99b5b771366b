#include "jumpvel/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "jumpvel/data/manifest.hpp"
#include "jumpvel/numerics/seed.hpp"
#include "jumpvel/numerics/vten.hpp"
#include "jumpvel/parallel.hpp"

namespace jumpvel::synth {
namespace {

// Geometry is authored for a 32-pixel frame and scaled linearly.
constexpr double kBaseSize = 32.0;
constexpr double kApexAtMax = 14.0;      // apex of the fastest admissible jump
constexpr double kFlightAtMax = 9.0;     // frames airborne for the fastest jump
constexpr double kBoxHeight = 3.0;
constexpr double kGroundMargin = 2.0;
constexpr double kBaseFrames = 16.0;
constexpr double kBackground = 0.08;
constexpr double kGroundValue = 0.35;
constexpr double kBoxValue = 0.3;

double coverage_1d(double lo, double hi, double cell) {
  return std::max(0.0, std::min(hi, cell + 1.0) - std::max(lo, cell));
}

struct Rect {
  double x0, x1, y0, y1;
};

double rect_coverage(const Rect& r, std::size_t row, std::size_t col) {
  return coverage_1d(r.x0, r.x1, static_cast<double>(col)) * coverage_1d(r.y0, r.y1, static_cast<double>(row));
}

double gravity(double scale) { return 8.0 * kApexAtMax * scale / (kFlightAtMax * kFlightAtMax); }

}  // namespace

void SyntheticSpec::validate() const {
  if (participants == 0 || jumps_per_participant == 0 || frames == 0 || channels == 0) {
    throw ConfigError("synthetic spec: counts must be >= 1");
  }
  if (image_size < 16) throw ConfigError("synthetic spec: image_size must be >= 16");
  if (!(velocity_min < velocity_max) || !(velocity_min > 0.0)) {
    throw ConfigError("synthetic spec: need 0 < velocity_min < velocity_max");
  }
  if (!(velocity_sd > 0.0)) throw ConfigError("synthetic spec: velocity_sd must be positive");
  if (!(drop_fraction >= 0.0 && drop_fraction <= 1.0)) throw ConfigError("synthetic spec: drop_fraction in [0, 1]");
  if (!(noise >= 0.0)) throw ConfigError("synthetic spec: noise must be >= 0");
}

ParticipantProfile sample_profile(const SyntheticSpec& spec, std::size_t index) {
  if (index >= spec.participants) {
    throw InputError("sample_profile: participant index " + std::to_string(index) + " out of range");
  }
  ParticipantProfile p;
  p.id = static_cast<int>(index);
  p.seed = derive_seed(spec.seed, index, 0, 0x70726f66);
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  p.body_width = 4.0 + 2.0 * u01(rng);
  p.body_height = 9.0 + 3.0 * u01(rng);
  p.intensity = 0.6 + 0.4 * u01(rng);
  p.crouch_depth = 1.5 + 1.5 * u01(rng);
  return p;
}

double apex_displacement(double velocity, double velocity_max, std::size_t image_size) {
  const double scale = static_cast<double>(image_size) / kBaseSize;
  const double r = velocity / velocity_max;
  return kApexAtMax * scale * r * r;
}

Pose pose_at(double t, double velocity, JumpType type, const ParticipantProfile& profile, double velocity_max,
             std::size_t image_size) {
  const double scale = static_cast<double>(image_size) / kBaseSize;
  const double g = gravity(scale);
  const double apex = apex_displacement(velocity, velocity_max, image_size);
  const double u = std::sqrt(2.0 * g * apex);
  const double depth = profile.crouch_depth * scale;
  const double pi = std::numbers::pi;
  Pose pose;
  double takeoff = 4.0;
  if (type == JumpType::cmj) {
    if (t >= 1.0 && t < takeoff) pose.crouch = depth * std::sin(pi * (t - 1.0) / (takeoff - 1.0));
  } else {
    takeoff = 4.5;
    const double box = kBoxHeight * scale;
    const double contact = 1.0 + std::sqrt(2.0 * box / g);
    if (t < 1.0) {
      pose.elevation = box;
    } else if (t < contact) {
      pose.elevation = box - 0.5 * g * (t - 1.0) * (t - 1.0);
    } else if (t < takeoff) {
      pose.crouch = depth * std::sin(pi * (t - contact) / (takeoff - contact));
    }
  }
  const double landing = takeoff + 2.0 * u / g;
  if (t >= takeoff && t <= landing) {
    const double s = t - takeoff;
    pose.elevation = std::max(0.0, u * s - 0.5 * g * s * s);
  } else if (t > landing && t < landing + 2.0) {
    pose.crouch = 0.6 * depth * std::sin(pi * (t - landing) / 2.0);
  }
  return pose;
}

std::map<View, Tensor<float>> render_jump(const ParticipantProfile& profile, double velocity, JumpType type,
                                          std::size_t frames, std::size_t image_size,
                                          const RenderSettings& settings) {
  if (!(velocity > 0.0 && velocity <= settings.velocity_max)) {
    throw InputError("render_jump: velocity " + std::to_string(velocity) + " outside (0, " +
                     std::to_string(settings.velocity_max) + "]");
  }
  if (frames == 0 || image_size == 0 || settings.channels == 0) throw InputError("render_jump: empty clip geometry");
  const double size = static_cast<double>(image_size);
  const double scale = size / kBaseSize;
  const double ground = size - kGroundMargin * scale;
  const double box = kBoxHeight * scale;
  const double width = profile.body_width * scale;
  const double height = profile.body_height * scale;

  std::map<View, Tensor<float>> out;
  for (View view : kAllViews) {
    double cx = size / 2.0;
    double hscale = 1.0;
    if (view == View::left) {
      cx -= size / 8.0;
      hscale = 0.9;
    } else if (view == View::right) {
      cx += size / 8.0;
      hscale = 0.9;
    }
    std::mt19937_64 rng(splitmix64(settings.noise_seed ^ (0x51ed270b + static_cast<std::uint64_t>(view))));
    std::uniform_real_distribution<double> jitter(-settings.noise, settings.noise);
    Tensor<float> clip({frames, image_size, image_size, settings.channels});
    const Rect box_rect{cx - 5.0 * scale * hscale, cx + 5.0 * scale * hscale, ground - box, ground};
    const Rect ground_rect{0.0, size, ground, size};
    for (std::size_t f = 0; f < frames; ++f) {
      const double t = static_cast<double>(f) * kBaseFrames / static_cast<double>(frames);
      const Pose pose = pose_at(t, velocity, type, profile, settings.velocity_max, image_size);
      const double h = height - pose.crouch;
      const double bottom = ground - pose.elevation;
      const double top = bottom - h;
      if (top < 0.0 || bottom > size) throw RenderError("render_jump: figure leaves the frame");
      const double half = 0.5 * width * hscale;
      const Rect body{cx - half, cx + half, bottom - 0.78 * h, bottom};
      const Rect head{cx - 0.55 * half, cx + 0.55 * half, top, bottom - 0.8 * h};
      for (std::size_t r = 0; r < image_size; ++r) {
        for (std::size_t c = 0; c < image_size; ++c) {
          double back = kBackground + (kGroundValue - kBackground) * rect_coverage(ground_rect, r, c);
          if (type == JumpType::drop) back += (kBoxValue - kBackground) * rect_coverage(box_rect, r, c);
          const double cov = std::min(1.0, rect_coverage(body, r, c) + rect_coverage(head, r, c));
          double v = back * (1.0 - cov) + profile.intensity * cov;
          if (settings.noise > 0.0) v += jitter(rng);
          v = std::clamp(v, 0.0, 1.0);
          float* px = clip.data() + ((f * image_size + r) * image_size + c) * settings.channels;
          for (std::size_t ch = 0; ch < settings.channels; ++ch) px[ch] = static_cast<float>(v);
        }
      }
    }
    out.emplace(view, std::move(clip));
  }
  return out;
}

VideoSample generate_sample(const SyntheticSpec& spec, std::size_t participant, std::size_t jump) {
  spec.validate();
  if (jump >= spec.jumps_per_participant) throw InputError("generate_sample: jump index out of range");
  const ParticipantProfile profile = sample_profile(spec, participant);
  std::mt19937_64 rng(derive_seed(spec.seed, participant, jump, 0x6c61626c));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> normal(spec.velocity_mean, spec.velocity_sd);
  VideoSample s;
  s.participant = static_cast<int>(participant);
  s.jump = static_cast<int>(jump);
  s.type = u01(rng) < spec.drop_fraction ? JumpType::drop : JumpType::cmj;
  double v = normal(rng);
  while (v < spec.velocity_min || v > spec.velocity_max) v = normal(rng);
  s.velocity = std::round(v * 1e6) / 1e6;
  RenderSettings settings;
  settings.channels = spec.channels;
  settings.noise = spec.noise;
  settings.noise_seed = derive_seed(spec.seed, participant, jump, 0x6e6f6973);
  settings.velocity_max = spec.velocity_max;
  s.views = render_jump(profile, s.velocity, s.type, spec.frames, spec.image_size, settings);
  return s;
}

std::vector<VideoSample> generate_samples(const SyntheticSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<VideoSample> samples(spec.sample_count());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    samples[i] = generate_sample(spec, i / spec.jumps_per_participant, i % spec.jumps_per_participant);
  });
  return samples;
}

DatasetIndex generate_dataset(const SyntheticSpec& spec, const std::filesystem::path& out_dir, unsigned threads) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "frames", ec);
  if (ec) throw IoError("cannot create '" + (out_dir / "frames").string() + "': " + ec.message());
  DatasetIndex index;
  index.root = out_dir;
  index.records.resize(spec.sample_count());
  parallel_for(index.records.size(), threads, [&](std::size_t i) {
    const std::size_t p = i / spec.jumps_per_participant;
    const std::size_t j = i % spec.jumps_per_participant;
    VideoSample s = generate_sample(spec, p, j);
    SampleRecord rec;
    rec.participant = s.participant;
    rec.jump = s.jump;
    rec.type = s.type;
    rec.velocity = s.velocity;
    for (View v : kAllViews) {
      char name[64];
      std::snprintf(name, sizeof(name), "frames/p%03zu_j%02zu_%s.vten", p, j, to_string(v).c_str());
      write_vten(out_dir / name, s.views.at(v));
      rec.paths[static_cast<std::size_t>(v)] = name;
    }
    index.records[i] = std::move(rec);
  });
  write_manifest(out_dir / "manifest.tsv", index);
  return index;
}

}  // namespace jumpvel::synth
