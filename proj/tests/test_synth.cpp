#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "jumpvel/data/manifest.hpp"
#include "jumpvel/synth/generator.hpp"
#include "support.hpp"

using namespace jumpvel;
using namespace jumpvel::synth;

namespace {

SyntheticSpec tiny_spec() {
  SyntheticSpec spec;
  spec.participants = 3;
  spec.jumps_per_participant = 2;
  spec.frames = 8;
  spec.seed = 4;
  return spec;
}

// Highest (smallest) intensity-weighted row centroid of the bright figure
// pixels over all frames.
double highest_centroid(const Tensor<float>& clip) {
  const std::size_t t = clip.dim(0), s = clip.dim(1);
  double best = 1e9;
  for (std::size_t f = 0; f < t; ++f) {
    double mass = 0.0, rows = 0.0;
    for (std::size_t y = 0; y < s; ++y) {
      for (std::size_t x = 0; x < s; ++x) {
        const double v = clip[(f * s + y) * s + x];
        if (v > 0.5) {
          mass += v;
          rows += v * static_cast<double>(y);
        }
      }
    }
    if (mass > 0.0) best = std::min(best, rows / mass);
  }
  return best;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Synth, ApexProportionalToSquaredVelocity) {
  EXPECT_NEAR(apex_displacement(0.9, 0.9, 32), 14.0, 1e-12);
  EXPECT_NEAR(apex_displacement(0.45, 0.9, 32), 3.5, 1e-12);
  EXPECT_NEAR(apex_displacement(0.9, 0.9, 64), 28.0, 1e-12);
}

TEST(Synth, RenderedApexMonotonicInVelocity) {
  const auto profile = sample_profile(SyntheticSpec{}, 0);
  RenderSettings quiet;
  quiet.noise = 0.0;
  double prev = 1e9;
  for (double v : {0.2, 0.35, 0.5, 0.65, 0.9}) {
    const auto views = render_jump(profile, v, JumpType::cmj, 16, 32, quiet);
    const double c = highest_centroid(views.at(View::center));
    EXPECT_LT(c, prev) << "v=" << v;
    prev = c;
  }
}

TEST(Synth, PoseTakesOffAndLands) {
  const auto profile = sample_profile(SyntheticSpec{}, 1);
  EXPECT_DOUBLE_EQ(pose_at(0.0, 0.5, JumpType::cmj, profile, 0.9, 32).elevation, 0.0);
  double peak = 0.0;
  for (double t = 0.0; t < 16.0; t += 0.05) peak = std::max(peak, pose_at(t, 0.5, JumpType::cmj, profile, 0.9, 32).elevation);
  EXPECT_NEAR(peak, apex_displacement(0.5, 0.9, 32), 0.05);
  EXPECT_GT(pose_at(0.0, 0.5, JumpType::drop, profile, 0.9, 32).elevation, 0.0);
}

TEST(Synth, LeftRightMirrorWithoutNoise) {
  RenderSettings quiet;
  quiet.noise = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto profile = sample_profile(SyntheticSpec{}, i);
    for (JumpType type : {JumpType::cmj, JumpType::drop}) {
      const auto views = render_jump(profile, 0.55, type, 16, 32, quiet);
      const auto& l = views.at(View::left);
      const auto& r = views.at(View::right);
      for (std::size_t f = 0; f < 16; ++f) {
        for (std::size_t y = 0; y < 32; ++y) {
          for (std::size_t x = 0; x < 32; ++x) {
            ASSERT_NEAR(l[(f * 32 + y) * 32 + x], r[(f * 32 + y) * 32 + (31 - x)], 1e-6);
          }
        }
      }
    }
  }
}

TEST(Synth, PixelsInUnitIntervalAndShapes) {
  const auto s = generate_sample(SyntheticSpec{}, 5, 1);
  ASSERT_EQ(s.views.size(), 3u);
  for (const auto& [view, clip] : s.views) {
    EXPECT_EQ(clip.shape(), (Shape{16, 32, 32, 1}));
    for (float v : clip.values()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
    }
  }
  EXPECT_GE(s.velocity, 0.2);
  EXPECT_LE(s.velocity, 0.9);
}

TEST(Synth, InvalidVelocityThrows) {
  const auto profile = sample_profile(SyntheticSpec{}, 0);
  EXPECT_THROW(render_jump(profile, 0.0, JumpType::cmj, 16, 32), InputError);
  EXPECT_THROW(render_jump(profile, 1.2, JumpType::cmj, 16, 32), InputError);
}

TEST(Synth, SampleIsPureFunctionOfSpec) {
  const auto a = generate_sample(tiny_spec(), 2, 1);
  const auto b = generate_sample(tiny_spec(), 2, 1);
  EXPECT_EQ(a.velocity, b.velocity);
  EXPECT_EQ(a.type, b.type);
  EXPECT_EQ(a.views, b.views);
  auto other = tiny_spec();
  other.seed = 5;
  EXPECT_NE(generate_sample(other, 2, 1).views, a.views);
}

TEST(Synth, LabelMassConcentratedAroundMean) {
  SyntheticSpec spec;
  spec.participants = 500;
  spec.frames = 2;
  spec.image_size = 16;
  int inside = 0, total = 0;
  for (std::size_t p = 0; p < spec.participants; ++p) {
    for (std::size_t j = 0; j < spec.jumps_per_participant; ++j) {
      const double v = generate_sample(spec, p, j).velocity;
      EXPECT_GE(v, 0.2);
      EXPECT_LE(v, 0.9);
      inside += (v >= 0.4 && v <= 0.6) ? 1 : 0;
      ++total;
    }
  }
  EXPECT_EQ(total, 1000);
  EXPECT_GE(inside, 550);
}

TEST(Synth, ParallelEqualsSequential) {
  const auto seq = generate_samples(tiny_spec(), 1);
  const auto par = generate_samples(tiny_spec(), 4);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].velocity, par[i].velocity);
    EXPECT_EQ(seq[i].views, par[i].views);
  }
}

TEST(Synth, DatasetFilesAndByteIdenticalRegeneration) {
  test::TempDir a("synth_a"), b("synth_b");
  SyntheticSpec spec;
  spec.participants = 86;
  spec.frames = 2;
  spec.image_size = 16;
  const auto index = generate_dataset(spec, a.path(), 2);
  EXPECT_EQ(index.records.size(), 172u);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a.path() / "frames")) files += e.is_regular_file() ? 1 : 0;
  EXPECT_EQ(files, 516u);

  const auto loaded = load_manifest(a.path() / "manifest.tsv");
  EXPECT_EQ(loaded.records, index.records);
  EXPECT_EQ(loaded.participants().size(), 86u);

  generate_dataset(spec, b.path(), 1);
  EXPECT_EQ(slurp(a.path() / "manifest.tsv"), slurp(b.path() / "manifest.tsv"));
  for (const auto& r : index.records) {
    for (const auto& p : r.paths) ASSERT_EQ(slurp(a.path() / p), slurp(b.path() / p)) << p;
  }
}

TEST(Synth, InvalidSpecRejected) {
  SyntheticSpec spec;
  spec.participants = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = SyntheticSpec{};
  spec.velocity_min = 0.95;
  EXPECT_THROW(spec.validate(), ConfigError);
}
