#include "doctest.h"
#include "holodepth/dataset.hpp"
#include "holodepth/error.hpp"
#include "holodepth/fft.hpp"
#include "holodepth/optics.hpp"
#include "holodepth/raster_io.hpp"
#include "support/scenes.hpp"
#include "support/temp_dir.hpp"

#include <fstream>
#include <iterator>
#include <numbers>
#include <set>

using namespace holodepth;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SampleContainer tiny_container(std::uint32_t side, std::size_t count) {
  SampleContainer c;
  c.side = side;
  for (std::size_t i = 0; i < count; ++i) {
    FeatureSample s;
    for (std::size_t j = 0; j < std::size_t{side} * side; ++j)
      s.feature.push_back(static_cast<float>(0.01 * static_cast<double>(i + j)));
    s.label = 0.05f + 0.001f * static_cast<float>(i);
    c.samples.push_back(std::move(s));
  }
  return c;
}

void write_corpus(const fs::path& dir) {
  fs::create_directories(dir);
  write_pgm(holodepth::testing::cluttered_scene(64, 1, 20), dir / "b_clutter.pgm", 1.0, 255);
  write_pgm(holodepth::testing::particle_field(96, 2, 15), dir / "a_particles.pgm", 1.0, 255);
  write_pgm(holodepth::testing::random_image(32, 32, 3), dir / "c_noise.pgm", 1.0, 65535);
  std::ofstream(dir / "readme.txt") << "not an image\n";
}

DatasetConfig small_config(std::uint64_t seed) {
  DatasetConfig c;
  c.samples_per_object = 3;
  c.seed = seed;
  c.validation_fraction = 0.34;
  return c;
}

}  // namespace

TEST_CASE("depth schedule without jitter is the uniform grid") {
  const auto z = depth_schedule(20, 0.05, 0.25, 0.0, 1);
  REQUIRE(z.size() == 20);
  CHECK(z.front() == 0.05);
  CHECK(z.back() == 0.25);
  for (std::size_t i = 1; i < z.size(); ++i)
    CHECK(z[i] - z[i - 1] == doctest::Approx(0.2 / 19).epsilon(1e-12));
  CHECK(0.2 / 19 == doctest::Approx(10.526e-3).epsilon(1e-4));
}

TEST_CASE("jittered schedule stays near the grid and inside the range") {
  const auto grid = depth_schedule(20, 0.05, 0.25, 0.0, 0);
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto z = depth_schedule(20, 0.05, 0.25, 0.5e-3, seed);
    for (std::size_t i = 0; i < z.size(); ++i) {
      CHECK(std::abs(z[i] - grid[i]) <= 0.5e-3 + 1e-15);
      CHECK(z[i] >= 0.05);
      CHECK(z[i] <= 0.25);
    }
  }
  CHECK(depth_schedule(20, 0.05, 0.25, 0.5e-3, 7) == depth_schedule(20, 0.05, 0.25, 0.5e-3, 7));
  CHECK(depth_schedule(20, 0.05, 0.25, 0.5e-3, 7) != depth_schedule(20, 0.05, 0.25, 0.5e-3, 8));
}

TEST_CASE("depth schedule argument checks") {
  CHECK_THROWS_AS(depth_schedule(1, 0.05, 0.25, 0.0, 0), ParameterError);
  CHECK_THROWS_AS(depth_schedule(5, 0.25, 0.05, 0.0, 0), ParameterError);
  CHECK_THROWS_AS(depth_schedule(5, 0.05, 0.25, -1.0, 0), ParameterError);
}

TEST_CASE("centre crop takes the middle 128 x 128") {
  RealImage h(1024, 1024);
  for (std::size_t y = 0; y < 1024; ++y)
    for (std::size_t x = 0; x < 1024; ++x) h.at(x, y) = static_cast<double>(y * 1024 + x);
  const RealImage c = crop_center(h);
  REQUIRE(c.width() == 128);
  REQUIRE(c.height() == 128);
  for (std::size_t y = 0; y < 128; ++y)
    for (std::size_t x = 0; x < 128; ++x)
      CHECK(c.at(x, y) == static_cast<double>((y + 448) * 1024 + x + 448));
  CHECK(c.at(64, 64) == h.at(512, 512));
  CHECK_THROWS_AS(crop_center(RealImage(512, 512)), DimensionError);
}

TEST_CASE("power spectrum of a delta is flat") {
  RealImage h(1024, 1024);
  h.at(0, 0) = 1.0;
  const RealImage f = power_spectrum_feature(h);
  REQUIRE(f.width() == 128);
  for (double v : f.data()) CHECK(v == std::log1p(1.0));
  const auto n = normalize_feature(f, {f.data()[0], f.data()[0], true});
  for (float v : n) CHECK(v == 0.0f);
}

TEST_CASE("power spectrum places a cosine fringe at its frequency") {
  // The resize samples quadrant columns c * 511 / 127, about 4.024 apart, so
  // a one-bin line is only seen where a sample lands within a pixel of it;
  // these frequencies are.
  for (std::size_t k : {40u, 100u, 128u}) {
    RealImage h(1024, 1024);
    for (std::size_t y = 0; y < 1024; ++y)
      for (std::size_t x = 0; x < 1024; ++x)
        h.at(x, y) = 1.0 + std::cos(2.0 * std::numbers::pi * static_cast<double>(k * x) / 1024.0);
    const RealImage f = power_spectrum_feature(h);
    std::size_t best = 1;
    for (std::size_t i = 1; i < f.size(); ++i)
      if (f.data()[i] > f.data()[best]) best = i;
    CAPTURE(k);
    CHECK(best / 128 == 0);
    // Corner-aligned resize maps quadrant column c to output c * 127 / 511.
    CHECK(std::abs(static_cast<double>(best % 128) - static_cast<double>(k) * 127.0 / 511.0) <= 1.0);
  }
}

TEST_CASE("spectrum feature follows the definition") {
  const RealImage h = holodepth::testing::random_image(1024, 1024, 5);
  std::vector<Complex> spec(h.data().begin(), h.data().end());
  fft2d(spec, 1024, 1024, Direction::Forward);
  RealImage quadrant(512, 512);
  for (std::size_t y = 0; y < 512; ++y)
    for (std::size_t x = 0; x < 512; ++x) quadrant.at(x, y) = std::norm(spec[y * 1024 + x]);
  const RealImage resized = resize_bilinear(quadrant, 128, 128);
  const RealImage f = power_spectrum_feature(h);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(f.data()[i] == doctest::Approx(std::log1p(resized.data()[i])).epsilon(1e-12));
  CHECK(extract_feature(h, FeatureKind::Hologram) == crop_center(h));
}

TEST_CASE("normalization maps into the unit interval and clamps") {
  const RealImage raw(2, 2, std::vector<double>{1.0, 2.0, 3.0, 5.0});
  const auto n = normalize_feature(raw, {1.0, 3.0, false});
  CHECK(n == std::vector<float>{0.0f, 0.5f, 1.0f, 1.0f});
  const auto m = normalize_feature(RealImage(1, 1, 0.5), {1.0, 3.0, false});
  CHECK(m[0] == 0.0f);
}

TEST_CASE("container byte layout") {
  const auto c = tiny_container(4, 3);
  const std::string bytes = encode_container(c);
  CHECK(bytes.size() == kContainerHeaderBytes + 3 * (16 + 1) * 4);
  CHECK(bytes.substr(0, 4) == "HDDS");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 3);
  CHECK(bytes[12] == 4);
  const SampleContainer d = decode_container(bytes);
  CHECK(d.side == 4);
  CHECK(d.samples == c.samples);
  CHECK(encode_container(d) == bytes);
}

TEST_CASE("container size for a thousand full samples") {
  const auto c = tiny_container(128, 1000);
  CHECK(encode_container(c).size() == 16 + 1000 * (128 * 128 + 1) * 4);
}

TEST_CASE("damaged containers are rejected") {
  const std::string good = encode_container(tiny_container(4, 2));
  std::string magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_container(magic), FormatError);
  CHECK_THROWS_AS(decode_container(good.substr(0, good.size() - 1)), FormatError);
  CHECK_THROWS_AS(decode_container(good.substr(0, 10)), FormatError);
  CHECK_THROWS_AS(decode_container(good + "x"), FormatError);
  std::string version = good;
  version[4] = 2;
  CHECK_THROWS_AS(decode_container(version), FormatError);
}

TEST_CASE("split assignment keeps objects whole and seeds deterministically") {
  const auto a = assign_splits(10, 0.2, 3);
  CHECK(a == assign_splits(10, 0.2, 3));
  CHECK(std::count(a.begin(), a.end(), Split::Validation) == 2);
  const auto two = assign_splits(2, 0.2, 3);
  CHECK(std::count(two.begin(), two.end(), Split::Validation) == 1);
  const auto one = assign_splits(1, 0.2, 3);
  CHECK(one[0] == Split::Train);
  CHECK_THROWS_AS(assign_splits(4, 1.0, 0), ParameterError);
}

TEST_CASE("dataset build end to end") {
  holodepth::testing::TempDir tmp("dataset");
  write_corpus(tmp.path() / "images");
  const auto first = build_dataset(tmp.path() / "images", small_config(11), tmp.path() / "one");
  const auto& m = first.contents;

  REQUIRE(m.objects.size() == 3);
  CHECK(m.objects[0].object_id == "a_particles.pgm");
  CHECK(m.objects[2].object_id == "c_noise.pgm");
  REQUIRE(m.skipped.size() == 1);
  CHECK(m.skipped[0].file == "readme.txt");
  CHECK(m.sample_count == 9);
  CHECK(m.container_file == "one.hdds");
  CHECK(m.normalization.log_applied);
  CHECK(m.normalization.feature_max > m.normalization.feature_min);

  const SampleContainer c = read_container(first.container);
  REQUIRE(c.samples.size() == 9);
  CHECK(fs::file_size(first.container) == 16 + 9 * (128 * 128 + 1) * 4);
  std::size_t validation = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (m.objects[i].split == Split::Validation) ++validation;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& s = c.samples[i * 3 + k];
      CHECK(s.label == static_cast<float>(m.objects[i].depths[k]));
      CHECK(s.label >= 0.05f);
      CHECK(s.label <= 0.25f);
      for (float v : s.feature) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
      }
    }
  }
  CHECK(validation == 1);

  // Any sample can be rebuilt from the manifest alone.
  const RealImage object = load_object(tmp.path() / "images" / m.objects[1].object_id);
  const RealImage hologram =
      synthesize_inline_hologram(object, m.objects[1].depths[2], m.config.optics);
  CHECK(normalize_feature(extract_feature(hologram, m.config.kind), m.normalization) ==
        c.samples[5].feature);

  const auto again = build_dataset(tmp.path() / "images", small_config(11), tmp.path() / "two");
  CHECK(slurp(first.container) == slurp(again.container));
  const auto different = build_dataset(tmp.path() / "images", small_config(12), tmp.path() / "three");
  CHECK(slurp(first.container) != slurp(different.container));
  CHECK_FALSE(fs::exists(tmp.path() / "one.hdds.raw.tmp"));
  CHECK_FALSE(fs::exists(tmp.path() / "one.hdds.tmp"));

  const DatasetManifest back = read_manifest(first.manifest);
  CHECK(encode_manifest(back) == encode_manifest(m));
}

TEST_CASE("hologram-kind datasets and object limits") {
  holodepth::testing::TempDir tmp("dataset_holo");
  write_corpus(tmp.path() / "images");
  DatasetConfig cfg = small_config(5);
  cfg.kind = FeatureKind::Hologram;
  cfg.max_objects = 2;
  cfg.samples_per_object = 2;
  const auto out = build_dataset(tmp.path() / "images", cfg, tmp.path() / "h");
  CHECK(out.contents.objects.size() == 2);
  CHECK_FALSE(out.contents.normalization.log_applied);
  CHECK(read_container(out.container).samples.size() == 4);
}

TEST_CASE("dataset input errors") {
  holodepth::testing::TempDir tmp("dataset_err");
  CHECK_THROWS_AS(build_dataset(tmp.path() / "missing", small_config(0), tmp.path() / "x"), IoError);
  fs::create_directories(tmp.path() / "empty");
  CHECK_THROWS_AS(build_dataset(tmp.path() / "empty", small_config(0), tmp.path() / "x"), IoError);
  std::ofstream(tmp.path() / "empty" / "junk.pgm") << "P5\n10 10\n255\nshort";
  CHECK_THROWS_AS(build_dataset(tmp.path() / "empty", small_config(0), tmp.path() / "x"), IoError);
}

TEST_CASE("manifest decoding checks") {
  CHECK_THROWS_AS(decode_manifest("{}"), FormatError);
  CHECK_THROWS_AS(decode_manifest("not json"), FormatError);
}
