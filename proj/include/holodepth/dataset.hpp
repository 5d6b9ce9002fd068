#pragma once

#include "holodepth/image.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace holodepth {

inline constexpr std::size_t kHologramSide = 1024;
inline constexpr std::size_t kFeatureSide = 128;
inline constexpr std::size_t kCropOffset = (kHologramSide - kFeatureSide) / 2;  // 448

enum class FeatureKind : std::uint8_t { Hologram = 0, Spectrum = 1 };

std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> parse_feature_kind(std::string_view name);

/// Min-max scaling applied to raw features. Stored in the manifest and
/// echoed into weight files so inference scales inputs the same way.
struct FeatureNormalization {
  double feature_min = 0.0;
  double feature_max = 1.0;
  bool log_applied = false;

  friend bool operator==(const FeatureNormalization&, const FeatureNormalization&) = default;
};

/// n depths on the uniform grid z_min + k*(z_max - z_min)/(n-1), each moved
/// by independent uniform jitter in [-jitter, jitter] and clamped back into
/// [z_min, z_max]. Deterministic for a fixed seed on every platform.
std::vector<double> depth_schedule(std::size_t n, double z_min, double z_max, double jitter,
                                   std::uint64_t seed);

/// Central 128x128 window (rows and columns 448..575) of a 1024x1024 hologram.
RealImage crop_center(const RealImage& hologram);

/// log(1 + P) where P is |DFT|^2 of the hologram restricted to the
/// non-negative-frequency quadrant (rows/cols 0..511, DC at the corner) and
/// bilinearly resized to 128x128 before the log. Unnormalized.
RealImage power_spectrum_feature(const RealImage& hologram);

/// Raw (unnormalized) feature of the requested kind.
RealImage extract_feature(const RealImage& hologram, FeatureKind kind);

/// (v - min) / (max - min) clamped to [0, 1]; a zero range maps to 0.
std::vector<float> normalize_feature(const RealImage& raw, const FeatureNormalization& norm);

// --- sample container -------------------------------------------------------

inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 16;

struct FeatureSample {
  std::vector<float> feature;  // side*side, row-major
  float label = 0.0f;          // meters

  friend bool operator==(const FeatureSample&, const FeatureSample&) = default;
};

struct SampleContainer {
  std::uint32_t version = kContainerVersion;
  std::uint32_t side = static_cast<std::uint32_t>(kFeatureSide);
  std::vector<FeatureSample> samples;
};

/// Little-endian: "HDDS", u32 version, u32 count, u32 side, then per sample
/// side*side f32 followed by one f32 label.
std::string encode_container(const SampleContainer& container);
SampleContainer decode_container(std::string_view bytes);

void write_container(const SampleContainer& container, const std::filesystem::path& path);
SampleContainer read_container(const std::filesystem::path& path);

// --- dataset generation -----------------------------------------------------

inline constexpr std::uint32_t kManifestVersion = 1;

enum class Split { Train, Validation };

struct DatasetConfig {
  OpticalParams optics;
  double z_min = 0.05;
  double z_max = 0.25;
  double jitter = 0.5e-3;
  std::size_t samples_per_object = 20;
  FeatureKind kind = FeatureKind::Spectrum;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
  std::size_t max_objects = 50;  ///< 0 = every decodable image
};

struct ObjectEntry {
  std::string object_id;  ///< source file name
  Split split = Split::Train;
  std::vector<double> depths;
};

struct SkippedInput {
  std::string file;
  std::string reason;
};

struct DatasetManifest {
  std::uint32_t format_version = kManifestVersion;
  DatasetConfig config;
  FeatureNormalization normalization;
  std::vector<ObjectEntry> objects;  ///< sorted by object_id; container order
  std::vector<SkippedInput> skipped;
  std::size_t sample_count = 0;
  std::string container_file;  ///< file name relative to the manifest
};

std::string encode_manifest(const DatasetManifest& manifest);
DatasetManifest decode_manifest(std::string_view text);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Loads an object image: luminance, resized to 1024x1024.
RealImage load_object(const std::filesystem::path& path);

/// Per object_id train/validation assignment, a seeded permutation with
/// round(fraction * n) validation objects (at least one when n >= 2 and
/// fraction > 0).
std::vector<Split> assign_splits(std::size_t object_count, double validation_fraction,
                                 std::uint64_t seed);

/// Seed for one object's depth schedule.
std::uint64_t object_seed(std::uint64_t dataset_seed, std::size_t object_index);

struct DatasetOutput {
  std::filesystem::path container;
  std::filesystem::path manifest;
  DatasetManifest contents;
};

/// Synthesizes samples_per_object holograms per image in image_dir and
/// writes "<out_prefix>.hdds" plus "<out_prefix>.manifest.json".
DatasetOutput build_dataset(const std::filesystem::path& image_dir, const DatasetConfig& config,
                            const std::filesystem::path& out_prefix);

}  // namespace holodepth
