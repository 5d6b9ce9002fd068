#pragma once

#include "holodepth/cnn.hpp"
#include "holodepth/dataset.hpp"
#include "holodepth/depth_search.hpp"
#include "holodepth/image.hpp"
#include "holodepth/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace holodepth::cli {

namespace fs = std::filesystem;

/// Physical parameters given on the command line. Unset values fall back to
/// a hologram sidecar, then to the library defaults.
struct OpticsOverride {
  std::optional<double> pitch;
  std::optional<double> wavelength;

  OpticalParams resolve(const OpticalParams& fallback) const;
};

struct SimulateOptions {
  std::optional<fs::path> image;  ///< object image; unset with point = true
  bool point = false;             ///< single-pixel object at the grid center
  std::size_t size = kHologramSide;
  double z = 0.1;
  OpticsOverride optics;
  fs::path out;
};

struct SimulateReport {
  fs::path hologram;
  fs::path sidecar;
  RealImage image;
};

SimulateReport simulate(const SimulateOptions& options);

struct SearchOptions {
  fs::path hologram;
  SweepRange range;
  MetricKind metric = MetricKind::Tamura;
  OpticsOverride optics;
  fs::path out_prefix;  ///< writes <prefix>.csv and <prefix>_best.pgm
};

struct SearchReport {
  TimedSearch timed;
  fs::path curve_csv;
  fs::path best_reconstruction;
};

SearchReport search(const SearchOptions& options);

/// Header "z_m,metric_value", one row per curve point, 17 significant digits.
void write_curve_csv(const DepthSearchResult& result, const fs::path& path);

struct PredictOptions {
  fs::path weights;
  fs::path hologram;
  OpticsOverride optics;
  std::optional<fs::path> reconstruction_out;
};

struct PredictReport {
  Prediction prediction;
  double feature_ms = 0.0;
  std::optional<double> true_depth;
};

PredictReport predict(const PredictOptions& options);

struct BenchOptions {
  fs::path weights;
  fs::path hologram;
  SweepRange range;
  MetricKind metric = MetricKind::Tamura;
  OpticsOverride optics;
  std::size_t sweep_repeats = 1;
  std::size_t forward_repeats = 3;
  std::optional<fs::path> out_csv;
};

struct BenchReport {
  double feature_ms = 0.0;  ///< spectrum or crop extraction, median
  double forward_ms = 0.0;  ///< network forward pass, median
  double sweep_ms = 0.0;    ///< full metric sweep wall clock, median
  double diffraction_ms = 0.0;
  double metric_ms = 0.0;
  std::size_t evaluations = 0;
  double best_z = 0.0;
  bool best_z_stable = true;  ///< identical best_z in every sweep repeat
  double predicted_depth = 0.0;
  double speed_ratio = 0.0;  ///< sweep_ms / forward_ms
};

/// Times feature extraction, one forward pass and a full sweep on the same
/// hologram.
BenchReport bench(const CnnWeights& weights, const RealImage& hologram, OpticalParams params,
                  const SweepRange& range, MetricKind metric, std::size_t sweep_repeats,
                  std::size_t forward_repeats);
BenchReport bench(const BenchOptions& options);

std::string format_bench_table(const BenchReport& report);
/// Header "quantity,value,unit".
void write_bench_csv(const BenchReport& report, const fs::path& path);

struct InitWeightsOptions {
  fs::path out;
  std::uint64_t seed = 0;
  std::optional<fs::path> manifest;  ///< echo normalization from a dataset
  FeatureKind kind = FeatureKind::Spectrum;
  std::optional<double> final_bias;  ///< all-zero network with this output bias
};

void init_weights(const InitWeightsOptions& options);

}  // namespace holodepth::cli
