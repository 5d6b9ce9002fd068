#include "holodepth/cli/commands.hpp"

#include "holodepth/error.hpp"
#include "holodepth/optics.hpp"
#include "holodepth/raster_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <vector>

namespace holodepth::cli {

namespace {

using Clock = std::chrono::steady_clock;

double milliseconds_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string full_precision(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path.string());
}

void require_output_dir(const fs::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw IoError("output directory does not exist: " + parent.string());
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  fs::path p = prefix;
  p += suffix;
  return p;
}

HologramFile load_hologram(const fs::path& path, const OpticsOverride& optics) {
  require_file(path, "hologram");
  HologramFile file = read_hologram(path);
  file.params = optics.resolve(file.params);
  return file;
}

}  // namespace

OpticalParams OpticsOverride::resolve(const OpticalParams& fallback) const {
  OpticalParams p = fallback;
  if (pitch) p.pitch = *pitch;
  if (wavelength) p.wavelength = *wavelength;
  validate(p);
  return p;
}

SimulateReport simulate(const SimulateOptions& options) {
  const OpticalParams params = options.optics.resolve({});
  if (!is_power_of_two(options.size))
    throw DimensionError("hologram size must be a power of two");
  require_output_dir(options.out);

  RealImage object(options.size, options.size, 0.0);
  if (options.point) {
    object.at(options.size / 2, options.size / 2) = 1.0;
  } else {
    if (!options.image) throw ParameterError("simulate needs an object image or --point");
    require_file(*options.image, "object image");
    object = read_pnm(*options.image);
    if (object.width() != options.size || object.height() != options.size)
      object = resize_bilinear(object, options.size, options.size);
  }

  SimulateReport report;
  report.image = synthesize_inline_hologram(object, options.z, params);
  write_hologram({report.image, params, options.z}, options.out);
  report.hologram = options.out;
  report.sidecar = sidecar_path(options.out);
  return report;
}

void write_curve_csv(const DepthSearchResult& result, const fs::path& path) {
  std::string text = "z_m,metric_value\n";
  for (const auto& p : result.curve) text += full_precision(p.z) + "," + full_precision(p.value) + "\n";
  write_file_atomic(path, text);
}

SearchReport search(const SearchOptions& options) {
  const HologramFile file = load_hologram(options.hologram, options.optics);
  require_output_dir(with_suffix(options.out_prefix, ".csv"));

  SearchReport report;
  report.timed = sweep_timed(file.hologram, options.range, options.metric, file.params);
  report.curve_csv = with_suffix(options.out_prefix, ".csv");
  report.best_reconstruction = with_suffix(options.out_prefix, "_best.pgm");
  write_curve_csv(report.timed.result, report.curve_csv);
  const RealImage best =
      reconstruct_intensity(file.hologram, report.timed.result.best_z, file.params);
  write_pgm(best, report.best_reconstruction, best.max(), 255);
  return report;
}

PredictReport predict(const PredictOptions& options) {
  require_file(options.weights, "weight file");
  const CnnWeights weights = load_weights(options.weights);
  const HologramFile file = load_hologram(options.hologram, options.optics);

  PredictReport report;
  report.true_depth = file.depth;
  const auto t0 = Clock::now();
  const RealImage raw = extract_feature(file.hologram, weights.echo.kind);
  const auto feature = normalize_feature(raw, weights.echo.normalization);
  report.feature_ms = milliseconds_since(t0);
  report.prediction = holodepth::predict(weights, feature, weights.echo.kind);

  if (options.reconstruction_out) {
    require_output_dir(*options.reconstruction_out);
    const RealImage recon =
        reconstruct_intensity(file.hologram, report.prediction.depth, file.params);
    write_pgm(recon, *options.reconstruction_out, recon.max(), 255);
  }
  return report;
}

BenchReport bench(const CnnWeights& weights, const RealImage& hologram, OpticalParams params,
                  const SweepRange& range, MetricKind metric, std::size_t sweep_repeats,
                  std::size_t forward_repeats) {
  sweep_repeats = std::max<std::size_t>(1, sweep_repeats);
  forward_repeats = std::max<std::size_t>(1, forward_repeats);

  BenchReport report;
  std::vector<double> feature_times;
  std::vector<double> forward_times;
  for (std::size_t i = 0; i < forward_repeats; ++i) {
    const auto t0 = Clock::now();
    const RealImage raw = extract_feature(hologram, weights.echo.kind);
    const auto feature = normalize_feature(raw, weights.echo.normalization);
    feature_times.push_back(milliseconds_since(t0));
    const Prediction p = forward(weights, feature);
    forward_times.push_back(p.elapsed_ms);
    report.predicted_depth = p.depth;
  }
  report.feature_ms = median(feature_times);
  report.forward_ms = median(forward_times);

  std::vector<double> sweep_times;
  std::vector<double> diffraction_times;
  std::vector<double> metric_times;
  for (std::size_t i = 0; i < sweep_repeats; ++i) {
    const TimedSearch timed = sweep_timed(hologram, range, metric, params);
    sweep_times.push_back(timed.elapsed_ms);
    diffraction_times.push_back(timed.diffraction_ms);
    metric_times.push_back(timed.metric_ms);
    if (i == 0) {
      report.best_z = timed.result.best_z;
      report.evaluations = timed.result.evaluations;
    } else if (timed.result.best_z != report.best_z) {
      report.best_z_stable = false;
    }
  }
  report.sweep_ms = median(sweep_times);
  report.diffraction_ms = median(diffraction_times);
  report.metric_ms = median(metric_times);
  report.speed_ratio = report.forward_ms > 0.0 ? report.sweep_ms / report.forward_ms : 0.0;
  return report;
}

BenchReport bench(const BenchOptions& options) {
  require_file(options.weights, "weight file");
  const CnnWeights weights = load_weights(options.weights);
  const HologramFile file = load_hologram(options.hologram, options.optics);
  if (options.out_csv) require_output_dir(*options.out_csv);
  BenchReport report = bench(weights, file.hologram, file.params, options.range, options.metric,
                             options.sweep_repeats, options.forward_repeats);
  if (options.out_csv) write_bench_csv(report, *options.out_csv);
  return report;
}

std::string format_bench_table(const BenchReport& r) {
  std::ostringstream out;
  char line[160];
  auto row = [&](const char* name, double value, const char* unit) {
    std::snprintf(line, sizeof line, "  %-28s %14.3f %s\n", name, value, unit);
    out << line;
  };
  out << "depth prediction benchmark\n";
  row("feature extraction", r.feature_ms, "ms");
  row("cnn forward pass", r.forward_ms, "ms");
  row("metric sweep (wall)", r.sweep_ms, "ms");
  row("  diffraction (summed)", r.diffraction_ms, "ms");
  row("  metric (summed)", r.metric_ms, "ms");
  row("sweep evaluations", static_cast<double>(r.evaluations), "");
  row("sweep best z", r.best_z, "m");
  row("cnn predicted z", r.predicted_depth, "m");
  row("sweep / forward", r.speed_ratio, "x");
  out << "  best z stable across repeats: " << (r.best_z_stable ? "yes" : "no") << '\n';
  return out.str();
}

void write_bench_csv(const BenchReport& r, const fs::path& path) {
  std::string text = "quantity,value,unit\n";
  auto row = [&](const char* name, double value, const char* unit) {
    text += std::string(name) + "," + full_precision(value) + "," + unit + "\n";
  };
  row("feature_extraction", r.feature_ms, "ms");
  row("forward", r.forward_ms, "ms");
  row("sweep", r.sweep_ms, "ms");
  row("sweep_diffraction", r.diffraction_ms, "ms");
  row("sweep_metric", r.metric_ms, "ms");
  row("evaluations", static_cast<double>(r.evaluations), "count");
  row("sweep_best_z", r.best_z, "m");
  row("predicted_z", r.predicted_depth, "m");
  row("speed_ratio", r.speed_ratio, "x");
  row("best_z_stable", r.best_z_stable ? 1.0 : 0.0, "flag");
  write_file_atomic(path, text);
}

void init_weights(const InitWeightsOptions& options) {
  require_output_dir(options.out);
  FeatureEcho echo;
  echo.kind = options.kind;
  echo.normalization.log_applied = options.kind == FeatureKind::Spectrum;
  if (options.manifest) {
    require_file(*options.manifest, "manifest");
    const DatasetManifest manifest = read_manifest(*options.manifest);
    echo.kind = manifest.config.kind;
    echo.normalization = manifest.normalization;
  }
  CnnWeights weights;
  weights.echo = echo;
  if (options.final_bias) {
    weights.layers = reference_layers();
    weights.layers.back().bias[0] = static_cast<float>(*options.final_bias);
  } else {
    weights = make_reference_network(options.seed, echo);
  }
  save_weights(weights, options.out);
}

}  // namespace holodepth::cli
