#include "holodepth/depth_search.hpp"

#include "holodepth/error.hpp"
#include "holodepth/optics.hpp"
#include "holodepth/parallel.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace holodepth {

namespace {

using Clock = std::chrono::steady_clock;

double milliseconds_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

std::vector<double> sweep_grid(const SweepRange& range) {
  if (!std::isfinite(range.z1) || !std::isfinite(range.z2) || !std::isfinite(range.step))
    throw RangeError("sweep bounds must be finite");
  if (!(range.step > 0.0)) throw RangeError("sweep step must be positive");
  if (range.z1 > range.z2)
    throw RangeError("sweep range is empty: z1 " + std::to_string(range.z1) + " > z2 " +
                     std::to_string(range.z2));
  const double spans = std::floor((range.z2 - range.z1) / range.step + 0.5);
  const auto count = static_cast<std::size_t>(spans) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k)
    grid[k] = range.z1 + static_cast<double>(k) * range.step;
  if (grid.empty()) throw RangeError("sweep range is empty after discretization");
  return grid;
}

TimedSearch sweep_timed(const RealImage& hologram, const SweepRange& range, MetricKind kind,
                        OpticalParams params) {
  const auto start = Clock::now();
  const auto grid = sweep_grid(range);
  const HologramReconstructor reconstructor(hologram, params);

  struct Evaluation {
    MetricValue metric;
    double diffraction_ms = 0.0;
    double metric_ms = 0.0;
  };
  std::vector<Evaluation> evaluations(grid.size());
  parallel_for(0, grid.size(), [&](std::size_t i) {
    auto t0 = Clock::now();
    const RealImage reconstruction = reconstructor.intensity_at(grid[i]);
    evaluations[i].diffraction_ms = milliseconds_since(t0);
    t0 = Clock::now();
    evaluations[i].metric = evaluate_metric(reconstruction, kind);
    evaluations[i].metric_ms = milliseconds_since(t0);
  });

  TimedSearch timed;
  auto& result = timed.result;
  result.metric = kind;
  result.evaluations = grid.size();
  result.curve.reserve(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& e = evaluations[i];
    result.curve.push_back({grid[i], e.metric.value});
    if (e.metric.zero_mean) ++result.zero_mean_warnings;
    if (e.metric.value > evaluations[best].metric.value) best = i;
    timed.diffraction_ms += e.diffraction_ms;
    timed.metric_ms += e.metric_ms;
  }
  result.best_z = grid[best];
  result.best_value = evaluations[best].metric.value;
  if (result.zero_mean_warnings > 0)
    warn(std::to_string(result.zero_mean_warnings) +
         " reconstructions had zero mean intensity; their metric is 0");
  timed.elapsed_ms = milliseconds_since(start);
  return timed;
}

DepthSearchResult sweep(const RealImage& hologram, const SweepRange& range, MetricKind kind,
                        OpticalParams params) {
  return sweep_timed(hologram, range, kind, params).result;
}

}  // namespace holodepth
