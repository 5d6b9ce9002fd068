#pragma once

#include "holodepth/image.hpp"
#include "holodepth/metrics.hpp"

#include <cstddef>
#include <vector>

namespace holodepth {

struct SweepRange {
  double z1 = 0.05;
  double z2 = 0.25;
  double step = 1e-3;
};

/// Grid z1 + k*step for k = 0..n-1, where the last point is the final one
/// strictly below z2 + step/2. Throws RangeError when z1 > z2, step <= 0 or
/// any bound is non-finite.
std::vector<double> sweep_grid(const SweepRange& range);

struct CurvePoint {
  double z;
  double value;
};

struct DepthSearchResult {
  double best_z = 0.0;
  double best_value = 0.0;
  std::vector<CurvePoint> curve;
  MetricKind metric = MetricKind::Tamura;
  std::size_t evaluations = 0;
  std::size_t zero_mean_warnings = 0;
};

/// Reconstructs the hologram at every grid depth, scores it and returns the
/// argmax. Ties go to the smaller z. Evaluations may run in parallel; the
/// curve is always in z order and identical to the sequential result.
DepthSearchResult sweep(const RealImage& hologram, const SweepRange& range, MetricKind kind,
                        OpticalParams params);

struct TimedSearch {
  DepthSearchResult result;
  double elapsed_ms = 0.0;      ///< wall clock of the full sweep
  double diffraction_ms = 0.0;  ///< summed over evaluations
  double metric_ms = 0.0;       ///< summed over evaluations
};

TimedSearch sweep_timed(const RealImage& hologram, const SweepRange& range, MetricKind kind,
                        OpticalParams params);

}  // namespace holodepth
