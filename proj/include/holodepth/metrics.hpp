#pragma once

#include "holodepth/image.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace holodepth {

enum class MetricKind { Tamura, Variance, Gradient, Laplacian };

std::string_view to_string(MetricKind kind);
/// Accepts the lowercase names printed by to_string.
std::optional<MetricKind> parse_metric(std::string_view name);

struct MetricValue {
  double value = 0.0;
  bool zero_mean = false;  // Tamura division guard fired; value is 0
};

/// Population standard deviation over mean. A zero-mean image yields 0 with
/// zero_mean set instead of dividing by zero.
MetricValue tamura_checked(const RealImage& image);

/// Same as tamura_checked(image).value, emitting a warning on the guard.
double tamura(const RealImage& image);

/// Variance: population variance. Gradient: mean of dx^2 + dy^2 with forward
/// differences over pixels that have both a right and a lower neighbor.
/// Laplacian: mean squared 4-neighbor Laplacian over interior pixels.
/// Gradient and Laplacian require at least 3x3 and throw DimensionError
/// otherwise.
MetricValue evaluate_metric(const RealImage& image, MetricKind kind);

double metric(const RealImage& image, MetricKind kind);

}  // namespace holodepth
