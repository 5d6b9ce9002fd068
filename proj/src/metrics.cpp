#include "holodepth/metrics.hpp"

#include "holodepth/error.hpp"

#include <cmath>
#include <string>

namespace holodepth {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Tamura: return "tamura";
    case MetricKind::Variance: return "variance";
    case MetricKind::Gradient: return "gradient";
    case MetricKind::Laplacian: return "laplacian";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric(std::string_view name) {
  for (const auto kind :
       {MetricKind::Tamura, MetricKind::Variance, MetricKind::Gradient, MetricKind::Laplacian})
    if (name == to_string(kind)) return kind;
  return std::nullopt;
}

namespace {

struct Moments {
  double mean;
  double variance;
};

// Two-pass population moments. The mean is accumulated as an offset from the
// first sample so a constant image gets its mean back exactly and a variance
// of exactly zero.
Moments moments(const RealImage& image) {
  if (image.empty()) throw DimensionError("metric of an empty image");
  const auto data = image.data();
  const double shift = data[0];
  double offset = 0.0;
  for (const double v : data) offset += v - shift;
  const double mean = shift + offset / static_cast<double>(data.size());
  double squares = 0.0;
  for (const double v : data) {
    const double d = v - mean;
    squares += d * d;
  }
  return {mean, squares / static_cast<double>(data.size())};
}

void require_stencil_size(const RealImage& image) {
  if (image.width() < 3 || image.height() < 3)
    throw DimensionError("gradient/laplacian metrics need at least 3x3, got " +
                         std::to_string(image.width()) + "x" + std::to_string(image.height()));
}

double gradient_energy(const RealImage& image) {
  require_stencil_size(image);
  const std::size_t w = image.width();
  const std::size_t h = image.height();
  double sum = 0.0;
  for (std::size_t y = 0; y + 1 < h; ++y) {
    for (std::size_t x = 0; x + 1 < w; ++x) {
      const double c = image.at(x, y);
      const double dx = image.at(x + 1, y) - c;
      const double dy = image.at(x, y + 1) - c;
      sum += dx * dx + dy * dy;
    }
  }
  return sum / static_cast<double>((w - 1) * (h - 1));
}

double laplacian_energy(const RealImage& image) {
  require_stencil_size(image);
  const std::size_t w = image.width();
  const std::size_t h = image.height();
  double sum = 0.0;
  for (std::size_t y = 1; y + 1 < h; ++y) {
    for (std::size_t x = 1; x + 1 < w; ++x) {
      const double lap = image.at(x - 1, y) + image.at(x + 1, y) + image.at(x, y - 1) +
                         image.at(x, y + 1) - 4.0 * image.at(x, y);
      sum += lap * lap;
    }
  }
  return sum / static_cast<double>((w - 2) * (h - 2));
}

}  // namespace

MetricValue tamura_checked(const RealImage& image) {
  const auto m = moments(image);
  if (!(m.mean > 0.0)) return {0.0, true};
  return {std::sqrt(m.variance) / m.mean, false};
}

double tamura(const RealImage& image) {
  const auto result = tamura_checked(image);
  if (result.zero_mean) warn("tamura coefficient of a zero-mean image; returning 0");
  return result.value;
}

MetricValue evaluate_metric(const RealImage& image, MetricKind kind) {
  switch (kind) {
    case MetricKind::Tamura: return tamura_checked(image);
    case MetricKind::Variance: return {moments(image).variance, false};
    case MetricKind::Gradient: return {gradient_energy(image), false};
    case MetricKind::Laplacian: return {laplacian_energy(image), false};
  }
  throw ParameterError("unknown metric kind");
}

double metric(const RealImage& image, MetricKind kind) {
  const auto result = evaluate_metric(image, kind);
  if (result.zero_mean) warn("tamura coefficient of a zero-mean image; returning 0");
  return result.value;
}

}  // namespace holodepth
