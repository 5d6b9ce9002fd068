#pragma once

// Measurement helpers shared by the optics unit tests and the acceptance run.

#include "holodepth/image.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace holodepth::testing {

// Field amplitude exp(-r^2 / w0^2) centred on pixel (n/2, n/2).
inline ComplexField gaussian_beam(std::size_t n, double w0, OpticalParams p) {
  ComplexField f(n, n, p);
  const double c = static_cast<double>(n / 2);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const double dx = (static_cast<double>(x) - c) * p.pitch;
      const double dy = (static_cast<double>(y) - c) * p.pitch;
      f.at(x, y) = std::exp(-(dx * dx + dy * dy) / (w0 * w0));
    }
  return f;
}

inline double gaussian_width_analytic(double w0, double z, double wavelength) {
  const double zr = std::numbers::pi * w0 * w0 / wavelength;
  return w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
}

// Second-moment (D4 sigma) beam radius, averaged over x and y: for an
// intensity exp(-2 r^2 / w^2) each axis has variance w^2 / 4.
inline double second_moment_radius(const ComplexField& f) {
  double total = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t y = 0; y < f.height(); ++y)
    for (std::size_t x = 0; x < f.width(); ++x) {
      const double i = std::norm(f.at(x, y));
      total += i;
      mx += i * static_cast<double>(x);
      my += i * static_cast<double>(y);
    }
  mx /= total;
  my /= total;
  double vx = 0.0, vy = 0.0;
  for (std::size_t y = 0; y < f.height(); ++y)
    for (std::size_t x = 0; x < f.width(); ++x) {
      const double i = std::norm(f.at(x, y));
      vx += i * (static_cast<double>(x) - mx) * (static_cast<double>(x) - mx);
      vy += i * (static_cast<double>(y) - my) * (static_cast<double>(y) - my);
    }
  const double sigma2 = 0.5 * (vx + vy) / total;
  return 2.0 * std::sqrt(sigma2) * f.pitch();
}

// Radii in pixels of the first `count` dark rings moving out from (cx, cy),
// from the average of the four axis-aligned profiles with a three-point
// parabolic refinement. The profile is first smoothed with [1 2 1] / 4,
// which removes the two-pixel ripple near the centre exactly without moving
// a symmetric minimum, and a dark ring must also fall below the image mean.
inline std::vector<double> ring_minima(const RealImage& img, std::size_t cx, std::size_t cy,
                                       std::size_t count, std::size_t reach) {
  std::vector<double> raw(reach + 2);
  for (std::size_t d = 0; d <= reach + 1; ++d)
    raw[d] = 0.25 * (img.at(cx + d, cy) + img.at(cx - d, cy) + img.at(cx, cy + d) +
                     img.at(cx, cy - d));
  std::vector<double> profile(reach + 1);
  for (std::size_t d = 0; d <= reach; ++d)
    profile[d] = 0.25 * (raw[d == 0 ? 1 : d - 1] + 2.0 * raw[d] + raw[d + 1]);
  double background = 0.0;
  for (double v : img.data()) background += v;
  background /= static_cast<double>(img.size());
  std::vector<double> minima;
  for (std::size_t d = 1; d < reach && minima.size() < count; ++d) {
    if (profile[d] < background && profile[d] < profile[d - 1] && profile[d] <= profile[d + 1]) {
      const double a = profile[d - 1], b = profile[d], c = profile[d + 1];
      const double denom = a - 2.0 * b + c;
      const double offset = denom > 0.0 ? 0.5 * (a - c) / denom : 0.0;
      minima.push_back(static_cast<double>(d) + offset);
    }
  }
  return minima;
}

}  // namespace holodepth::testing
