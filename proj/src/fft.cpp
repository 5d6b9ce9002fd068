#include "holodepth/fft.hpp"

#include "holodepth/error.hpp"
#include "holodepth/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace holodepth {

Fft1d::Fft1d(std::size_t n) : n_(n), bit_reverse_(n), twiddles_(n > 1 ? n - 1 : 0) {
  if (!is_power_of_two(n))
    throw DimensionError("transform length must be a power of two, got " + std::to_string(n));

  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bit_reverse_[i] = r;
  }

  for (std::size_t span = 2; span <= n; span <<= 1) {
    const std::size_t half = span / 2;
    for (std::size_t j = 0; j < half; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(span);
      twiddles_[half - 1 + j] = Complex(std::cos(angle), std::sin(angle));
    }
  }
}

void Fft1d::transform(Complex* data, Direction direction) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = bit_reverse_[i];
    if (r > i) std::swap(data[i], data[r]);
  }

  // Plain real arithmetic: std::complex operator* goes through the
  // NaN-recovering libgcc path, which is several times slower.
  auto* v = reinterpret_cast<double*>(data);
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  std::size_t span = 2;
  if (n_ >= 4) {
    // Spans 2 and 4 fused; their twiddles are 1 and -i (forward).
    for (std::size_t start = 0; start < n_; start += 4) {
      double* p = v + 2 * start;
      const double ar = p[0] + p[2], ai = p[1] + p[3];
      const double br = p[0] - p[2], bi = p[1] - p[3];
      const double cr = p[4] + p[6], ci = p[5] + p[7];
      const double dr = p[4] - p[6], di = p[5] - p[7];
      // d * (-i * sign): forward multiplies by -i, inverse by +i.
      const double tr = sign * di;
      const double ti = -sign * dr;
      p[0] = ar + cr;
      p[1] = ai + ci;
      p[4] = ar - cr;
      p[5] = ai - ci;
      p[2] = br + tr;
      p[3] = bi + ti;
      p[6] = br - tr;
      p[7] = bi - ti;
    }
    span = 8;
  }
  for (; span <= n_; span <<= 1) {
    const std::size_t half = span / 2;
    const Complex* w = twiddles_.data() + (half - 1);
    for (std::size_t start = 0; start < n_; start += span) {
      double* a = v + 2 * start;
      double* b = v + 2 * (start + half);
      for (std::size_t j = 0; j < half; ++j) {
        const double wr = w[j].real();
        const double wi = sign * w[j].imag();
        const double br = b[2 * j];
        const double bi = b[2 * j + 1];
        const double tr = br * wr - bi * wi;
        const double ti = br * wi + bi * wr;
        const double ar = a[2 * j];
        const double ai = a[2 * j + 1];
        a[2 * j] = ar + tr;
        a[2 * j + 1] = ai + ti;
        b[2 * j] = ar - tr;
        b[2 * j + 1] = ai - ti;
      }
    }
  }
}

void Fft1d::transform_batch(Complex* data, std::size_t batch, Direction direction) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = bit_reverse_[i];
    if (r > i) std::swap_ranges(data + i * batch, data + (i + 1) * batch, data + r * batch);
  }
  auto* v = reinterpret_cast<double*>(data);
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  const std::size_t stride = 2 * batch;
  for (std::size_t span = 2; span <= n_; span <<= 1) {
    const std::size_t half = span / 2;
    const Complex* w = twiddles_.data() + (half - 1);
    for (std::size_t start = 0; start < n_; start += span) {
      for (std::size_t j = 0; j < half; ++j) {
        const double wr = w[j].real();
        const double wi = sign * w[j].imag();
        double* a = v + (start + j) * stride;
        double* b = v + (start + j + half) * stride;
        for (std::size_t c = 0; c < stride; c += 2) {
          const double br = b[c];
          const double bi = b[c + 1];
          const double tr = br * wr - bi * wi;
          const double ti = br * wi + bi * wr;
          const double ar = a[c];
          const double ai = a[c + 1];
          a[c] = ar + tr;
          a[c + 1] = ai + ti;
          b[c] = ar - tr;
          b[c + 1] = ai - ti;
        }
      }
    }
  }
}

void fft2d(std::span<Complex> data, std::size_t width, std::size_t height, Direction direction) {
  if (!is_power_of_two(width) || !is_power_of_two(height))
    throw DimensionError("2-D transform extents must be powers of two, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  if (data.size() != width * height)
    throw DimensionError("2-D transform data length does not match extents");

  const Fft1d rows(width);
  parallel_for(0, height, [&](std::size_t y) { rows.transform(data.data() + y * width, direction); });

  // Columns in blocks: copy a height x block panel out, run the batched
  // transform down its rows, copy it back.
  constexpr std::size_t kBlock = 16;
  const Fft1d cols(height);
  const std::size_t blocks = (width + kBlock - 1) / kBlock;
  parallel_for(0, blocks, [&](std::size_t block) {
    const std::size_t x0 = block * kBlock;
    const std::size_t count = std::min(kBlock, width - x0);
    std::vector<Complex> panel(count * height);
    for (std::size_t y = 0; y < height; ++y)
      std::copy_n(data.data() + y * width + x0, count, panel.data() + y * count);
    cols.transform_batch(panel.data(), count, direction);
    for (std::size_t y = 0; y < height; ++y)
      std::copy_n(panel.data() + y * count, count, data.data() + y * width + x0);
  });

  if (direction == Direction::Inverse) {
    const double scale = 1.0 / static_cast<double>(width * height);
    for (auto& value : data) value *= scale;
  }
}

ComplexField forward_dft(const ComplexField& field) {
  ComplexField out = field;
  fft2d(out.data(), out.width(), out.height(), Direction::Forward);
  return out;
}

ComplexField inverse_dft(const ComplexField& spectrum) {
  ComplexField out = spectrum;
  fft2d(out.data(), out.width(), out.height(), Direction::Inverse);
  return out;
}

}  // namespace holodepth
