#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace holodepth {

using Complex = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Sampling geometry shared by every field on the same sensor.
struct OpticalParams {
  double pitch = 10e-6;        ///< meters per pixel, identical in x and y
  double wavelength = 633e-9;  ///< meters
};

/// Throws ParameterError unless pitch and wavelength are positive and finite.
void validate(const OpticalParams& params);

/// Sampled complex optical field. Row-major, power-of-two extents.
class ComplexField {
 public:
  ComplexField(std::size_t width, std::size_t height, OpticalParams params);
  ComplexField(std::size_t width, std::size_t height, OpticalParams params,
               std::vector<Complex> data);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  const OpticalParams& params() const { return params_; }
  double pitch() const { return params_.pitch; }
  double wavelength() const { return params_.wavelength; }

  Complex& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const Complex& at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  /// Sum of |u|^2 over all samples.
  double energy() const;

 private:
  std::size_t width_;
  std::size_t height_;
  OpticalParams params_;
  std::vector<Complex> data_;
};

/// Row-major real image with non-negative samples (intensities, amplitudes).
class RealImage {
 public:
  RealImage() = default;
  RealImage(std::size_t width, std::size_t height, double fill = 0.0);
  /// Throws DimensionError on a length mismatch, ParameterError on a negative
  /// or non-finite sample.
  RealImage(std::size_t width, std::size_t height, std::vector<double> data);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double max() const;

  friend bool operator==(const RealImage&, const RealImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

/// Real image lifted to a complex field with zero imaginary part.
ComplexField to_field(const RealImage& image, OpticalParams params);

/// |u|^2 per sample.
RealImage intensity(const ComplexField& field);

}  // namespace holodepth
