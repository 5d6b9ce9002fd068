#include "holodepth/image.hpp"

#include "holodepth/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace holodepth {

void validate(const OpticalParams& params) {
  if (!(params.pitch > 0.0) || !std::isfinite(params.pitch))
    throw ParameterError("pitch must be positive, got " + std::to_string(params.pitch));
  if (!(params.wavelength > 0.0) || !std::isfinite(params.wavelength))
    throw ParameterError("wavelength must be positive, got " +
                         std::to_string(params.wavelength));
}

namespace {

void require_power_of_two(std::size_t width, std::size_t height) {
  if (!is_power_of_two(width) || !is_power_of_two(height))
    throw DimensionError("field extents must be powers of two, got " + std::to_string(width) +
                         "x" + std::to_string(height));
}

}  // namespace

ComplexField::ComplexField(std::size_t width, std::size_t height, OpticalParams params)
    : ComplexField(width, height, params, std::vector<Complex>(width * height)) {}

ComplexField::ComplexField(std::size_t width, std::size_t height, OpticalParams params,
                           std::vector<Complex> data)
    : width_(width), height_(height), params_(params), data_(std::move(data)) {
  require_power_of_two(width, height);
  validate(params);
  if (data_.size() != width * height)
    throw DimensionError("field data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
}

double ComplexField::energy() const {
  double sum = 0.0;
  for (const auto& v : data_) sum += std::norm(v);
  return sum;
}

RealImage::RealImage(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), data_(width * height, fill) {
  if (!(fill >= 0.0) || !std::isfinite(fill))
    throw ParameterError("image fill value must be finite and non-negative");
}

RealImage::RealImage(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != width * height)
    throw DimensionError("image data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
  for (const double v : data_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ParameterError("image samples must be finite and non-negative");
}

double RealImage::max() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

ComplexField to_field(const RealImage& image, OpticalParams params) {
  std::vector<Complex> data(image.data().begin(), image.data().end());
  return ComplexField(image.width(), image.height(), params, std::move(data));
}

RealImage intensity(const ComplexField& field) {
  std::vector<double> out(field.size());
  const auto in = field.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(in[i]);
  return RealImage(field.width(), field.height(), std::move(out));
}

}  // namespace holodepth
