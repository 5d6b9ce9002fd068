#include "holodepth/optics.hpp"

#include "holodepth/error.hpp"
#include "holodepth/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace holodepth {

namespace {

// The single expression for H so that every code path agrees bit for bit.
inline Complex transfer_sample(double axial, double z) {
  if (axial < 0.0) return Complex(0.0, 0.0);
  const double phase = 2.0 * std::numbers::pi * z * axial;
  return Complex(std::cos(phase), std::sin(phase));
}

inline Complex multiply(Complex a, Complex b) {
  return Complex(a.real() * b.real() - a.imag() * b.imag(),
                 a.real() * b.imag() + a.imag() * b.real());
}

}  // namespace

double dft_frequency(std::size_t k, std::size_t n, double pitch) {
  const auto signed_index = k < n / 2 ? static_cast<double>(k)
                                      : static_cast<double>(k) - static_cast<double>(n);
  return signed_index / (static_cast<double>(n) * pitch);
}

AngularSpectrum::AngularSpectrum(std::size_t width, std::size_t height, OpticalParams params)
    : width_(width), height_(height), params_(params), index_(width * height) {
  validate(params);
  if (!is_power_of_two(width) || !is_power_of_two(height))
    throw DimensionError("angular spectrum grid must have power-of-two extents");
  // H depends on mu^2 + nu^2 only, and the frequency of index k and n - k
  // differ only in sign, so one quadrant of (|k|, |l|) holds every value.
  const std::size_t folded_w = width / 2 + 1;
  const std::size_t folded_h = height / 2 + 1;
  const double cutoff = 1.0 / (params.wavelength * params.wavelength);
  axial_.resize(folded_w * folded_h);
  for (std::size_t l = 0; l < folded_h; ++l) {
    const double nu = dft_frequency(l, height, params.pitch);
    for (std::size_t k = 0; k < folded_w; ++k) {
      const double mu = dft_frequency(k, width, params.pitch);
      const double radial = mu * mu + nu * nu;
      axial_[l * folded_w + k] = radial > cutoff ? -1.0 : std::sqrt(cutoff - radial);
    }
  }
  for (std::size_t l = 0; l < height; ++l) {
    const std::size_t fl = std::min(l, height - l) % height;
    for (std::size_t k = 0; k < width; ++k) {
      const std::size_t fk = std::min(k, width - k) % width;
      index_[l * width + k] = static_cast<std::uint32_t>(fl * folded_w + fk);
    }
  }
}

std::vector<Complex> AngularSpectrum::folded_transfer(double z) const {
  std::vector<Complex> table(axial_.size());
  for (std::size_t i = 0; i < axial_.size(); ++i) table[i] = transfer_sample(axial_[i], z);
  return table;
}

TransferField AngularSpectrum::transfer(double z) const {
  const auto table = folded_transfer(z);
  TransferField out{width_, height_, std::vector<Complex>(index_.size())};
  for (std::size_t i = 0; i < index_.size(); ++i) out.data[i] = table[index_[i]];
  return out;
}

void AngularSpectrum::apply(std::span<Complex> spectrum, double z) const {
  if (spectrum.size() != index_.size())
    throw DimensionError("spectrum size does not match the transfer grid");
  const auto table = folded_transfer(z);
  for (std::size_t i = 0; i < index_.size(); ++i)
    spectrum[i] = multiply(spectrum[i], table[index_[i]]);
}

std::size_t AngularSpectrum::propagating_count() const {
  std::size_t count = 0;
  for (const auto i : index_) count += axial_[i] >= 0.0 ? 1 : 0;
  return count;
}

TransferField transfer_function(std::size_t width, std::size_t height, OpticalParams params,
                                double z) {
  return AngularSpectrum(width, height, params).transfer(z);
}

ComplexField propagate(const ComplexField& field, double z) {
  ComplexField out = field;
  fft2d(out.data(), out.width(), out.height(), Direction::Forward);
  AngularSpectrum(out.width(), out.height(), out.params()).apply(out.data(), z);
  fft2d(out.data(), out.width(), out.height(), Direction::Inverse);
  return out;
}

RealImage synthesize_inline_hologram(const RealImage& object, double z, OpticalParams params) {
  const double peak = object.max();
  ComplexField field = to_field(object, params);
  if (peak > 0.0)
    for (auto& v : field.data()) v /= peak;
  const ComplexField at_sensor = propagate(field, z);
  // The plane reference travels the same distance as the object wave, so its
  // phase at the sensor is the DC sample of H(z).
  const Complex reference = transfer_sample(1.0 / params.wavelength, z);
  std::vector<double> out(at_sensor.size());
  const auto u = at_sensor.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(u[i] + reference);
  return RealImage(object.width(), object.height(), std::move(out));
}

HologramReconstructor::HologramReconstructor(const RealImage& hologram, OpticalParams params)
    : propagation_(hologram.width(), hologram.height(), params),
      spectrum_(hologram.data().begin(), hologram.data().end()) {
  fft2d(spectrum_, hologram.width(), hologram.height(), Direction::Forward);
}

RealImage HologramReconstructor::intensity_at(double z) const {
  std::vector<Complex> field = spectrum_;
  propagation_.apply(field, -z);
  fft2d(field, width(), height(), Direction::Inverse);
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(field[i]);
  return RealImage(width(), height(), std::move(out));
}

RealImage reconstruct_intensity(const RealImage& hologram, double z, OpticalParams params) {
  return HologramReconstructor(hologram, params).intensity_at(z);
}

}  // namespace holodepth
