#pragma once

#include "holodepth/image.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace holodepth {

/// Angular-spectrum transfer function sampled on the unshifted DFT grid.
/// Unit modulus on the propagating band, exactly zero on evanescent samples.
struct TransferField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Complex> data;
};

/// Signed spatial frequency of DFT index k on an n-sample axis with the
/// given pitch: k/(n*pitch) for k < n/2, (k-n)/(n*pitch) otherwise.
double dft_frequency(std::size_t k, std::size_t n, double pitch);

/// Precomputed axial frequency sqrt(1/lambda^2 - mu^2 - nu^2) for one grid.
/// Evaluating the transfer function for many distances on the same grid
/// only costs one sincos per sample.
class AngularSpectrum {
 public:
  AngularSpectrum(std::size_t width, std::size_t height, OpticalParams params);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const OpticalParams& params() const { return params_; }

  /// H(mu, nu; z) for every sample.
  TransferField transfer(double z) const;

  /// spectrum *= H(z), sample by sample.
  void apply(std::span<Complex> spectrum, double z) const;

  /// Number of samples inside the propagating band.
  std::size_t propagating_count() const;
  bool is_propagating(std::size_t index) const { return axial_[index_[index]] >= 0.0; }

 private:
  std::vector<Complex> folded_transfer(double z) const;

  std::size_t width_;
  std::size_t height_;
  OpticalParams params_;
  std::vector<double> axial_;         // per folded (|k|, |l|); negative = evanescent
  std::vector<std::uint32_t> index_;  // per sample, into axial_
};

TransferField transfer_function(std::size_t width, std::size_t height, OpticalParams params,
                                double z);

/// F^-1[F[field] H(z)]. Negative z back-propagates. Metadata is unchanged.
ComplexField propagate(const ComplexField& field, double z);

/// Inline hologram of an amplitude object: the object is rescaled so its
/// peak is 1 (an all-zero object stays zero), propagated by +z, added to a
/// unit plane reference and recorded as |u_z + 1|^2.
RealImage synthesize_inline_hologram(const RealImage& object, double z, OpticalParams params);

/// Reconstructs one hologram at many distances. The hologram spectrum is
/// computed once; each call applies H(-z) and inverse transforms.
class HologramReconstructor {
 public:
  HologramReconstructor(const RealImage& hologram, OpticalParams params);

  /// |F^-1[F[h] H(-z)]|^2.
  RealImage intensity_at(double z) const;

  std::size_t width() const { return propagation_.width(); }
  std::size_t height() const { return propagation_.height(); }

 private:
  AngularSpectrum propagation_;
  std::vector<Complex> spectrum_;
};

/// Back-propagates a real hologram by -z and returns the squared modulus.
RealImage reconstruct_intensity(const RealImage& hologram, double z, OpticalParams params);

}  // namespace holodepth
