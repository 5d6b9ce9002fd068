#pragma once

#include "holodepth/image.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace holodepth {

enum class Direction { Forward, Inverse };

/// Iterative radix-2 transform of one power-of-two length. Unnormalized in
/// both directions; the plan is immutable and safe to share across threads.
class Fft1d {
 public:
  explicit Fft1d(std::size_t n);

  std::size_t size() const { return n_; }
  void transform(Complex* data, Direction direction) const;
  /// Transforms `batch` interleaved sequences: element k of sequence c is
  /// data[k * batch + c].
  void transform_batch(Complex* data, std::size_t batch, Direction direction) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bit_reverse_;
  // Stage twiddles packed back to back: stage with span L stores
  // exp(-2*pi*i*j/L) for j < L/2 starting at offset L/2 - 1.
  std::vector<Complex> twiddles_;
};

/// In-place 2-D transform of a row-major width x height grid. Forward is
/// unnormalized with DC at index 0; Inverse carries the 1/(width*height)
/// factor so that the pair is an exact inverse. Throws DimensionError for
/// non-power-of-two extents or a length mismatch.
void fft2d(std::span<Complex> data, std::size_t width, std::size_t height, Direction direction);

ComplexField forward_dft(const ComplexField& field);
ComplexField inverse_dft(const ComplexField& spectrum);

}  // namespace holodepth
