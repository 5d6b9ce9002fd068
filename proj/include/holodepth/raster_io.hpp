#pragma once

#include "holodepth/image.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace holodepth {

/// Reads a binary or ASCII netpbm file (P2, P3, P5, P6; maxval up to 65535)
/// as luminance in [0, 1]. Colour images use Rec. 601 weights.
/// Throws IoError if the file cannot be opened, FormatError if it does not
/// decode.
RealImage read_pnm(const std::filesystem::path& path);

/// Writes a binary PGM with samples mapped linearly so that 0 -> 0 and
/// full_scale -> maxval. Values above full_scale saturate.
void write_pgm(const RealImage& image, const std::filesystem::path& path, double full_scale,
               std::uint16_t maxval = 65535);

/// Bilinear resampling with corner-aligned sample positions: output index j
/// samples input coordinate j*(in-1)/(out-1).
RealImage resize_bilinear(const RealImage& image, std::size_t width, std::size_t height);

/// A 16-bit hologram PGM plus its JSON sidecar.
struct HologramFile {
  RealImage hologram;
  OpticalParams params;
  std::optional<double> depth;  ///< ground truth when known
};

/// Sidecar path for a hologram image: "<path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& image_path);

/// Writes the PGM and sidecar. Intensities are quantized to 16 bits against
/// the image maximum; the sidecar stores the scale so loading restores
/// physical units.
void write_hologram(const HologramFile& file, const std::filesystem::path& path);

/// Loads a hologram PGM. Without a sidecar the raw [0,1] luminance is used
/// and params fall back to the provided defaults.
HologramFile read_hologram(const std::filesystem::path& path, OpticalParams defaults = {});

/// Writes bytes to a temporary sibling and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace holodepth
