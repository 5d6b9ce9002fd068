#pragma once

// Deterministic test objects on a square grid. Sparse scenes (points,
// opaque particles on a bright field, small grey patches on a textured
// bright background) are the classes inline autofocus is expected to handle.

#include "holodepth/image.hpp"

#include <cstdint>
#include <random>

namespace holodepth::testing {

class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 rng_;
};

inline RealImage point_object(std::size_t side, std::size_t x, std::size_t y) {
  RealImage img(side, side);
  img.at(x, y) = 1.0;
  return img;
}

// Opaque discs of radius 1..5 px on a uniform bright background.
inline RealImage particle_field(std::size_t side, std::uint64_t seed, int count = 60) {
  SceneRng rng(seed);
  RealImage img(side, side, 1.0);
  const std::size_t margin = 8;
  for (int k = 0; k < count; ++k) {
    const long cx = static_cast<long>(margin + rng.below(side - 2 * margin));
    const long cy = static_cast<long>(margin + rng.below(side - 2 * margin));
    const long r = 1 + static_cast<long>(rng.uniform() * 4.0);
    for (long dy = -r; dy <= r; ++dy)
      for (long dx = -r; dx <= r; ++dx)
        if (dx * dx + dy * dy <= r * r)
          img.at(static_cast<std::size_t>(cx + dx), static_cast<std::size_t>(cy + dy)) = 0.0;
  }
  return img;
}

// Textured bright background with many small rectangles at darker grey levels.
inline RealImage cluttered_scene(std::size_t side, std::uint64_t seed, int count = 300) {
  SceneRng rng(seed);
  RealImage img(side, side);
  for (double& v : img.data()) v = 0.85 + 0.1 * rng.uniform();
  for (int k = 0; k < count; ++k) {
    const std::size_t x = rng.below(side - 18);
    const std::size_t y = rng.below(side - 18);
    const std::size_t rx = 2 + static_cast<std::size_t>(rng.uniform() * 15.0);
    const std::size_t ry = 2 + static_cast<std::size_t>(rng.uniform() * 15.0);
    const double level = rng.uniform() * 0.7;
    for (std::size_t dy = 0; dy < ry; ++dy)
      for (std::size_t dx = 0; dx < rx; ++dx) img.at(x + dx, y + dy) = level;
  }
  return img;
}

inline RealImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  SceneRng rng(seed);
  RealImage img(w, h);
  for (double& v : img.data()) v = rng.uniform();
  return img;
}

}  // namespace holodepth::testing
