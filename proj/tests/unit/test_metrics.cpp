#include "doctest.h"
#include "holodepth/error.hpp"
#include "holodepth/metrics.hpp"
#include "oracles/naive_metrics.hpp"
#include "support/scenes.hpp"

using namespace holodepth;

namespace {

oracle::Plane plane(const RealImage& img) {
  return {img.width(), img.height(), {img.data().begin(), img.data().end()}};
}

double naive(const RealImage& img, MetricKind kind) {
  const auto p = plane(img);
  switch (kind) {
    case MetricKind::Tamura: return oracle::tamura(p);
    case MetricKind::Variance: return oracle::variance(p);
    case MetricKind::Gradient: return oracle::gradient(p);
    case MetricKind::Laplacian: return oracle::laplacian(p);
  }
  return -1.0;
}

constexpr MetricKind kAll[] = {MetricKind::Tamura, MetricKind::Variance, MetricKind::Gradient,
                               MetricKind::Laplacian};

}  // namespace

TEST_CASE("metrics match direct double loops") {
  const std::pair<std::size_t, std::size_t> sizes[] = {{3, 3}, {7, 5}, {64, 64}, {256, 128}};
  std::uint64_t seed = 40;
  for (auto [w, h] : sizes) {
    const RealImage img = holodepth::testing::random_image(w, h, seed++);
    for (MetricKind k : kAll) {
      CAPTURE(to_string(k));
      const double want = naive(img, k);
      CHECK(std::abs(metric(img, k) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("tamura is scale invariant, the others scale quadratically") {
  const RealImage img = holodepth::testing::cluttered_scene(128, 2, 40);
  for (double c : {0.01, 3.0, 250.0}) {
    RealImage scaled = img;
    for (double& v : scaled.data()) v *= c;
    CHECK(std::abs(tamura(scaled) - tamura(img)) <= 1e-12);
    for (MetricKind k : {MetricKind::Variance, MetricKind::Gradient, MetricKind::Laplacian})
      CHECK(std::abs(metric(scaled, k) - c * c * metric(img, k)) <=
            1e-10 * c * c * metric(img, k));
  }
}

TEST_CASE("constant images score zero") {
  for (double level : {0.0, 0.5, 0.37, 0.1, 1234.567}) {
    const RealImage img(100, 61, level);
    for (MetricKind k : kAll) CHECK(metric(img, k) == 0.0);
  }
}

TEST_CASE("half dark, half at two") {
  RealImage img(16, 16);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 8; x < 16; ++x) img.at(x, y) = 2.0;
  // mean 1, population sigma 1
  CHECK(tamura(img) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(metric(img, MetricKind::Variance) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("linear ramp has no interior second difference") {
  RealImage img(20, 12);
  for (std::size_t y = 0; y < 12; ++y)
    for (std::size_t x = 0; x < 20; ++x) img.at(x, y) = 0.5 + 0.25 * x + 0.125 * y;
  CHECK(metric(img, MetricKind::Laplacian) == 0.0);
  CHECK(metric(img, MetricKind::Gradient) == doctest::Approx(0.25 * 0.25 + 0.125 * 0.125));
}

TEST_CASE("tamura and variance ignore cyclic shifts") {
  const RealImage img = holodepth::testing::random_image(32, 24, 77);
  RealImage shifted(32, 24);
  for (std::size_t y = 0; y < 24; ++y)
    for (std::size_t x = 0; x < 32; ++x) shifted.at((x + 5) % 32, (y + 11) % 24) = img.at(x, y);
  CHECK(tamura(shifted) == doctest::Approx(tamura(img)).epsilon(1e-13));
  CHECK(metric(shifted, MetricKind::Variance) ==
        doctest::Approx(metric(img, MetricKind::Variance)).epsilon(1e-13));
}

TEST_CASE("all metrics are non-negative") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RealImage img = holodepth::testing::random_image(16, 16, s);
    for (MetricKind k : kAll) CHECK(metric(img, k) >= 0.0);
  }
}

TEST_CASE("zero-mean images trip the tamura guard") {
  const RealImage img(8, 8);
  const MetricValue v = tamura_checked(img);
  CHECK(v.zero_mean);
  CHECK(v.value == 0.0);
  CHECK(evaluate_metric(img, MetricKind::Tamura).zero_mean);
  CHECK_FALSE(evaluate_metric(img, MetricKind::Variance).zero_mean);
  CHECK_FALSE(tamura_checked(RealImage(8, 8, 1.0)).zero_mean);
}

TEST_CASE("stencils need a 3x3 image") {
  CHECK_THROWS_AS(metric(RealImage(2, 8, 1.0), MetricKind::Gradient), DimensionError);
  CHECK_THROWS_AS(metric(RealImage(8, 2, 1.0), MetricKind::Laplacian), DimensionError);
  CHECK_THROWS(metric(RealImage(), MetricKind::Tamura));
  CHECK_NOTHROW(metric(RealImage(1, 1, 1.0), MetricKind::Variance));
}

TEST_CASE("metric names") {
  for (MetricKind k : kAll) CHECK(parse_metric(to_string(k)) == k);
  CHECK_FALSE(parse_metric("entropy").has_value());
}
