#pragma once

#include "holodepth/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace holodepth {

enum class LayerKind : std::uint8_t {
  Conv3x3 = 1,
  ReLU = 2,
  MaxPool2 = 3,
  Flatten = 4,
  FullyConnected = 5,
  LinearOutput = 6,
};

std::string_view to_string(LayerKind kind);

/// Activation extents, channel-major (CHW). Vectors use (length, 1, 1).
struct Shape {
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;

  std::size_t count() const { return std::size_t{channels} * height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

/// One layer and its tensors.
///
/// Conv3x3: stride 1, zero "same" padding. weights are out_ch x in_ch x 3 x 3
/// (out-channel major, then in-channel, row, column); bias has out_ch values.
/// FullyConnected / LinearOutput: weights are out x in row-major, bias has
/// out values. FullyConnected is followed by an explicit ReLU layer when one
/// is wanted; LinearOutput is the identity-activated output.
/// ReLU, MaxPool2 (2x2, stride 2) and Flatten carry no tensors.
struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  Shape in;
  Shape out;
  std::vector<float> weights;
  std::vector<float> bias;
};

/// Weight-file echo of the dataset the network was trained on.
struct FeatureEcho {
  FeatureKind kind = FeatureKind::Spectrum;
  FeatureNormalization normalization;

  friend bool operator==(const FeatureEcho&, const FeatureEcho&) = default;
};

inline constexpr std::uint32_t kWeightsVersion = 1;

struct CnnWeights {
  std::uint32_t format_version = kWeightsVersion;
  std::vector<LayerSpec> layers;
  FeatureEcho echo;

  Shape input() const { return layers.empty() ? Shape{} : layers.front().in; }
};

/// Checks every layer: out shape follows from in shape and kind, tensor
/// sizes match, values are finite, consecutive shapes chain and the final
/// layer is LinearOutput with one output. Throws FormatError.
void validate_chain(const CnnWeights& weights);

/// Checks the exact 128x128x1 reference stack: four Conv3x3+ReLU+MaxPool2
/// blocks with 32, 64, 128 and 256 kernels, Flatten to 16384, two
/// FullyConnected+ReLU layers of 2048 and a LinearOutput of 1.
/// Throws FormatError on any deviation.
void validate_reference_architecture(const CnnWeights& weights);

/// Layer list of the reference network with zero-filled tensors.
std::vector<LayerSpec> reference_layers();

/// Builds a network from layer kinds and widths; shapes are derived from
/// the input. conv entries give out-channels, fc entries give widths.
struct LayerPlan {
  LayerKind kind;
  std::uint32_t width = 0;
};
std::vector<LayerSpec> build_layers(Shape input, std::span<const LayerPlan> plan);

/// He-uniform weights and zero biases, deterministic for a seed.
void initialize_random(CnnWeights& weights, std::uint64_t seed);

/// Reference network with random weights.
CnnWeights make_reference_network(std::uint64_t seed, FeatureEcho echo = {});

struct Prediction {
  double depth = 0.0;       ///< meters
  double elapsed_ms = 0.0;  ///< forward pass only
};

/// Activations after running the first layer_count layers. Used by the
/// homogeneity checks and by forward itself.
std::vector<double> run_layers(const CnnWeights& weights, std::span<const float> feature,
                               std::size_t layer_count);

/// Single-sample forward pass with 64-bit accumulation. Throws
/// DimensionError if the feature does not match the input shape and
/// ParameterError on non-finite input values.
Prediction forward(const CnnWeights& weights, std::span<const float> feature);

/// Like forward, but first checks that the feature kind matches the weight
/// file's echo.
Prediction predict(const CnnWeights& weights, std::span<const float> feature, FeatureKind kind);

/// Mean squared error in squared meters.
double mse(std::span<const double> predictions, std::span<const double> labels);

enum class ArchitectureCheck { Reference, ChainOnly };

/// Little-endian "HDCW" file: u32 version, u32 layer count, then per layer
/// u8 kind tag, six u32 (in c/h/w, out c/h/w) and the f32 tensors
/// (weights, then bias); then the echo block: u8 feature kind, u8
/// log_applied, f64 feature_min, f64 feature_max.
std::string encode_weights(const CnnWeights& weights);
CnnWeights decode_weights(std::string_view bytes,
                          ArchitectureCheck check = ArchitectureCheck::Reference);

void save_weights(const CnnWeights& weights, const std::filesystem::path& path);
CnnWeights load_weights(const std::filesystem::path& path,
                        ArchitectureCheck check = ArchitectureCheck::Reference);

}  // namespace holodepth
