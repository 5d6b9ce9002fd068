#include "holodepth/cnn.hpp"

#include "binary.hpp"
#include "holodepth/error.hpp"
#include "holodepth/parallel.hpp"
#include "holodepth/raster_io.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

namespace holodepth {

namespace fs = std::filesystem;

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv3x3: return "conv3x3";
    case LayerKind::ReLU: return "relu";
    case LayerKind::MaxPool2: return "maxpool2";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::FullyConnected: return "fully_connected";
    case LayerKind::LinearOutput: return "linear_output";
  }
  return "unknown";
}

std::string to_string(const Shape& s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
         std::to_string(s.channels);
}

namespace {

bool is_vector(const Shape& s) { return s.height == 1 && s.width == 1; }

bool has_tensors(LayerKind kind) {
  return kind == LayerKind::Conv3x3 || kind == LayerKind::FullyConnected ||
         kind == LayerKind::LinearOutput;
}

bool valid_kind_tag(std::uint8_t tag) { return tag >= 1 && tag <= 6; }

std::size_t expected_weight_count(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::Conv3x3: return std::size_t{l.out.channels} * l.in.channels * 9;
    case LayerKind::FullyConnected:
    case LayerKind::LinearOutput: return l.out.count() * l.in.count();
    default: return 0;
  }
}

std::size_t expected_bias_count(const LayerSpec& l) {
  return has_tensors(l.kind) ? std::size_t{l.out.channels} : 0;
}

[[noreturn]] void chain_error(std::size_t index, const LayerSpec& l, const std::string& what) {
  throw FormatError("layer " + std::to_string(index) + " (" + std::string(to_string(l.kind)) +
                    ", " + to_string(l.in) + " -> " + to_string(l.out) + "): " + what);
}

void validate_layer(std::size_t index, const LayerSpec& l, bool scan_values) {
  if (l.in.count() == 0 || l.out.count() == 0) chain_error(index, l, "empty shape");
  switch (l.kind) {
    case LayerKind::Conv3x3:
      if (l.out.height != l.in.height || l.out.width != l.in.width)
        chain_error(index, l, "same-padded convolution must keep spatial extents");
      break;
    case LayerKind::ReLU:
      if (l.out != l.in) chain_error(index, l, "activation must keep its shape");
      break;
    case LayerKind::MaxPool2:
      if (l.in.height % 2 != 0 || l.in.width % 2 != 0)
        chain_error(index, l, "2x2 pooling needs even extents");
      if (l.out != Shape{l.in.channels, l.in.height / 2, l.in.width / 2})
        chain_error(index, l, "2x2 stride-2 pooling halves the extents");
      break;
    case LayerKind::Flatten:
      if (l.out != Shape{static_cast<std::uint32_t>(l.in.count()), 1, 1})
        chain_error(index, l, "flatten must produce a vector of every input value");
      break;
    case LayerKind::FullyConnected:
    case LayerKind::LinearOutput:
      if (!is_vector(l.in) || !is_vector(l.out)) chain_error(index, l, "dense layers take vectors");
      break;
  }
  if (l.weights.size() != expected_weight_count(l))
    chain_error(index, l, "weight tensor has " + std::to_string(l.weights.size()) +
                              " values, expected " + std::to_string(expected_weight_count(l)));
  if (l.bias.size() != expected_bias_count(l))
    chain_error(index, l, "bias has " + std::to_string(l.bias.size()) + " values, expected " +
                              std::to_string(expected_bias_count(l)));
  if (!scan_values) return;
  for (const float v : l.weights)
    if (!std::isfinite(v)) chain_error(index, l, "non-finite weight");
  for (const float v : l.bias)
    if (!std::isfinite(v)) chain_error(index, l, "non-finite bias");
}

// --- layer kernels. Convolution is cross-correlation, matching common
// training frameworks: out[o,y,x] = b[o] + sum w[o,i,ky,kx] in[i,y+ky-1,x+kx-1].

std::vector<double> conv3x3(const LayerSpec& l, const std::vector<double>& in) {
  const std::size_t channels_in = l.in.channels;
  const std::size_t h = l.in.height;
  const std::size_t w = l.in.width;
  const std::size_t plane = h * w;
  std::vector<double> out(std::size_t{l.out.channels} * plane);
  parallel_for(0, l.out.channels, [&](std::size_t o) {
    double* acc = out.data() + o * plane;
    std::fill(acc, acc + plane, static_cast<double>(l.bias[o]));
    for (std::size_t i = 0; i < channels_in; ++i) {
      const double* src_plane = in.data() + i * plane;
      const float* kernel = l.weights.data() + (o * channels_in + i) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const long dy = ky - 1;
        const std::size_t y_lo = dy < 0 ? 1 : 0;
        const std::size_t y_hi = dy > 0 ? h - 1 : h;
        for (int kx = 0; kx < 3; ++kx) {
          const long dx = kx - 1;
          const double weight = kernel[ky * 3 + kx];
          if (weight == 0.0) continue;
          const std::size_t x_lo = dx < 0 ? 1 : 0;
          const std::size_t x_hi = dx > 0 ? w - 1 : w;
          for (std::size_t y = y_lo; y < y_hi; ++y) {
            const double* src = src_plane + (static_cast<long>(y) + dy) * static_cast<long>(w) + dx;
            double* dst = acc + y * w;
            for (std::size_t x = x_lo; x < x_hi; ++x) dst[x] += weight * src[x];
          }
        }
      }
    }
  });
  return out;
}

std::vector<double> max_pool2(const LayerSpec& l, const std::vector<double>& in) {
  const std::size_t w = l.in.width;
  const std::size_t oh = l.out.height;
  const std::size_t ow = l.out.width;
  std::vector<double> out(l.out.count());
  for (std::size_t c = 0; c < l.out.channels; ++c) {
    const double* src = in.data() + c * l.in.height * w;
    double* dst = out.data() + c * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        const double* p = src + 2 * y * w + 2 * x;
        dst[y * ow + x] = std::max(std::max(p[0], p[1]), std::max(p[w], p[w + 1]));
      }
    }
  }
  return out;
}

std::vector<double> dense(const LayerSpec& l, const std::vector<double>& in) {
  const std::size_t cols = l.in.count();
  std::vector<double> out(l.out.count());
  parallel_for(0, out.size(), [&](std::size_t r) {
    const float* row = l.weights.data() + r * cols;
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) sum += static_cast<double>(row[j]) * in[j];
    out[r] = sum + static_cast<double>(l.bias[r]);
  });
  return out;
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Shapes, tensor sizes and adjacency of every layer; enough for the kernels
// to stay in bounds.
void validate_structure(const CnnWeights& weights, bool scan_values) {
  if (weights.layers.empty()) throw FormatError("network has no layers");
  for (std::size_t i = 0; i < weights.layers.size(); ++i) {
    const auto& l = weights.layers[i];
    validate_layer(i, l, scan_values);
    if (i > 0 && weights.layers[i - 1].out != l.in)
      chain_error(i, l,
                  "input does not match previous output " + to_string(weights.layers[i - 1].out));
    if (l.kind == LayerKind::LinearOutput && i + 1 != weights.layers.size())
      chain_error(i, l, "linear output must be the last layer");
  }
}

}  // namespace

void validate_chain(const CnnWeights& weights) {
  validate_structure(weights, true);
  const auto& last = weights.layers.back();
  if (last.kind != LayerKind::LinearOutput || last.out.count() != 1)
    throw FormatError("network must end in a linear output of width 1");
  for (const double v : {weights.echo.normalization.feature_min,
                         weights.echo.normalization.feature_max})
    if (!std::isfinite(v)) throw FormatError("normalization echo is not finite");
}

std::vector<LayerSpec> build_layers(Shape input, std::span<const LayerPlan> plan) {
  std::vector<LayerSpec> layers;
  Shape current = input;
  for (const auto& step : plan) {
    LayerSpec l;
    l.kind = step.kind;
    l.in = current;
    switch (step.kind) {
      case LayerKind::Conv3x3: l.out = {step.width, current.height, current.width}; break;
      case LayerKind::ReLU: l.out = current; break;
      case LayerKind::MaxPool2:
        l.out = {current.channels, current.height / 2, current.width / 2};
        break;
      case LayerKind::Flatten: l.out = {static_cast<std::uint32_t>(current.count()), 1, 1}; break;
      case LayerKind::FullyConnected:
      case LayerKind::LinearOutput: l.out = {step.width, 1, 1}; break;
    }
    l.weights.assign(expected_weight_count(l), 0.0f);
    l.bias.assign(expected_bias_count(l), 0.0f);
    current = l.out;
    layers.push_back(std::move(l));
  }
  return layers;
}

std::vector<LayerSpec> reference_layers() {
  using K = LayerKind;
  const std::array<LayerPlan, 18> plan{{
      {K::Conv3x3, 32},  {K::ReLU}, {K::MaxPool2},
      {K::Conv3x3, 64},  {K::ReLU}, {K::MaxPool2},
      {K::Conv3x3, 128}, {K::ReLU}, {K::MaxPool2},
      {K::Conv3x3, 256}, {K::ReLU}, {K::MaxPool2},
      {K::Flatten},
      {K::FullyConnected, 2048}, {K::ReLU},
      {K::FullyConnected, 2048}, {K::ReLU},
      {K::LinearOutput, 1},
  }};
  return build_layers({1, 128, 128}, plan);
}

void validate_reference_architecture(const CnnWeights& weights) {
  const auto reference = reference_layers();
  if (weights.layers.size() != reference.size())
    throw FormatError("expected " + std::to_string(reference.size()) +
                      " layers in the reference network, found " +
                      std::to_string(weights.layers.size()));
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const auto& got = weights.layers[i];
    const auto& want = reference[i];
    if (got.kind != want.kind || got.in != want.in || got.out != want.out)
      throw FormatError("layer " + std::to_string(i) + " is " + std::string(to_string(got.kind)) +
                        " " + to_string(got.in) + " -> " + to_string(got.out) + ", expected " +
                        std::string(to_string(want.kind)) + " " + to_string(want.in) + " -> " +
                        to_string(want.out));
  }
}

void initialize_random(CnnWeights& weights, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : weights.layers) {
    if (!has_tensors(l.kind)) continue;
    const double fan_in = l.kind == LayerKind::Conv3x3 ? 9.0 * l.in.channels
                                                       : static_cast<double>(l.in.count());
    const double limit = std::sqrt(6.0 / fan_in);
    for (auto& v : l.weights) v = static_cast<float>((2.0 * unit_uniform(rng) - 1.0) * limit);
    std::fill(l.bias.begin(), l.bias.end(), 0.0f);
  }
}

CnnWeights make_reference_network(std::uint64_t seed, FeatureEcho echo) {
  CnnWeights weights;
  weights.layers = reference_layers();
  weights.echo = echo;
  initialize_random(weights, seed);
  return weights;
}

std::vector<double> run_layers(const CnnWeights& weights, std::span<const float> feature,
                               std::size_t layer_count) {
  validate_structure(weights, false);
  if (feature.size() != weights.input().count())
    throw DimensionError("feature has " + std::to_string(feature.size()) +
                         " values, network input " + to_string(weights.input()) + " needs " +
                         std::to_string(weights.input().count()));
  for (const float v : feature)
    if (!std::isfinite(v)) throw ParameterError("feature contains non-finite values");

  std::vector<double> act(feature.begin(), feature.end());
  const std::size_t n = std::min(layer_count, weights.layers.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = weights.layers[i];
    switch (l.kind) {
      case LayerKind::Conv3x3: act = conv3x3(l, act); break;
      case LayerKind::ReLU:
        for (auto& v : act) v = v > 0.0 ? v : 0.0;
        break;
      case LayerKind::MaxPool2: act = max_pool2(l, act); break;
      case LayerKind::Flatten: break;  // CHW storage is already flat
      case LayerKind::FullyConnected:
      case LayerKind::LinearOutput: act = dense(l, act); break;
    }
  }
  return act;
}

Prediction forward(const CnnWeights& weights, std::span<const float> feature) {
  const auto start = std::chrono::steady_clock::now();
  const auto out = run_layers(weights, feature, weights.layers.size());
  const auto stop = std::chrono::steady_clock::now();
  if (out.size() != 1) throw FormatError("network output is not a scalar");
  if (!std::isfinite(out[0])) throw Error("network produced a non-finite prediction");
  return {out[0], std::chrono::duration<double, std::milli>(stop - start).count()};
}

Prediction predict(const CnnWeights& weights, std::span<const float> feature, FeatureKind kind) {
  if (kind != weights.echo.kind)
    throw ParameterError("feature kind " + std::string(to_string(kind)) +
                         " does not match the network's " +
                         std::string(to_string(weights.echo.kind)));
  return forward(weights, feature);
}

double mse(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size())
    throw DimensionError("mse: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
  if (predictions.empty()) throw DimensionError("mse of empty lists");
  double sum = 0.0;
  for (std::size_t j = 0; j < predictions.size(); ++j) {
    const double d = predictions[j] - labels[j];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

// --- file format ---------------------------------------------------------------

std::string encode_weights(const CnnWeights& weights) {
  validate_chain(weights);
  detail::ByteWriter w;
  w.bytes("HDCW");
  w.u32(weights.format_version);
  w.u32(static_cast<std::uint32_t>(weights.layers.size()));
  for (const auto& l : weights.layers) {
    w.u8(static_cast<std::uint8_t>(l.kind));
    for (const auto& s : {l.in, l.out}) {
      w.u32(s.channels);
      w.u32(s.height);
      w.u32(s.width);
    }
    for (const float v : l.weights) w.f32(v);
    for (const float v : l.bias) w.f32(v);
  }
  w.u8(static_cast<std::uint8_t>(weights.echo.kind));
  w.u8(weights.echo.normalization.log_applied ? 1 : 0);
  w.f64(weights.echo.normalization.feature_min);
  w.f64(weights.echo.normalization.feature_max);
  return w.take();
}

CnnWeights decode_weights(std::string_view bytes, ArchitectureCheck check) {
  detail::ByteReader r(bytes, "weight file");
  if (r.bytes(4) != "HDCW") throw FormatError("weight file: bad magic");
  CnnWeights weights;
  weights.format_version = r.u32();
  if (weights.format_version != kWeightsVersion)
    throw FormatError("weight file: unsupported version " +
                      std::to_string(weights.format_version));
  const std::uint32_t count = r.u32();
  if (count == 0 || count > 4096) throw FormatError("weight file: implausible layer count");
  weights.layers.resize(count);
  for (auto& l : weights.layers) {
    const std::uint8_t tag = r.u8();
    if (!valid_kind_tag(tag)) throw FormatError("weight file: unknown layer tag " + std::to_string(tag));
    l.kind = static_cast<LayerKind>(tag);
    for (Shape* s : {&l.in, &l.out}) {
      s->channels = r.u32();
      s->height = r.u32();
      s->width = r.u32();
      if (double(s->channels) * s->height * s->width > 4.0e9)
        throw FormatError("weight file: implausible layer shape");
    }
    const std::size_t nw = expected_weight_count(l);
    const std::size_t nb = expected_bias_count(l);
    r.require((nw + nb) * 4);  // rejects truncation before allocating
    l.weights.resize(nw);
    for (auto& v : l.weights) v = r.f32();
    l.bias.resize(nb);
    for (auto& v : l.bias) v = r.f32();
  }
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw FormatError("weight file: unknown feature kind in echo");
  weights.echo.kind = static_cast<FeatureKind>(kind);
  const std::uint8_t log_flag = r.u8();
  if (log_flag > 1) throw FormatError("weight file: bad log flag in echo");
  weights.echo.normalization.log_applied = log_flag == 1;
  weights.echo.normalization.feature_min = r.f64();
  weights.echo.normalization.feature_max = r.f64();
  r.expect_end();

  validate_chain(weights);
  if (check == ArchitectureCheck::Reference) validate_reference_architecture(weights);
  return weights;
}

void save_weights(const CnnWeights& weights, const fs::path& path) {
  write_file_atomic(path, encode_weights(weights));
}

CnnWeights load_weights(const fs::path& path, ArchitectureCheck check) {
  return decode_weights(read_all(path), check);
}

}  // namespace holodepth
