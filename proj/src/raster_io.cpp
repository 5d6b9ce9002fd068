#include "holodepth/raster_io.hpp"

#include "holodepth/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace holodepth {

namespace fs = std::filesystem;

namespace {

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PnmCursor {
 public:
  explicit PnmCursor(const std::string& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
      if (value > 1'000'000'000UL) throw FormatError("netpbm header value out of range");
      ++pos_;
    }
    if (pos_ == start) throw FormatError("malformed netpbm header");
    return value;
  }

  // Exactly one whitespace byte separates the header from binary samples.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw FormatError("malformed netpbm header terminator");
    ++pos_;
  }

  unsigned binary_sample(bool wide) {
    const std::size_t need = wide ? 2 : 1;
    if (pos_ + need > bytes_.size()) throw FormatError("truncated netpbm raster");
    unsigned v = static_cast<unsigned char>(bytes_[pos_]);
    if (wide) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + 1]);
    pos_ += need;
    return v;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

RealImage read_pnm(const fs::path& path) {
  const std::string bytes = read_all(path);
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError(path.string() + ": not a netpbm file");
  const char type = bytes[1];
  if (type != '2' && type != '3' && type != '5' && type != '6')
    throw FormatError(path.string() + ": unsupported netpbm type P" + std::string(1, type));
  const bool colour = type == '3' || type == '6';
  const bool binary = type == '5' || type == '6';

  PnmCursor cursor(bytes);
  cursor.binary_sample(false);
  cursor.binary_sample(false);
  const auto width = cursor.number();
  const auto height = cursor.number();
  const auto maxval = cursor.number();
  if (width == 0 || height == 0) throw FormatError(path.string() + ": empty raster");
  if (maxval == 0 || maxval > 65535) throw FormatError(path.string() + ": invalid maxval");
  if (binary) cursor.end_header();

  const bool wide = maxval > 255;
  const std::size_t channels = colour ? 3 : 1;
  std::vector<double> data(width * height);
  for (auto& pixel : data) {
    double rgb[3] = {0.0, 0.0, 0.0};
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned long v = binary ? cursor.binary_sample(wide) : cursor.number();
      if (v > maxval) throw FormatError(path.string() + ": sample exceeds maxval");
      rgb[c] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    pixel = colour ? 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2] : rgb[0];
  }
  return RealImage(width, height, std::move(data));
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

void write_pgm(const RealImage& image, const fs::path& path, double full_scale,
               std::uint16_t maxval) {
  if (maxval == 0) throw ParameterError("PGM maxval must be positive");
  std::ostringstream out;
  out << "P5\n" << image.width() << ' ' << image.height() << '\n' << maxval << '\n';
  std::string raster;
  const bool wide = maxval > 255;
  raster.reserve(image.size() * (wide ? 2 : 1));
  for (const double v : image.data()) {
    const double scaled = full_scale > 0.0 ? v / full_scale * maxval : 0.0;
    const auto q = static_cast<unsigned>(std::clamp(std::round(scaled), 0.0, double(maxval)));
    if (wide) raster.push_back(static_cast<char>(q >> 8));
    raster.push_back(static_cast<char>(q & 0xFF));
  }
  write_file_atomic(path, out.str() + raster);
}

RealImage resize_bilinear(const RealImage& image, std::size_t width, std::size_t height) {
  if (image.empty() || width == 0 || height == 0)
    throw DimensionError("bilinear resize needs non-empty input and output");
  auto coordinate = [](std::size_t j, std::size_t out, std::size_t in) {
    if (out == 1 || in == 1) return 0.0;
    return static_cast<double>(j) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
  };
  std::vector<double> data(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    const double sy = coordinate(y, height, image.height());
    const auto y0 = std::min(static_cast<std::size_t>(sy), image.height() - 1);
    const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double sx = coordinate(x, width, image.width());
      const auto x0 = std::min(static_cast<std::size_t>(sx), image.width() - 1);
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const double fx = sx - static_cast<double>(x0);
      // a + t * (b - a) returns a exactly when a == b, so flat regions stay flat.
      const double a = image.at(x0, y0);
      const double b = image.at(x1, y0);
      const double c = image.at(x0, y1);
      const double d = image.at(x1, y1);
      const double top = a + fx * (b - a);
      const double bottom = c + fx * (d - c);
      data[y * width + x] = top + fy * (bottom - top);
    }
  }
  return RealImage(width, height, std::move(data));
}

fs::path sidecar_path(const fs::path& image_path) {
  fs::path p = image_path;
  p += ".json";
  return p;
}

void write_hologram(const HologramFile& file, const fs::path& path) {
  validate(file.params);
  const double peak = file.hologram.max();
  const double full_scale = peak > 0.0 ? peak : 1.0;
  write_pgm(file.hologram, path, full_scale, 65535);
  nlohmann::json meta = {
      {"width", file.hologram.width()},
      {"height", file.hologram.height()},
      {"pitch_m", file.params.pitch},
      {"wavelength_m", file.params.wavelength},
      {"intensity_per_count", full_scale / 65535.0},
  };
  meta["depth_m"] = file.depth ? nlohmann::json(*file.depth) : nlohmann::json(nullptr);
  write_file_atomic(sidecar_path(path), meta.dump(2) + "\n");
}

HologramFile read_hologram(const fs::path& path, OpticalParams defaults) {
  RealImage raster = read_pnm(path);
  HologramFile file{std::move(raster), defaults, std::nullopt};
  const fs::path meta_path = sidecar_path(path);
  if (!fs::exists(meta_path)) return file;

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_all(meta_path));
    file.params.pitch = meta.at("pitch_m").get<double>();
    file.params.wavelength = meta.at("wavelength_m").get<double>();
    const double per_count = meta.at("intensity_per_count").get<double>();
    // read_pnm normalized by maxval; undo that and apply the stored scale.
    for (auto& v : file.hologram.data()) v = std::round(v * 65535.0) * per_count;
    if (meta.contains("depth_m") && !meta["depth_m"].is_null())
      file.depth = meta["depth_m"].get<double>();
    if (meta.at("width").get<std::size_t>() != file.hologram.width() ||
        meta.at("height").get<std::size_t>() != file.hologram.height())
      throw FormatError(meta_path.string() + ": extents disagree with the raster");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }
  validate(file.params);
  return file;
}

}  // namespace holodepth
