#include "holodepth/dataset.hpp"

#include "binary.hpp"
#include "holodepth/error.hpp"
#include "holodepth/fft.hpp"
#include "holodepth/optics.hpp"
#include "holodepth/parallel.hpp"
#include "holodepth/raster_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <mutex>
#include <random>

namespace holodepth {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::Hologram ? "hologram" : "spectrum";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view name) {
  if (name == "hologram") return FeatureKind::Hologram;
  if (name == "spectrum") return FeatureKind::Spectrum;
  return std::nullopt;
}

namespace {

// [0, 1) with 53 random bits. std::uniform_real_distribution is not
// specified bit-for-bit across standard libraries; mt19937_64 is.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void require_hologram_side(const RealImage& hologram, const char* what) {
  if (hologram.width() != kHologramSide || hologram.height() != kHologramSide)
    throw DimensionError(std::string(what) + " expects a 1024x1024 hologram, got " +
                         std::to_string(hologram.width()) + "x" +
                         std::to_string(hologram.height()));
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<double> depth_schedule(std::size_t n, double z_min, double z_max, double jitter,
                                   std::uint64_t seed) {
  if (n < 2) throw ParameterError("depth schedule needs n >= 2");
  if (!(z_max > z_min)) throw ParameterError("depth schedule needs z_max > z_min");
  if (!(jitter >= 0.0) || !std::isfinite(jitter))
    throw ParameterError("depth jitter must be finite and non-negative");

  std::mt19937_64 rng(seed);
  const double spacing = (z_max - z_min) / static_cast<double>(n - 1);
  std::vector<double> depths(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double grid = k + 1 == n ? z_max : z_min + static_cast<double>(k) * spacing;
    const double offset = jitter > 0.0 ? (2.0 * unit_uniform(rng) - 1.0) * jitter : 0.0;
    depths[k] = std::clamp(grid + offset, z_min, z_max);
  }
  return depths;
}

RealImage crop_center(const RealImage& hologram) {
  require_hologram_side(hologram, "crop_center");
  RealImage out(kFeatureSide, kFeatureSide);
  for (std::size_t y = 0; y < kFeatureSide; ++y)
    for (std::size_t x = 0; x < kFeatureSide; ++x)
      out.at(x, y) = hologram.at(x + kCropOffset, y + kCropOffset);
  return out;
}

RealImage power_spectrum_feature(const RealImage& hologram) {
  require_hologram_side(hologram, "power_spectrum_feature");
  std::vector<Complex> spectrum(hologram.data().begin(), hologram.data().end());
  fft2d(spectrum, kHologramSide, kHologramSide, Direction::Forward);

  constexpr std::size_t quadrant = kHologramSide / 2;
  RealImage power(quadrant, quadrant);
  for (std::size_t y = 0; y < quadrant; ++y)
    for (std::size_t x = 0; x < quadrant; ++x)
      power.at(x, y) = std::norm(spectrum[y * kHologramSide + x]);

  RealImage feature = resize_bilinear(power, kFeatureSide, kFeatureSide);
  for (auto& v : feature.data()) v = std::log1p(v);
  return feature;
}

RealImage extract_feature(const RealImage& hologram, FeatureKind kind) {
  return kind == FeatureKind::Spectrum ? power_spectrum_feature(hologram) : crop_center(hologram);
}

std::vector<float> normalize_feature(const RealImage& raw, const FeatureNormalization& norm) {
  const double range = norm.feature_max - norm.feature_min;
  std::vector<float> out(raw.size());
  const auto in = raw.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double scaled = range > 0.0 ? (in[i] - norm.feature_min) / range : 0.0;
    out[i] = static_cast<float>(std::clamp(scaled, 0.0, 1.0));
  }
  return out;
}

// --- container ---------------------------------------------------------------

std::string encode_container(const SampleContainer& container) {
  const std::size_t pixels = std::size_t{container.side} * container.side;
  detail::ByteWriter w;
  w.bytes("HDDS");
  w.u32(container.version);
  w.u32(static_cast<std::uint32_t>(container.samples.size()));
  w.u32(container.side);
  for (const auto& s : container.samples) {
    if (s.feature.size() != pixels)
      throw DimensionError("container sample feature has " + std::to_string(s.feature.size()) +
                           " values, expected " + std::to_string(pixels));
    for (const float v : s.feature) w.f32(v);
    w.f32(s.label);
  }
  return w.take();
}

SampleContainer decode_container(std::string_view bytes) {
  detail::ByteReader r(bytes, "dataset container");
  if (r.bytes(4) != "HDDS") throw FormatError("dataset container: bad magic");
  SampleContainer c;
  c.version = r.u32();
  if (c.version != kContainerVersion)
    throw FormatError("dataset container: unsupported version " + std::to_string(c.version));
  const std::uint32_t count = r.u32();
  c.side = r.u32();
  if (c.side == 0) throw FormatError("dataset container: zero feature side");
  const std::size_t pixels = std::size_t{c.side} * c.side;
  const std::size_t record = (pixels + 1) * 4;
  if (r.remaining() != record * count)
    throw FormatError("dataset container: payload is " + std::to_string(r.remaining()) +
                      " bytes, expected " + std::to_string(record * count));
  c.samples.resize(count);
  for (auto& s : c.samples) {
    s.feature.resize(pixels);
    for (auto& v : s.feature) v = r.f32();
    s.label = r.f32();
  }
  r.expect_end();
  return c;
}

void write_container(const SampleContainer& container, const fs::path& path) {
  write_file_atomic(path, encode_container(container));
}

SampleContainer read_container(const fs::path& path) { return decode_container(read_all(path)); }

// --- manifest ----------------------------------------------------------------

std::string encode_manifest(const DatasetManifest& m) {
  json objects = json::array();
  for (const auto& o : m.objects)
    objects.push_back({{"object_id", o.object_id},
                       {"split", o.split == Split::Train ? "train" : "validation"},
                       {"depths_m", o.depths}});
  json skipped = json::array();
  for (const auto& s : m.skipped) skipped.push_back({{"file", s.file}, {"reason", s.reason}});
  const auto& c = m.config;
  json doc = {
      {"format", "holodepth-dataset-manifest"},
      {"format_version", m.format_version},
      {"container_file", m.container_file},
      {"kind", std::string(to_string(c.kind))},
      {"wavelength_m", c.optics.wavelength},
      {"pitch_m", c.optics.pitch},
      {"z_min_m", c.z_min},
      {"z_max_m", c.z_max},
      {"jitter_m", c.jitter},
      {"samples_per_object", c.samples_per_object},
      {"object_count", m.objects.size()},
      {"sample_count", m.sample_count},
      {"hologram_side", kHologramSide},
      {"feature_side", kFeatureSide},
      {"validation_fraction", c.validation_fraction},
      {"seed", c.seed},
      {"max_objects", c.max_objects},
      {"normalization",
       {{"feature_min", m.normalization.feature_min},
        {"feature_max", m.normalization.feature_max},
        {"log_applied", m.normalization.log_applied}}},
      {"label_units", "m"},
      {"objects", objects},
      {"skipped", skipped},
  };
  return doc.dump(2) + "\n";
}

DatasetManifest decode_manifest(std::string_view text) {
  try {
    const json doc = json::parse(text);
    DatasetManifest m;
    m.format_version = doc.at("format_version").get<std::uint32_t>();
    if (m.format_version != kManifestVersion)
      throw FormatError("manifest: unsupported version " + std::to_string(m.format_version));
    m.container_file = doc.at("container_file").get<std::string>();
    const auto kind = parse_feature_kind(doc.at("kind").get<std::string>());
    if (!kind) throw FormatError("manifest: unknown feature kind");
    auto& c = m.config;
    c.kind = *kind;
    c.optics.wavelength = doc.at("wavelength_m").get<double>();
    c.optics.pitch = doc.at("pitch_m").get<double>();
    c.z_min = doc.at("z_min_m").get<double>();
    c.z_max = doc.at("z_max_m").get<double>();
    c.jitter = doc.at("jitter_m").get<double>();
    c.samples_per_object = doc.at("samples_per_object").get<std::size_t>();
    c.validation_fraction = doc.at("validation_fraction").get<double>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.max_objects = doc.at("max_objects").get<std::size_t>();
    m.sample_count = doc.at("sample_count").get<std::size_t>();
    const auto& n = doc.at("normalization");
    m.normalization.feature_min = n.at("feature_min").get<double>();
    m.normalization.feature_max = n.at("feature_max").get<double>();
    m.normalization.log_applied = n.at("log_applied").get<bool>();
    for (const auto& o : doc.at("objects")) {
      ObjectEntry e;
      e.object_id = o.at("object_id").get<std::string>();
      const auto split = o.at("split").get<std::string>();
      if (split != "train" && split != "validation") throw FormatError("manifest: bad split");
      e.split = split == "train" ? Split::Train : Split::Validation;
      e.depths = o.at("depths_m").get<std::vector<double>>();
      m.objects.push_back(std::move(e));
    }
    for (const auto& s : doc.at("skipped"))
      m.skipped.push_back({s.at("file").get<std::string>(), s.at("reason").get<std::string>()});
    if (doc.at("object_count").get<std::size_t>() != m.objects.size())
      throw FormatError("manifest: object_count disagrees with the object list");
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_file_atomic(path, encode_manifest(manifest));
}

DatasetManifest read_manifest(const fs::path& path) { return decode_manifest(read_all(path)); }

// --- generation --------------------------------------------------------------

RealImage load_object(const fs::path& path) {
  RealImage image = read_pnm(path);
  if (image.width() == kHologramSide && image.height() == kHologramSide) return image;
  return resize_bilinear(image, kHologramSide, kHologramSide);
}

std::vector<Split> assign_splits(std::size_t object_count, double validation_fraction,
                                 std::uint64_t seed) {
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ParameterError("validation fraction must lie in [0, 1)");
  std::vector<std::size_t> order(object_count);
  for (std::size_t i = 0; i < object_count; ++i) order[i] = i;
  std::mt19937_64 rng(splitmix64(seed ^ 0x5EED5EED5EED5EEDULL));
  for (std::size_t i = object_count; i > 1; --i) {
    const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  auto validation = static_cast<std::size_t>(
      std::llround(validation_fraction * static_cast<double>(object_count)));
  if (object_count >= 2 && validation_fraction > 0.0) validation = std::max<std::size_t>(validation, 1);
  validation = std::min(validation, object_count > 0 ? object_count - 1 : 0);

  std::vector<Split> splits(object_count, Split::Train);
  for (std::size_t i = 0; i < validation; ++i) splits[order[i]] = Split::Validation;
  return splits;
}

std::uint64_t object_seed(std::uint64_t dataset_seed, std::size_t object_index) {
  return splitmix64(dataset_seed + 0x9E3779B97F4A7C15ULL * (object_index + 1));
}

namespace {

// Raw features go to a scratch file as native doubles in container order:
// memory stays bounded by the worker count and normalization still sees the
// exact values extract_feature produced.
class RawSpill {
 public:
  RawSpill(fs::path path, std::size_t values_per_record)
      : path_(std::move(path)), record_bytes_(values_per_record * sizeof(double)) {
    file_.open(path_, std::ios::binary | std::ios::in | std::ios::out | std::ios::trunc);
    if (!file_) throw IoError("cannot create scratch file " + path_.string());
  }
  RawSpill(const RawSpill&) = delete;
  RawSpill& operator=(const RawSpill&) = delete;
  ~RawSpill() {
    file_.close();
    std::error_code ignored;
    fs::remove(path_, ignored);
  }

  void put(std::size_t index, const RealImage& feature) {
    std::lock_guard lock(mutex_);
    file_.seekp(static_cast<std::streamoff>(index * record_bytes_));
    file_.write(reinterpret_cast<const char*>(feature.data().data()),
                static_cast<std::streamsize>(record_bytes_));
    if (!file_) throw IoError("write failed for " + path_.string());
  }

  void get(std::size_t index, std::vector<double>& out) {
    std::lock_guard lock(mutex_);
    out.resize(record_bytes_ / sizeof(double));
    file_.seekg(static_cast<std::streamoff>(index * record_bytes_));
    file_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(record_bytes_));
    if (!file_) throw IoError("read failed for " + path_.string());
  }

 private:
  fs::path path_;
  std::size_t record_bytes_;
  std::fstream file_;
  std::mutex mutex_;
};

struct Decodable {
  bool ok = false;
  std::string reason;
};

}  // namespace

DatasetOutput build_dataset(const fs::path& image_dir, const DatasetConfig& config,
                            const fs::path& out_prefix) {
  validate(config.optics);
  if (!fs::is_directory(image_dir))
    throw IoError("image directory does not exist: " + image_dir.string());
  if (config.samples_per_object < 2) throw ParameterError("samples_per_object must be >= 2");

  DatasetOutput out;
  out.container = out_prefix;
  out.container += ".hdds";
  out.manifest = out_prefix;
  out.manifest += ".manifest.json";
  if (const auto parent = out.container.parent_path(); !parent.empty() && !fs::is_directory(parent))
    throw IoError("output directory does not exist: " + parent.string());

  std::vector<fs::path> candidates;
  for (const auto& entry : fs::directory_iterator(image_dir))
    if (entry.is_regular_file()) candidates.push_back(entry.path());
  std::sort(candidates.begin(), candidates.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  // Decodability is checked in filename order, a batch at a time, so a small
  // max_objects does not decode a whole directory.
  DatasetManifest manifest;
  manifest.config = config;
  std::vector<fs::path> sources;
  const std::size_t batch = std::max<std::size_t>(1, 2 * worker_count());
  for (std::size_t first = 0; first < candidates.size(); first += batch) {
    const std::size_t last = std::min(candidates.size(), first + batch);
    std::vector<Decodable> status(last - first);
    parallel_for(first, last, [&](std::size_t i) {
      try {
        read_pnm(candidates[i]);
        status[i - first].ok = true;
      } catch (const Error& e) {
        status[i - first].reason = e.what();
      }
    });
    bool full = false;
    for (std::size_t i = first; i < last && !full; ++i) {
      const std::string name = candidates[i].filename().string();
      if (status[i - first].ok) {
        sources.push_back(candidates[i]);
        manifest.objects.push_back({name, Split::Train, {}});
        full = config.max_objects != 0 && sources.size() == config.max_objects;
      } else {
        warn("skipping " + name + ": " + status[i - first].reason);
        manifest.skipped.push_back({name, status[i - first].reason});
      }
    }
    if (full) break;
  }
  if (sources.empty()) throw IoError("no decodable images in " + image_dir.string());

  const auto splits = assign_splits(sources.size(), config.validation_fraction, config.seed);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    manifest.objects[i].split = splits[i];
    manifest.objects[i].depths = depth_schedule(config.samples_per_object, config.z_min,
                                                config.z_max, config.jitter,
                                                object_seed(config.seed, i));
  }

  const std::size_t per_object = config.samples_per_object;
  const std::size_t pixels = kFeatureSide * kFeatureSide;
  fs::path scratch = out.container;
  scratch += ".raw.tmp";
  RawSpill spill(scratch, pixels);

  std::vector<double> lo(sources.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(sources.size(), -std::numeric_limits<double>::infinity());
  parallel_for(0, sources.size(), [&](std::size_t i) {
    const RealImage object = load_object(sources[i]);
    for (std::size_t k = 0; k < per_object; ++k) {
      const RealImage hologram =
          synthesize_inline_hologram(object, manifest.objects[i].depths[k], config.optics);
      const RealImage raw = extract_feature(hologram, config.kind);
      const auto [mn, mx] = std::minmax_element(raw.data().begin(), raw.data().end());
      lo[i] = std::min(lo[i], *mn);
      hi[i] = std::max(hi[i], *mx);
      spill.put(i * per_object + k, raw);
    }
  });

  FeatureNormalization norm;
  norm.log_applied = config.kind == FeatureKind::Spectrum;
  norm.feature_min = *std::min_element(lo.begin(), lo.end());
  norm.feature_max = *std::max_element(hi.begin(), hi.end());
  manifest.normalization = norm;
  manifest.sample_count = sources.size() * per_object;
  manifest.container_file = out.container.filename().string();

  fs::path partial = out.container;
  partial += ".tmp";
  {
    std::ofstream file(partial, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + partial.string());
    detail::ByteWriter header;
    header.bytes("HDDS");
    header.u32(kContainerVersion);
    header.u32(static_cast<std::uint32_t>(manifest.sample_count));
    header.u32(static_cast<std::uint32_t>(kFeatureSide));
    const std::string head = header.take();
    file.write(head.data(), static_cast<std::streamsize>(head.size()));
    std::vector<double> raw;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      for (std::size_t k = 0; k < per_object; ++k) {
        spill.get(i * per_object + k, raw);
        const auto feature =
            normalize_feature(RealImage(kFeatureSide, kFeatureSide, std::move(raw)), norm);
        detail::ByteWriter record;
        for (const float v : feature) record.f32(v);
        record.f32(static_cast<float>(manifest.objects[i].depths[k]));
        const std::string bytes = record.take();
        file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      }
    }
    if (!file.flush()) throw IoError("write failed for " + partial.string());
  }
  std::error_code ec;
  fs::rename(partial, out.container, ec);
  if (ec) throw IoError("cannot move output into place at " + out.container.string());
  write_manifest(manifest, out.manifest);
  out.contents = std::move(manifest);
  return out;
}

}  // namespace holodepth
