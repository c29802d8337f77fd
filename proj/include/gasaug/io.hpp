#pragma once

// File formats.
//
//   point cloud   headerless little-endian float32 records (x, y, z, r)
//   labels        KITTI text, one object per line:
//                   type truncation occlusion alpha x1 y1 x2 y2 h w l x y z yaw [score]
//                 In the default sensor frame (x, y, z) is the box center and
//                 yaw turns about +z. With camera_frame, the nominal KITTI
//                 camera axes are converted (location = bottom center).
//   sensor spec   "<azimuth_bin_width> <max_range>" then one layer elevation
//                 (polar angle from +z, radians) per line; '#' comments
//   pool          <dir>/sources/<id>.bin, <dir>/generated/<id>.bin and a
//                 <dir>/pool.txt manifest with generated-cloud provenance
//   key-value     "key = value" lines; '#' comments

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gasaug/augment.hpp"
#include "gasaug/core.hpp"
#include "gasaug/error.hpp"
#include "gasaug/gas_gen.hpp"
#include "gasaug/resampler.hpp"

namespace gasaug::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Text helpers

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Point clouds

struct ReadStats {
  std::size_t clamped_reflectivity = 0;
};

inline float to_f32(double v) { return static_cast<float>(v); }

/// The cloud as it reads back from disk: every value rounded to float32.
inline PointCloud quantized_f32(const PointCloud& cloud) {
  PointCloud out = cloud;
  for (auto& p : out.points) {
    p.x = to_f32(p.x);
    p.y = to_f32(p.y);
    p.z = to_f32(p.z);
    p.reflectivity = to_f32(p.reflectivity);
  }
  return out;
}

namespace detail {

inline void put_f32(std::string& buf, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) {
    buf.push_back(static_cast<char>(bits & 0xFFu));
    bits >>= 8;
  }
}

inline float get_f32(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<float>(bits);
}

}  // namespace detail

inline std::string encode_point_cloud(const PointCloud& cloud) {
  std::string buf;
  buf.reserve(cloud.size() * 16);
  for (const auto& p : cloud.points) {
    detail::put_f32(buf, to_f32(p.x));
    detail::put_f32(buf, to_f32(p.y));
    detail::put_f32(buf, to_f32(p.z));
    detail::put_f32(buf, to_f32(p.reflectivity));
  }
  return buf;
}

inline void write_point_cloud(const PointCloud& cloud, const fs::path& path) {
  write_text(path, encode_point_cloud(cloud));
}

/// Reflectivity outside [0, 1] is clamped and counted in `stats`.
inline PointCloud decode_point_cloud(std::string_view bytes, const std::string& name, ReadStats* stats = nullptr) {
  if (bytes.size() % 16 != 0) {
    throw Error(ErrorCode::MalformedFile, name + ": size " + std::to_string(bytes.size()) + " is not a multiple of 16");
  }
  PointCloud cloud;
  cloud.points.reserve(bytes.size() / 16);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    Point p{detail::get_f32(data + off), detail::get_f32(data + off + 4), detail::get_f32(data + off + 8),
            detail::get_f32(data + off + 12)};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) || !std::isfinite(p.reflectivity)) {
      throw Error(ErrorCode::MalformedFile, name + ": non-finite value in record " + std::to_string(off / 16));
    }
    if (p.reflectivity < 0.0 || p.reflectivity > 1.0) {
      p.reflectivity = std::clamp(p.reflectivity, 0.0, 1.0);
      if (stats) ++stats->clamped_reflectivity;
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

inline PointCloud read_point_cloud(const fs::path& path, ReadStats* stats = nullptr) {
  auto cloud = decode_point_cloud(read_text(path), path.string(), stats);
  cloud.frame_id = path.stem().string();
  return cloud;
}

// ---------------------------------------------------------------------------
// Labels and predictions

struct LabelOptions {
  bool camera_frame = false;
};

inline constexpr std::string_view kGasLabel = "GasExhaust";

namespace detail {

inline LabeledBox parse_label_line(std::string_view line, const fs::path& path, std::size_t line_no,
                                   const LabelOptions& opts, bool require_score) {
  const auto tok = split_ws(line);
  auto fail = [&](const std::string& why) -> Error {
    return {ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + why};
  };
  if (require_score && tok.size() != 16) throw fail("prediction lines need 16 fields, got " + std::to_string(tok.size()));
  if (tok.size() != 15 && tok.size() != 16) throw fail("expected 15 or 16 fields, got " + std::to_string(tok.size()));
  std::array<double, 15> v{};
  for (std::size_t i = 1; i < tok.size(); ++i) {
    if (i == 2) continue;
    const auto d = parse_double(tok[i]);
    if (!d || !std::isfinite(*d)) throw fail("field " + std::to_string(i + 1) + " is not a finite number");
    if (i < 15) v[i] = *d;
  }
  const auto occ = parse_int(tok[2]);
  if (!occ) throw fail("occlusion is not an integer");

  LabeledBox lb;
  lb.label = std::string(tok[0]);
  lb.truncation = v[1];
  lb.occlusion = static_cast<int>(*occ);
  const double h = v[8];
  const double w = v[9];
  const double l = v[10];
  double x = v[11];
  double y = v[12];
  double z = v[13];
  double yaw = v[14];
  if (opts.camera_frame) {
    // camera: x right, y down, z forward; location at the bottom center.
    const double cx = x;
    const double cy = y;
    const double cz = z;
    x = cz;
    y = -cx;
    z = -cy + 0.5 * h;
    yaw = -yaw - 0.5 * std::numbers::pi;
  }
  if (!(l > 0.0 && w > 0.0 && h > 0.0)) {
    if (lb.label == "DontCare") {
      lb.box = Box3D({x, y, z}, 1e-3, 1e-3, 1e-3, 0.0);
    } else {
      throw fail("box dimensions must be positive");
    }
  } else {
    lb.box = Box3D({x, y, z}, l, w, h, yaw);
  }
  if (tok.size() == 16) {
    const auto s = parse_double(tok[15]);
    if (!s) throw fail("score is not a number");
    lb.score = *s;
  }
  return lb;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    ++line_no;
    const std::string_view line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') fn(line, line_no);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace detail

inline std::vector<LabeledBox> parse_labels(std::string_view text, const fs::path& name = "<memory>",
                                            const LabelOptions& opts = {}) {
  std::vector<LabeledBox> out;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    out.push_back(detail::parse_label_line(line, name, no, opts, false));
  });
  return out;
}

inline std::vector<LabeledBox> read_labels(const fs::path& path, const LabelOptions& opts = {}) {
  return parse_labels(read_text(path), path, opts);
}

inline std::vector<ScoredBox> parse_predictions(std::string_view text, const fs::path& name = "<memory>",
                                                const LabelOptions& opts = {}) {
  std::vector<ScoredBox> out;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    auto lb = detail::parse_label_line(line, name, no, opts, true);
    out.push_back({lb.box, *lb.score, lb.label});
  });
  return out;
}

inline std::vector<ScoredBox> read_predictions(const fs::path& path, const LabelOptions& opts = {}) {
  return parse_predictions(read_text(path), path, opts);
}

/// One sensor-frame label line.
inline std::string format_label(std::string_view type, double truncation, int occlusion, const Box3D& b,
                                std::optional<double> score = std::nullopt) {
  std::string s(type);
  auto add = [&](double v) {
    s.push_back(' ');
    s += format_double(v);
  };
  add(truncation);
  s += ' ' + std::to_string(occlusion);
  s += " -10 -1 -1 -1 -1";
  add(b.height());
  add(b.width());
  add(b.length());
  add(b.center().x);
  add(b.center().y);
  add(b.center().z);
  add(b.yaw());
  if (score) add(*score);
  s.push_back('\n');
  return s;
}

inline void write_labels(const fs::path& path, std::span<const LabeledBox> boxes) {
  std::string text;
  for (const auto& b : boxes) text += format_label(b.label, b.truncation, b.occlusion, b.box, b.score);
  write_text(path, text);
}

inline void write_predictions(const fs::path& path, std::span<const ScoredBox> boxes) {
  std::string text;
  for (const auto& b : boxes) text += format_label(b.label, 0.0, 0, b.box, b.score);
  write_text(path, text);
}

/// Gas-box sidecar: one GasExhaust line per box.
inline void write_gas_boxes(const fs::path& path, std::span<const Box3D> boxes) {
  std::string text;
  for (const auto& b : boxes) text += format_label(kGasLabel, 0.0, 0, b);
  write_text(path, text);
}

inline std::vector<Box3D> boxes_of(std::span<const LabeledBox> labels) {
  std::vector<Box3D> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.box);
  return out;
}

// ---------------------------------------------------------------------------
// Sensor spec

inline SensorSpec parse_sensor_spec(std::string_view text, const std::string& name = "<memory>") {
  std::optional<std::pair<double, double>> header;
  std::vector<double> layers;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto tok = split_ws(line);
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::ParseError, name + ":" + std::to_string(no) + ": " + why);
    };
    if (!header) {
      if (tok.size() != 2) throw fail("header needs '<azimuth_bin_width> <max_range>'");
      const auto w = parse_double(tok[0]);
      const auto r = parse_double(tok[1]);
      if (!w || !r) throw fail("header values must be numbers");
      header = std::make_pair(*w, *r);
      return;
    }
    if (tok.size() != 1) throw fail("expected one elevation per line");
    const auto e = parse_double(tok[0]);
    if (!e) throw fail("elevation is not a number");
    layers.push_back(*e);
  });
  if (!header) throw Error(ErrorCode::ParseError, name + ": missing header line");
  return SensorSpec(std::move(layers), header->first, header->second);
}

inline SensorSpec read_sensor_spec(const fs::path& path) { return parse_sensor_spec(read_text(path), path.string()); }

inline std::string format_sensor_spec(const SensorSpec& spec) {
  std::string s = "# azimuth_bin_width max_range, then layer polar angles (rad)\n";
  s += format_double(spec.azimuth_bin_width()) + " " + format_double(spec.max_range()) + "\n";
  for (double e : spec.layer_elevations()) s += format_double(e) + "\n";
  return s;
}

inline void write_sensor_spec(const SensorSpec& spec, const fs::path& path) {
  write_text(path, format_sensor_spec(spec));
}

// ---------------------------------------------------------------------------
// Key-value config / manifests

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline KeyValues parse_key_values(std::string_view text, const std::string& name = "<memory>") {
  KeyValues out;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, name + ":" + std::to_string(no) + ": expected 'key = value'");
    }
    out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  });
  return out;
}

inline KeyValues read_key_values(const fs::path& path) { return parse_key_values(read_text(path), path.string()); }

inline std::string format_key_values(const KeyValues& kv, std::string_view header = {}) {
  std::string s;
  if (!header.empty()) s += "# " + std::string(header) + "\n";
  for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Dataset layout: <root>/velodyne/<id>.bin, <root>/label/<id>.txt,
// optional <root>/pred/<id>.txt, gas sidecars in <root>/gas/<id>.txt.

struct DatasetLayout {
  fs::path root;

  fs::path cloud_path(const std::string& id) const { return root / "velodyne" / (id + ".bin"); }
  fs::path label_path(const std::string& id) const { return root / "label" / (id + ".txt"); }
  fs::path pred_path(const std::string& id) const { return root / "pred" / (id + ".txt"); }
  fs::path gas_path(const std::string& id) const { return root / "gas" / (id + ".txt"); }

  /// Frame ids (file stems of velodyne/*.bin), sorted.
  std::vector<std::string> frame_ids() const {
    const fs::path dir = root / "velodyne";
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "missing directory " + dir.string());
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".bin") ids.push_back(e.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }
};

// ---------------------------------------------------------------------------
// Augmented frames. Next to the GasExhaust sidecar, gas/<id>.idx lists
// "<point index> <gas box index>" per inserted point so later stages can
// track which points belong to which gas box.

inline fs::path gas_index_path(const DatasetLayout& layout, const std::string& id) {
  return layout.root / "gas" / (id + ".idx");
}

inline void write_gas_indices(const fs::path& path, const AugmentedFrame& frame) {
  std::string text;
  for (std::size_t k = 0; k < frame.gas_point_indices.size(); ++k) {
    text += std::to_string(frame.gas_point_indices[k]) + " " + std::to_string(frame.gas_point_box[k]) + "\n";
  }
  write_text(path, text);
}

/// Writes the cloud, the GasExhaust sidecar and the index file of one frame.
/// Labels and predictions are left to the caller.
inline void write_augmented_frame(const DatasetLayout& out, const std::string& id, const AugmentedFrame& frame) {
  write_point_cloud(frame.frame.cloud, out.cloud_path(id));
  write_gas_boxes(out.gas_path(id), frame.gas_boxes);
  write_gas_indices(gas_index_path(out, id), frame);
}

/// Reads the gas sidecar and index file (when present) into `frame`, whose
/// cloud must already be loaded. Placements are not persisted; each gas box
/// gets a default placement entry.
inline void read_gas_annotations(const DatasetLayout& layout, const std::string& id, AugmentedFrame& frame) {
  frame.gas_boxes.clear();
  frame.gas_point_indices.clear();
  frame.gas_point_box.clear();
  frame.placements.clear();
  const fs::path sidecar = layout.gas_path(id);
  if (!fs::exists(sidecar)) return;
  for (const auto& lb : read_labels(sidecar)) frame.gas_boxes.push_back(lb.box);
  frame.placements.resize(frame.gas_boxes.size());
  const fs::path idx = gas_index_path(layout, id);
  if (!fs::exists(idx)) return;
  const std::string text = read_text(idx);
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto tok = split_ws(line);
    const auto pi = tok.size() == 2 ? parse_int(tok[0]) : std::nullopt;
    const auto bi = tok.size() == 2 ? parse_int(tok[1]) : std::nullopt;
    if (!pi || !bi || *pi < 0 || *bi < 0 || static_cast<std::size_t>(*pi) >= frame.frame.cloud.size() ||
        static_cast<std::size_t>(*bi) >= frame.gas_boxes.size() ||
        (!frame.gas_point_indices.empty() && static_cast<std::size_t>(*pi) <= frame.gas_point_indices.back())) {
      throw Error(ErrorCode::ParseError, idx.string() + ":" + std::to_string(no) + ": bad gas index entry");
    }
    frame.gas_point_indices.push_back(static_cast<std::size_t>(*pi));
    frame.gas_point_box.push_back(static_cast<std::size_t>(*bi));
  });
}

// ---------------------------------------------------------------------------
// Pools

inline std::string format_provenance(const GasProvenance& p) {
  switch (p.kind) {
    case GasProvenance::Kind::Surface:
      return "surface source=" + p.source_id + " alpha=" + format_double(p.alpha) + " n=" + std::to_string(p.count);
    case GasProvenance::Kind::RandomNoise:
      return "noise sigma=" + format_double(p.sigma) + " k=" + std::to_string(p.count);
    case GasProvenance::Kind::Loaded:
      break;
  }
  return "loaded";
}

inline GasProvenance parse_provenance(std::span<const std::string_view> tok, const std::string& where) {
  GasProvenance p;
  if (tok.empty() || tok[0] == "loaded") return p;
  std::map<std::string, std::string, std::less<>> kv;
  for (std::size_t i = 1; i < tok.size(); ++i) {
    const auto eq = tok[i].find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::ParseError, where + ": bad provenance field");
    kv.emplace(std::string(tok[i].substr(0, eq)), std::string(tok[i].substr(eq + 1)));
  }
  auto num = [&](const char* key) {
    const auto it = kv.find(key);
    const auto v = it == kv.end() ? std::nullopt : parse_double(it->second);
    if (!v) throw Error(ErrorCode::ParseError, where + ": missing or bad '" + key + "'");
    return *v;
  };
  if (tok[0] == "surface") {
    p.kind = GasProvenance::Kind::Surface;
    p.source_id = kv.count("source") ? kv["source"] : "";
    p.alpha = num("alpha");
    p.count = static_cast<int>(num("n"));
  } else if (tok[0] == "noise") {
    p.kind = GasProvenance::Kind::RandomNoise;
    p.source_id = "random_noise";
    p.sigma = num("sigma");
    p.count = static_cast<int>(num("k"));
  } else {
    throw Error(ErrorCode::ParseError, where + ": unknown provenance kind");
  }
  return p;
}

inline constexpr std::string_view kPoolManifest = "pool.txt";

/// Name of the i-th generated cloud: g000000, g000001, ...
inline std::string generated_id(std::size_t i) {
  char name[32];
  std::snprintf(name, sizeof name, "g%06zu", i);
  return name;
}

/// Writes sources/, generated/ and the manifest; generated clouds are named
/// by generated_id in pool order.
inline void write_pool(const GasCloudPool& pool, const fs::path& dir) {
  fs::create_directories(dir / "sources");
  fs::create_directories(dir / "generated");
  std::string manifest = "# gas cloud pool\n";
  for (const auto& s : pool.sources) {
    write_point_cloud(s.cloud, dir / "sources" / (s.id + ".bin"));
    manifest += "source " + s.id + "\n";
  }
  for (std::size_t i = 0; i < pool.generated.size(); ++i) {
    const std::string name = generated_id(i);
    write_point_cloud(pool.generated[i].cloud, dir / "generated" / (name + ".bin"));
    manifest += "generated " + name + " " + format_provenance(pool.generated[i].provenance) + "\n";
  }
  write_text(dir / kPoolManifest, manifest);
}

/// Sources are every sources/*.bin (sorted); generated clouds follow the
/// manifest order. Tight boxes are recomputed from the stored points.
inline GasCloudPool read_pool(const fs::path& dir) {
  GasCloudPool pool;
  const fs::path src_dir = dir / "sources";
  if (fs::is_directory(src_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(src_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) pool.add_source(f.stem().string(), read_point_cloud(f));
  }
  const fs::path manifest = dir / kPoolManifest;
  if (!fs::exists(manifest)) return pool;
  const std::string text = read_text(manifest);
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto tok = split_ws(line);
    const std::string where = manifest.string() + ":" + std::to_string(no);
    if (tok[0] == "source") return;
    if (tok[0] != "generated" || tok.size() < 2) throw Error(ErrorCode::ParseError, where + ": unknown entry");
    auto cloud = read_point_cloud(dir / "generated" / (std::string(tok[1]) + ".bin"));
    auto prov = parse_provenance(std::span(tok).subspan(2), where);
    pool.generated.push_back(make_gas_cloud(std::move(cloud), std::move(prov)));
  });
  return pool;
}

}  // namespace gasaug::io
