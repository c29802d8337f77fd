#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "gasaug/gasaug.hpp"

namespace gasaug::cli {
namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Output staging

/// Output directory built under a hidden sibling name and renamed into place
/// on commit; dropped on destruction otherwise.
class StagedDir {
 public:
  StagedDir(fs::path target, bool overwrite) : target_(std::move(target)), overwrite_(overwrite) {
    if (target_.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
    if (fs::exists(target_) && !overwrite_) {
      throw Error(ErrorCode::InvalidArgument, target_.string() + " already exists (pass --overwrite to replace it)");
    }
    const fs::path parent = target_.parent_path().empty() ? fs::path(".") : target_.parent_path();
    if (!fs::is_directory(parent)) throw Error(ErrorCode::IoError, "missing directory " + parent.string());
    staging_ = parent / ("." + target_.filename().string() + ".partial-" + std::to_string(::getpid()));
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;

  ~StagedDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }

  const fs::path& path() const { return staging_; }

  void commit() {
    if (fs::exists(target_)) fs::remove_all(target_);
    fs::rename(staging_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path staging_;
  bool overwrite_;
  bool committed_ = false;
};

void write_file_atomic(const fs::path& path, std::string_view text) {
  fs::path tmp = path;
  tmp += ".partial";
  try {
    io::write_text(tmp, text);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void copy_if_exists(const fs::path& from, const fs::path& to) {
  if (fs::exists(from)) fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

// ---------------------------------------------------------------------------
// Options, config files and manifests

/// Keys a manifest carries that are not options.
const std::set<std::string, std::less<>> kMetaKeys{"command", "toolkit-version", "config"};

std::string option_key(const CLI::Option* opt) { return opt->get_single_name(); }

bool is_flag(const CLI::Option* opt) { return opt->get_expected_max() == 0; }

/// Effective option values of a parsed subcommand as key = value pairs.
io::KeyValues effective_options(const CLI::App& sub) {
  io::KeyValues kv;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string key = option_key(opt);
    if (key == "help" || key == "config" || key == "overwrite" || opt->get_lnames().empty()) continue;
    std::string value;
    if (is_flag(opt)) {
      value = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    if (!value.empty()) kv.emplace_back(key, value);
  }
  return kv;
}

std::string manifest_text(const CLI::App& sub) {
  io::KeyValues kv{{"command", sub.get_name()}, {"toolkit-version", kVersion}};
  for (auto& e : effective_options(sub)) kv.push_back(std::move(e));
  return io::format_key_values(kv, "gasaug run manifest; pass as --config to re-run");
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

/// Expands `--config FILE` into explicit options placed before the command
/// line ones. Command-line options win. Keys belonging only to other
/// subcommands are skipped; unknown keys are a usage error.
std::vector<std::string> expand_config(const CLI::App& app, const std::vector<std::string>& args) {
  std::optional<std::string> config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config) return args;
  if (rest.empty()) throw CLI::CallForHelp();
  const CLI::App* sub = nullptr;
  try {
    sub = const_cast<CLI::App&>(app).get_subcommand(rest.front());
  } catch (const CLI::OptionNotFound&) {
    return rest;  // let the parser report the bad subcommand
  }
  std::vector<std::string> injected;
  for (auto [key, value] : io::read_key_values(*config)) {
    for (auto& c : key) c = c == '_' ? '-' : c;
    if (kMetaKeys.count(key)) continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) {
      bool elsewhere = false;
      for (const CLI::App* other : app.get_subcommands([](const CLI::App*) { return true; })) {
        elsewhere = elsewhere || other->get_option_no_throw("--" + key) != nullptr;
      }
      if (!elsewhere) throw CLI::ValidationError(*config, "unknown key '" + key + "'");
      continue;
    }
    if (given_on_command_line(rest, key)) continue;
    if (is_flag(opt)) {
      if (value == "true" || value == "1") injected.push_back("--" + key);
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

void add_workers(CLI::App* sub, std::size_t& workers) {
  sub->add_option("--workers", workers, "Worker threads (output does not depend on this)")
      ->check(CLI::PositiveNumber);
}

void add_overwrite(CLI::App* sub, bool& overwrite) {
  sub->add_flag("--overwrite", overwrite, "Replace an existing output directory");
}

// ---------------------------------------------------------------------------
// Dataset helpers

struct ClampCounter {
  std::atomic<std::size_t> clamped{0};

  PointCloud read(const fs::path& path) {
    io::ReadStats stats;
    auto cloud = io::read_point_cloud(path, &stats);
    clamped += stats.clamped_reflectivity;
    return cloud;
  }

  void report(std::ostream& err) const {
    if (clamped > 0) err << "warning: clamped " << clamped << " reflectivity values into [0, 1]\n";
  }
};

io::DatasetLayout prepare_output(const fs::path& root, bool with_pred, bool with_gas) {
  io::DatasetLayout out{root};
  fs::create_directories(root / "velodyne");
  fs::create_directories(root / "label");
  if (with_pred) fs::create_directories(root / "pred");
  if (with_gas) fs::create_directories(root / "gas");
  return out;
}

bool has_dir(const io::DatasetLayout& l, const char* name) { return fs::is_directory(l.root / name); }

/// Labels and predictions pass through unchanged.
void copy_annotations(const io::DatasetLayout& in, const io::DatasetLayout& out, const std::string& id) {
  fs::copy_file(in.label_path(id), out.label_path(id), fs::copy_options::overwrite_existing);
  if (has_dir(in, "pred")) copy_if_exists(in.pred_path(id), out.pred_path(id));
}

void copy_gas(const io::DatasetLayout& in, const io::DatasetLayout& out, const std::string& id) {
  copy_if_exists(in.gas_path(id), out.gas_path(id));
  copy_if_exists(io::gas_index_path(in, id), io::gas_index_path(out, id));
}

io::LabelOptions label_options(bool camera_frame) { return io::LabelOptions{camera_frame}; }

/// Directory holding label files: <p>/label when present, else <p>.
fs::path label_dir(const fs::path& p, const char* sub) {
  return fs::is_directory(p / sub) ? p / sub : p;
}

std::vector<std::string> text_stems(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "missing directory " + dir.string());
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") ids.push_back(e.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateCmd {
  std::string pool;
  std::string out;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool noise_baseline = false;
  bool overwrite = false;

  void attach(CLI::App* sub) {
    sub->add_option("--pool", pool, "Pool directory with sources/*.bin");
    sub->add_option("--out", out, "Output pool directory")->required();
    sub->add_option("--count", count, "Number of clouds to generate")->required()->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Master seed")->required();
    sub->add_flag("--noise-baseline", noise_baseline, "Generate random Gaussian noise clouds instead");
    add_workers(sub, workers);
    add_overwrite(sub, overwrite);
  }

  int run(const CLI::App& sub, std::ostream& out_s, std::ostream&) {
    GasCloudPool p;
    if (!pool.empty()) {
      p = io::read_pool(pool);
      p.generated.clear();
    } else if (!noise_baseline) {
      throw Error(ErrorCode::InvalidArgument, "--pool is required unless --noise-baseline is given");
    }
    if (!noise_baseline && p.sources.empty()) throw Error(ErrorCode::EmptyPool, "pool has no source clouds");
    std::vector<GasCloud> generated(count);
    parallel_for(count, workers, [&](std::size_t i) {
      const std::string id = io::generated_id(i);
      SeededRng rng(derive_seed(seed, id, stage::generate));
      if (noise_baseline) {
        generated[i] = generate_random_noise_cloud(rng);
      } else {
        const auto& src = p.sources[i % p.sources.size()];
        generated[i] = generate_cloud(src.cloud, rng, src.id);
      }
    });
    p.generated = std::move(generated);
    StagedDir staged(out, overwrite);
    io::write_pool(p, staged.path());
    io::write_text(staged.path() / "manifest.txt", manifest_text(sub));
    staged.commit();
    out_s << "generated " << count << " clouds into " << out << "\n";
    return kSuccess;
  }
};

struct AugmentCmd {
  std::string data;
  std::string pool;
  std::string out;
  std::int64_t epoch = 0;
  std::int64_t epochs = 0;
  std::uint64_t seed = 0;
  AugmentParams params;
  std::optional<double> p_aug;
  std::size_t workers = 1;
  bool camera_frame = false;
  bool overwrite = false;

  void attach(CLI::App* sub) {
    sub->add_option("--data", data, "Input dataset root")->required();
    sub->add_option("--pool", pool, "Generated pool directory")->required();
    sub->add_option("--out", out, "Output dataset root")->required();
    sub->add_option("--epoch", epoch, "Completed epochs e (p_aug = min(e / T, 1))");
    sub->add_option("--epochs", epochs, "Total epochs T");
    sub->add_option("--seed", seed, "Master seed")->required();
    sub->add_option("--p-gas", params.p_gas, "Rear insertion probability");
    sub->add_option("--p-top", params.p_top, "Roof insertion probability");
    sub->add_option("--p-aug", p_aug, "Frame augmentation probability (overrides the schedule)");
    sub->add_option("--standoff", params.standoff, "Distance behind the rear face (m)");
    sub->add_option("--jitter", params.jitter, "Rear anchor jitter half-width (m)");
    sub->add_flag("--kitti-camera-frame", camera_frame, "Labels use KITTI camera coordinates");
    add_workers(sub, workers);
    add_overwrite(sub, overwrite);
  }

  int run(const CLI::App& sub, std::ostream& out_s, std::ostream& err) {
    AugmentParams prm = params;
    if (p_aug) {
      prm.p_aug = *p_aug;
    } else {
      if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "--epochs is required unless --p-aug is given");
      prm.p_aug = schedule_p_aug(epoch, epochs);
    }
    prm.validate();
    const GasCloudPool gas_pool = io::read_pool(pool);
    if (gas_pool.generated.empty()) throw Error(ErrorCode::EmptyPool, "pool " + pool + " has no generated clouds");
    const io::DatasetLayout in{data};
    const auto ids = in.frame_ids();
    StagedDir staged(out, overwrite);
    const auto layout = prepare_output(staged.path(), has_dir(in, "pred"), true);
    ClampCounter clamp;
    std::atomic<std::size_t> inserted{0};
    parallel_for(ids.size(), workers, [&](std::size_t i) {
      const std::string& id = ids[i];
      DetectionFrame frame{clamp.read(in.cloud_path(id)), io::read_labels(in.label_path(id), label_options(camera_frame)), {}};
      SeededRng rng(derive_seed(seed, id, stage::augment));
      const auto aug = augment_frame(frame, gas_pool, prm, rng);
      inserted += aug.gas_boxes.size();
      io::write_augmented_frame(layout, id, aug);
      copy_annotations(in, layout, id);
    });
    io::write_text(staged.path() / "manifest.txt", manifest_text(sub));
    staged.commit();
    clamp.report(err);
    out_s << "augmented " << ids.size() << " frames (p_aug " << io::format_double(prm.p_aug) << ", " << inserted
          << " gas clouds) into " << out << "\n";
    return kSuccess;
  }
};

struct ResampleCmd {
  std::string data;
  std::string out;
  std::string sensor;
  std::string preset;
  bool prefer_original = false;
  std::size_t workers = 1;
  bool overwrite = false;

  void attach(CLI::App* sub) {
    sub->add_option("--data", data, "Input dataset root")->required();
    sub->add_option("--out", out, "Output dataset root")->required();
    auto* file = sub->add_option("--sensor", sensor, "Sensor spec file");
    auto* named = sub->add_option("--preset", preset, "Built-in sensor: velodyne64 | layer40");
    file->excludes(named);
    sub->add_flag("--prefer-original", prefer_original, "Keep original returns over nearer inserted gas points");
    add_workers(sub, workers);
    add_overwrite(sub, overwrite);
  }

  int run(const CLI::App& sub, std::ostream& out_s, std::ostream& err) {
    std::optional<SensorSpec> spec;
    if (!sensor.empty()) {
      spec = io::read_sensor_spec(sensor);
    } else if (!preset.empty()) {
      spec = sensors::preset(preset);
      if (!spec) throw Error(ErrorCode::InvalidArgument, "unknown sensor preset '" + preset + "'");
    } else {
      throw Error(ErrorCode::InvalidArgument, "one of --sensor or --preset is required");
    }
    const io::DatasetLayout in{data};
    const auto ids = in.frame_ids();
    const bool with_gas = has_dir(in, "gas");
    StagedDir staged(out, overwrite);
    const auto layout = prepare_output(staged.path(), has_dir(in, "pred"), with_gas);
    ClampCounter clamp;
    std::atomic<std::size_t> before{0};
    std::atomic<std::size_t> after{0};
    parallel_for(ids.size(), workers, [&](std::size_t i) {
      const std::string& id = ids[i];
      AugmentedFrame frame;
      frame.frame.cloud = clamp.read(in.cloud_path(id));
      io::read_gas_annotations(in, id, frame);
      const std::size_t n = frame.frame.cloud.size();
      auto flags = std::make_unique<bool[]>(n);
      for (std::size_t k : frame.gas_point_indices) flags[k] = true;
      ResampleOptions opts{prefer_original, std::span<const bool>(flags.get(), n)};
      const auto res = resample_to_sensor(frame, *spec, opts);
      before += n;
      after += res.frame.cloud.size();
      if (with_gas && fs::exists(in.gas_path(id))) {
        io::write_augmented_frame(layout, id, res);
      } else {
        io::write_point_cloud(res.frame.cloud, layout.cloud_path(id));
      }
      copy_annotations(in, layout, id);
    });
    io::write_sensor_spec(*spec, staged.path() / "sensor.txt");
    io::write_text(staged.path() / "manifest.txt", manifest_text(sub));
    staged.commit();
    clamp.report(err);
    out_s << "resampled " << ids.size() << " frames: " << before << " -> " << after << " points into " << out << "\n";
    return kSuccess;
  }
};

struct InjectNoiseCmd {
  std::string data;
  std::string out;
  int kprime = 0;
  std::uint64_t seed = 0;
  double dilation = 0.25;
  std::size_t workers = 1;
  bool camera_frame = false;
  bool overwrite = false;

  void attach(CLI::App* sub) {
    sub->add_option("--data", data, "Input dataset root")->required();
    sub->add_option("--out", out, "Output dataset root")->required();
    sub->add_option("--kprime", kprime, "Upper bound k' of the per-box point count")->required()->check(
        CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Master seed")->required();
    sub->add_option("--dilation", dilation, "Horizontal box dilation (m)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--kitti-camera-frame", camera_frame, "Labels use KITTI camera coordinates");
    add_workers(sub, workers);
    add_overwrite(sub, overwrite);
  }

  int run(const CLI::App& sub, std::ostream& out_s, std::ostream& err) {
    const NoiseProtocolParams params{kprime, dilation};
    const io::DatasetLayout in{data};
    const auto ids = in.frame_ids();
    StagedDir staged(out, overwrite);
    const auto layout = prepare_output(staged.path(), has_dir(in, "pred"), has_dir(in, "gas"));
    ClampCounter clamp;
    std::atomic<std::size_t> added{0};
    parallel_for(ids.size(), workers, [&](std::size_t i) {
      const std::string& id = ids[i];
      DetectionFrame frame{clamp.read(in.cloud_path(id)), io::read_labels(in.label_path(id), label_options(camera_frame)), {}};
      SeededRng rng(derive_seed(seed, id, stage::inject));
      const auto noisy = inject_noise(frame, params, rng);
      added += noisy.cloud.size() - frame.cloud.size();
      io::write_point_cloud(noisy.cloud, layout.cloud_path(id));
      copy_annotations(in, layout, id);
      if (has_dir(in, "gas")) copy_gas(in, layout, id);
    });
    io::write_text(staged.path() / "manifest.txt", manifest_text(sub));
    staged.commit();
    clamp.report(err);
    out_s << "injected " << added << " noise points into " << ids.size() << " frames (k' " << kprime << ") into " << out
          << "\n";
    return kSuccess;
  }
};

struct EvaluateCmd {
  std::string gt;
  std::string pred;
  std::string metric = "both";
  double iou = 0.7;
  double range_gate = std::numeric_limits<double>::infinity();
  bool camera_frame = false;
  std::string out;

  void attach(CLI::App* sub) {
    sub->add_option("--gt", gt, "Dataset root or directory of ground-truth label files")->required();
    sub->add_option("--pred", pred, "Dataset root or directory of prediction files")->required();
    sub->add_option("--metric", metric, "3d | bev | both")->check(CLI::IsMember({"3d", "bev", "both"}));
    sub->add_option("--iou", iou, "IoU threshold");
    sub->add_option("--range-gate", range_gate, "Boxes farther than this (m) are ignored");
    sub->add_flag("--kitti-camera-frame", camera_frame, "Labels use KITTI camera coordinates");
    sub->add_option("--out", out, "Also write the table to this file");
  }

  int run(const CLI::App& sub, std::ostream& out_s, std::ostream&) {
    const fs::path gt_dir = label_dir(gt, "label");
    const fs::path pred_dir = label_dir(pred, "pred");
    const auto opts = label_options(camera_frame);
    std::vector<EvalFrame> frames;
    for (const auto& id : text_stems(gt_dir)) {
      EvalFrame f;
      f.gts = io::read_labels(gt_dir / (id + ".txt"), opts);
      const fs::path pf = pred_dir / (id + ".txt");
      if (fs::exists(pf)) f.preds = io::read_predictions(pf, opts);
      frames.push_back(std::move(f));
    }
    std::vector<Metric> metrics;
    if (metric != "bev") metrics.push_back(Metric::ThreeD);
    if (metric != "3d") metrics.push_back(Metric::Bev);

    std::string table = "# difficulty: KITTI occlusion/truncation buckets, range gate " + io::format_double(range_gate) +
                        " m; R40 at IoU " + io::format_double(iou) + "\n";
    table += "metric,difficulty,ap,tp,fp,fn,gt\n";
    for (Metric m : metrics) {
      EvalConfig cfg;
      cfg.iou_threshold = iou;
      cfg.metric = m;
      cfg.range_gate = range_gate;
      const auto res = average_precision_r40(frames, cfg);
      for (Difficulty d : kDifficulties) {
        const auto& lvl = res.at(d);
        char ap[32];
        std::snprintf(ap, sizeof ap, "%.2f", lvl.ap);
        table += std::string(to_string(m)) + "," + std::string(to_string(d)) + "," + ap + "," + std::to_string(lvl.tp) +
                 "," + std::to_string(lvl.fp) + "," + std::to_string(lvl.fn) + "," + std::to_string(lvl.gt) + "\n";
      }
    }
    if (!out.empty()) {
      write_file_atomic(out, table);
      write_file_atomic(out + ".manifest.txt", manifest_text(sub));
    }
    out_s << table;
    return kSuccess;
  }
};

std::vector<Box3D> read_boxes(const std::string& path) { return io::boxes_of(io::read_labels(path)); }

struct IouCmd {
  std::string a;
  std::string b;
  std::string metric = "3d";
  std::string out;

  void attach(CLI::App* sub) {
    sub->add_option("--a", a, "Box file for the rows (predictions)")->required();
    sub->add_option("--b", b, "Box file for the columns (gas boxes)")->required();
    sub->add_option("--metric", metric, "3d | bev")->check(CLI::IsMember({"3d", "bev"}));
    sub->add_option("--out", out, "Also write the matrix to this file");
  }

  int run(const CLI::App& sub, std::ostream& out_s, std::ostream&) {
    const auto rows = read_boxes(a);
    const auto cols = read_boxes(b);
    const Metric m = metric == "bev" ? Metric::Bev : Metric::ThreeD;
    std::string text;
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (j) text += ",";
        text += io::format_double(metric_iou(r, cols[j], m));
      }
      text += "\n";
    }
    if (!out.empty()) {
      write_file_atomic(out, text);
      write_file_atomic(out + ".manifest.txt", manifest_text(sub));
    }
    out_s << text;
    return kSuccess;
  }
};

struct LossCmd {
  std::string pred;
  std::string gas;
  double beta = kDefaultBeta;
  double l_train = 0.0;
  std::string out;

  void attach(CLI::App* sub) {
    sub->add_option("--pred", pred, "Predicted box file")->required();
    sub->add_option("--gas", gas, "Gas box file (GasExhaust sidecar)")->required();
    sub->add_option("--beta", beta, "Weight of the noise term");
    sub->add_option("--l-train", l_train, "Detector training loss value");
    sub->add_option("--out", out, "Also write the result to this file");
  }

  int run(const CLI::App& sub, std::ostream& out_s, std::ostream&) {
    const auto preds = read_boxes(pred);
    const auto gas_boxes = read_boxes(gas);
    const auto res = total_loss(l_train, noise_loss(preds, gas_boxes), beta);
    const std::string text = "l_train,l_noise,beta,total\n" + io::format_double(res.l_train) + "," +
                             io::format_double(res.l_noise) + "," + io::format_double(res.beta) + "," +
                             io::format_double(res.total) + "\n";
    if (!out.empty()) {
      write_file_atomic(out, text);
      write_file_atomic(out + ".manifest.txt", manifest_text(sub));
    }
    out_s << text;
    return kSuccess;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gas-exhaust point cloud augmentation toolkit", "gasaug"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--config", "Key-value run config; command-line options override it");

  GenerateCmd generate;
  AugmentCmd augment;
  ResampleCmd resample;
  InjectNoiseCmd inject;
  EvaluateCmd evaluate;
  IouCmd iou;
  LossCmd loss;
  auto* s_gen = app.add_subcommand("generate", "Grow a pool of synthetic gas clouds from labeled sources");
  auto* s_aug = app.add_subcommand("augment", "Insert gas clouds next to vehicles");
  auto* s_res = app.add_subcommand("resample", "Impose a sensor's scan pattern");
  auto* s_inj = app.add_subcommand("inject-noise", "Add uniform noise points around ground-truth boxes");
  auto* s_eval = app.add_subcommand("evaluate", "R40 average precision for the vehicle class");
  auto* s_iou = app.add_subcommand("iou", "IoU matrix between two box files");
  auto* s_loss = app.add_subcommand("loss", "Noise loss and weighted total loss");
  generate.attach(s_gen);
  augment.attach(s_aug);
  resample.attach(s_res);
  inject.attach(s_inj);
  evaluate.attach(s_eval);
  iou.attach(s_iou);
  loss.attach(s_loss);

  try {
    const auto expanded = expand_config(app, args);
    std::vector<const char*> argv{"gasaug"};
    for (const auto& a : expanded) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_data_error() ? kDataError : kUsageError;
  }

  try {
    if (s_gen->parsed()) return generate.run(*s_gen, out, err);
    if (s_aug->parsed()) return augment.run(*s_aug, out, err);
    if (s_res->parsed()) return resample.run(*s_res, out, err);
    if (s_inj->parsed()) return inject.run(*s_inj, out, err);
    if (s_eval->parsed()) return evaluate.run(*s_eval, out, err);
    if (s_iou->parsed()) return iou.run(*s_iou, out, err);
    if (s_loss->parsed()) return loss.run(*s_loss, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.is_data_error() ? kDataError : kUsageError;
  } catch (const fs::filesystem_error& e) {
    err << "error [IoError]: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  err << "internal error: no subcommand ran\n";
  return kInternalError;
}

}  // namespace gasaug::cli
