#pragma once

// Evaluation protocol: noise injection into ground-truth boxes and R40
// average precision for the vehicle class with easy/moderate/hard buckets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "gasaug/core.hpp"
#include "gasaug/error.hpp"
#include "gasaug/loss.hpp"
#include "gasaug/rng.hpp"

namespace gasaug {

// ---------------------------------------------------------------------------
// Noise injection

struct NoiseProtocolParams {
  int k_prime = 0;
  double dilation = 0.25;  // m added to each horizontal face of the gt box
};

/// Region noise points are drawn from for one gt box.
inline Box3D dilated_box(const Box3D& box, double dilation) {
  return {box.center(), box.length() + 2.0 * dilation, box.width() + 2.0 * dilation, box.height(), box.yaw()};
}

/// For every gt box: k ~ U{0..k'}, then k points uniform in the dilated box
/// with reflectivity ~ U[0, 1], appended to the cloud. Draws per point are
/// (x, y, z, reflectivity) in the box frame. DontCare regions are not objects
/// and get nothing (and consume no draws). `counts`, when given, receives k
/// per gt entry (0 for DontCare).
inline DetectionFrame inject_noise(const DetectionFrame& frame, const NoiseProtocolParams& params, SeededRng& rng,
                                   std::vector<int>* counts = nullptr) {
  if (params.k_prime < 0) throw Error(ErrorCode::InvalidArgument, "k' must be non-negative");
  if (!(params.dilation >= 0.0)) throw Error(ErrorCode::InvalidArgument, "dilation must be non-negative");
  DetectionFrame out = frame;
  if (counts) counts->clear();
  for (const auto& gt : frame.gt_boxes) {
    if (gt.label == "DontCare") {
      if (counts) counts->push_back(0);
      continue;
    }
    const int k = static_cast<int>(rng.uniform_int(0, params.k_prime));
    if (counts) counts->push_back(k);
    const Box3D region = dilated_box(gt.box, params.dilation);
    for (int i = 0; i < k; ++i) {
      const double lx = rng.uniform(-0.5, 0.5) * region.length();
      const double ly = rng.uniform(-0.5, 0.5) * region.width();
      const double lz = rng.uniform(-0.5, 0.5) * region.height();
      const double r = rng.uniform01();
      out.cloud.points.push_back(make_point(from_box_frame({lx, ly, lz}, region), r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Difficulty

enum class Difficulty { Easy = 0, Moderate = 1, Hard = 2, Ignored = 3 };

inline constexpr std::array<Difficulty, 3> kDifficulties{Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard};

inline std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Moderate: return "moderate";
    case Difficulty::Hard: return "hard";
    case Difficulty::Ignored: return "ignored";
  }
  return "unknown";
}

/// KITTI occlusion/truncation buckets; the image-height criterion is replaced
/// by a range gate on the box center.
inline Difficulty assign_difficulty(const LabeledBox& gt, double range_gate = std::numeric_limits<double>::infinity()) {
  if (gt.occlusion < 0 || gt.occlusion > 3 || !(gt.truncation >= 0.0 && gt.truncation <= 1.0)) {
    throw Error(ErrorCode::InvalidLabel, "occlusion must be in {0..3} and truncation in [0, 1]");
  }
  if (norm(gt.box.center()) > range_gate) return Difficulty::Ignored;
  if (gt.occlusion == 0 && gt.truncation <= 0.15) return Difficulty::Easy;
  if (gt.occlusion <= 1 && gt.truncation <= 0.30) return Difficulty::Moderate;
  if (gt.occlusion <= 2 && gt.truncation <= 0.50) return Difficulty::Hard;
  return Difficulty::Ignored;
}

// ---------------------------------------------------------------------------
// Matching and AP

enum class Metric { Bev, ThreeD };

inline std::string_view to_string(Metric m) { return m == Metric::Bev ? "bev" : "3d"; }

struct EvalConfig {
  double iou_threshold = 0.7;
  Metric metric = Metric::ThreeD;
  int recall_positions = 40;
  double range_gate = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "IoU threshold must lie in (0, 1]");
    }
    if (recall_positions < 1) throw Error(ErrorCode::InvalidArgument, "recall positions must be >= 1");
  }
};

inline double metric_iou(const Box3D& a, const Box3D& b, Metric m) {
  return m == Metric::Bev ? bev_iou(a, b) : iou3d(a, b);
}

enum class MatchFlag { TruePositive, FalsePositive, Ignored };

/// Role of a gt box when evaluating one difficulty level.
enum class GtRole { Valid, DontCare, Unused };

inline GtRole gt_role(const LabeledBox& gt, Difficulty level, double range_gate) {
  if (gt.label == "DontCare") return GtRole::DontCare;
  if (!is_vehicle_label(gt.label)) return GtRole::Unused;
  const Difficulty d = assign_difficulty(gt, range_gate);
  if (d == Difficulty::Ignored || static_cast<int>(d) > static_cast<int>(level)) return GtRole::DontCare;
  return GtRole::Valid;
}

struct MatchResult {
  std::vector<MatchFlag> pred_flags;  // input order; non-vehicle predictions are Ignored
  std::vector<bool> gt_matched;       // input order
  std::vector<GtRole> gt_roles;
  std::size_t valid_gt = 0;
};

/// Greedy matching in descending score order (ties by input order). Each
/// prediction takes the highest-IoU unmatched valid gt with IoU >= threshold;
/// failing that, overlap with a don't-care gt makes it Ignored, else FP.
inline MatchResult match_detections(std::span<const ScoredBox> preds, std::span<const LabeledBox> gts,
                                    const EvalConfig& config, Difficulty level) {
  MatchResult res;
  res.pred_flags.assign(preds.size(), MatchFlag::Ignored);
  res.gt_matched.assign(gts.size(), false);
  res.gt_roles.reserve(gts.size());
  for (const auto& g : gts) {
    res.gt_roles.push_back(gt_role(g, level, config.range_gate));
    if (res.gt_roles.back() == GtRole::Valid) ++res.valid_gt;
  }
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
  for (std::size_t p : order) {
    if (!is_vehicle_label(preds[p].label)) continue;
    double best = -1.0;
    std::size_t best_gt = gts.size();
    bool dont_care_hit = false;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (res.gt_roles[g] == GtRole::Unused) continue;
      const double iou = metric_iou(preds[p].box, gts[g].box, config.metric);
      if (iou < config.iou_threshold) continue;
      if (res.gt_roles[g] == GtRole::DontCare) {
        dont_care_hit = true;
      } else if (!res.gt_matched[g] && iou > best) {
        best = iou;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      res.gt_matched[best_gt] = true;
      res.pred_flags[p] = MatchFlag::TruePositive;
    } else {
      res.pred_flags[p] = dont_care_hit ? MatchFlag::Ignored : MatchFlag::FalsePositive;
    }
  }
  return res;
}

struct EvalFrame {
  std::vector<ScoredBox> preds;
  std::vector<LabeledBox> gts;
};

struct LevelResult {
  double ap = 0.0;  // percent
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t gt = 0;
};

struct APResult {
  Metric metric = Metric::ThreeD;
  std::array<LevelResult, 3> levels{};

  double ap_easy() const { return levels[0].ap; }
  double ap_moderate() const { return levels[1].ap; }
  double ap_hard() const { return levels[2].ap; }
  const LevelResult& at(Difficulty d) const { return levels[static_cast<std::size_t>(d)]; }
};

struct PrPoint {
  std::size_t tp = 0;
  std::size_t fp = 0;
};

/// Interpolated AP over `positions` recall points r_i = i / positions:
/// (100 / positions) * sum_i max{ precision(k) : recall(k) >= r_i }.
inline double interpolated_ap(std::span<const PrPoint> curve, std::size_t n_gt, int positions) {
  if (n_gt == 0) return 0.0;
  double sum = 0.0;
  for (int i = 1; i <= positions; ++i) {
    double best = 0.0;
    for (const auto& pt : curve) {
      // recall >= i / positions, compared in integers.
      if (pt.tp * static_cast<std::size_t>(positions) >= static_cast<std::size_t>(i) * n_gt && pt.tp + pt.fp > 0) {
        best = std::max(best, static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp));
      }
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(positions);
}

/// Pools predictions over all frames, sweeps the distinct score thresholds
/// and integrates the precision-recall curve per difficulty. A level with no
/// valid ground truth reports AP 0 with gt = 0.
inline APResult average_precision_r40(std::span<const EvalFrame> frames, const EvalConfig& config) {
  config.validate();
  bool any_gt = false;
  for (const auto& f : frames) {
    for (const auto& g : f.gts) any_gt = any_gt || is_vehicle_label(g.label);
  }
  if (!any_gt) throw Error(ErrorCode::NoGroundTruth, "no vehicle ground truth in the evaluated frames");

  APResult result;
  result.metric = config.metric;
  for (Difficulty level : kDifficulties) {
    struct Scored {
      double score;
      bool tp;
    };
    std::vector<Scored> pooled;
    std::size_t n_gt = 0;
    for (const auto& f : frames) {
      const auto m = match_detections(f.preds, f.gts, config, level);
      n_gt += m.valid_gt;
      for (std::size_t p = 0; p < f.preds.size(); ++p) {
        if (m.pred_flags[p] == MatchFlag::Ignored) continue;
        pooled.push_back({f.preds[p].score, m.pred_flags[p] == MatchFlag::TruePositive});
      }
    }
    std::stable_sort(pooled.begin(), pooled.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
    std::vector<PrPoint> curve;
    PrPoint acc;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      if (pooled[i].tp) {
        ++acc.tp;
      } else {
        ++acc.fp;
      }
      const bool last_of_threshold = i + 1 == pooled.size() || pooled[i + 1].score != pooled[i].score;
      if (last_of_threshold) curve.push_back(acc);
    }
    auto& lvl = result.levels[static_cast<std::size_t>(level)];
    lvl.gt = n_gt;
    lvl.tp = acc.tp;
    lvl.fp = acc.fp;
    lvl.fn = n_gt - acc.tp;
    lvl.ap = interpolated_ap(curve, n_gt, config.recall_positions);
  }
  return result;
}

}  // namespace gasaug
