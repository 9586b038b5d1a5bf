// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gunpose/model.hpp"

namespace gunpose {

// Ground truth and predictions for one image, any mix of classes.
struct ImageDetections {
  std::string image_id;
  std::vector<BBox> ground_truth;
  std::vector<BBox> predictions;
};

struct PredictionMatch {
  bool true_positive = false;
  std::optional<int> gt_index;
  double iou = 0.0;

  bool operator==(const PredictionMatch&) const = default;
};

struct MatchResult {
  std::vector<PredictionMatch> predictions;  ///< in input order
  std::vector<int> unmatched_gts;            ///< false negatives, ascending

  int true_positives() const noexcept;
  int false_positives() const noexcept;
  int false_negatives() const noexcept { return static_cast<int>(unmatched_gts.size()); }
};

// Greedy matching in descending confidence (ties keep input order). Each
// prediction takes the unmatched ground truth of highest IoU >= iou_min
// (ties go to the lower gt index), otherwise it is a false positive.
// Throws Error on mixed classes or iou_min outside (0,1].
MatchResult match_detections(std::span<const BBox> predictions, std::span<const BBox> ground_truth,
                             double iou_min);

inline constexpr std::array<double, 10> kCocoIouThresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                                              0.75, 0.80, 0.85, 0.90, 0.95};
inline constexpr int kRecallSamples = 101;

// Ground-truth area filter on normalized w*h; [lo, hi).
struct AreaRange {
  const char* name = "all";
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double area) const noexcept { return area >= lo && area < hi; }
};

// COCO's 32px / 96px cut-offs scaled to 640px frames.
inline constexpr double kSmallAreaMax = (32.0 / 640.0) * (32.0 / 640.0);
inline constexpr double kMediumAreaMax = (96.0 / 640.0) * (96.0 / 640.0);
inline constexpr AreaRange kAreaAll{"all"};
inline constexpr AreaRange kAreaSmall{"small", 0.0, kSmallAreaMax};
inline constexpr AreaRange kAreaMedium{"medium", kSmallAreaMax, kMediumAreaMax};
inline constexpr AreaRange kAreaLarge{"large", kMediumAreaMax, std::numeric_limits<double>::infinity()};

struct ApOptions {
  double iou_min = 0.5;
  AreaRange area = kAreaAll;
  int max_dets = 0;  ///< per image; 0 = keep every prediction
};

struct ClassEvaluation {
  int num_gt = 0;                 ///< ground truths inside the area range
  std::optional<double> ap;       ///< absent when num_gt == 0
  std::optional<double> recall;   ///< final recall, absent when num_gt == 0
  // Interpolated precision at recall k/100, k = 0..100.
  std::array<double, kRecallSamples> precision_at_recall{};
};

// 101-point interpolated AP for one class over a dataset: the precision
// envelope max_{r' >= r} p(r') sampled at recall 0.00, 0.01, ..., 1.00.
// Ground truths outside opts.area are ignored; predictions matched to them,
// or unmatched and outside the range, do not count.
ClassEvaluation evaluate_class(std::span<const ImageDetections> images, int class_id,
                               const ApOptions& opts = {}, int workers = 1);

std::optional<double> average_precision(std::span<const ImageDetections> images, int class_id,
                                        double iou_min);

struct ClassReport {
  int class_id = 0;
  std::string name;
  int num_gt = 0;
  int num_pred = 0;
  // At the report's confidence threshold and IoU 0.5.
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  std::optional<double> ap50, ap75, ap50_95;
  std::optional<double> ap_small, ap_medium, ap_large;
  std::optional<double> ar1, ar10, ar100;
  std::optional<double> ar_small, ar_medium, ar_large;
  std::array<double, kRecallSamples> pr_curve{};  ///< IoU 0.5, recall k/100
};

struct EvalReport {
  int num_images = 0;
  double conf_threshold = 0.25;
  std::vector<ClassReport> classes;
  std::optional<double> map50;
  std::optional<double> map50_95;
};

// AP per class at IoU 0.50:0.05:0.95; mAP50-95 averages thresholds, then classes.
EvalReport map_range(std::span<const ImageDetections> images, const ClassMap& class_map,
                     double conf_threshold = 0.25, int workers = 1);

std::string report_to_json(const EvalReport& report);
// COCO summary lines followed by a per-class table.
std::string report_to_table(const EvalReport& report);

// ---------------------------------------------------------------------------
// Per-image itemization of errors.

enum class Outcome { kTruePositive, kFalsePositive, kFalseNegative };

struct ConfusionItem {
  Outcome kind = Outcome::kFalsePositive;
  int index = 0;  ///< prediction index (TP/FP) or ground-truth index (FN)
  BBox box;
  std::optional<int> matched_gt;  ///< TP only
  double iou = 0.0;
};

struct ImageConfusion {
  std::string image_id;
  std::vector<ConfusionItem> true_positives;
  std::vector<ConfusionItem> false_positives;
  std::vector<ConfusionItem> false_negatives;
};

struct ConfusionReport {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<ImageConfusion> images;  ///< input order
};

// Predictions below conf_min are dropped before matching (per class).
ConfusionReport confusion_report(std::span<const ImageDetections> images, double conf_min,
                                 double iou_min, int workers = 0);
ConfusionReport confusion_report_serial(std::span<const ImageDetections> images, double conf_min,
                                        double iou_min);

std::string confusion_to_json(const ConfusionReport& report);

}  // namespace gunpose
