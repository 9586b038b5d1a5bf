// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "gunpose/error.hpp"
#include "gunpose/geometry.hpp"
#include "gunpose/parallel.hpp"
#include "json.hpp"

namespace gunpose {

using ojson = nlohmann::ordered_json;

int MatchResult::true_positives() const noexcept {
  return static_cast<int>(std::count_if(predictions.begin(), predictions.end(),
                                        [](const PredictionMatch& m) { return m.true_positive; }));
}

int MatchResult::false_positives() const noexcept {
  return static_cast<int>(predictions.size()) - true_positives();
}

namespace {

// Indices of `preds` in descending confidence, ties in input order.
std::vector<int> confidence_order(std::span<const BBox> preds) {
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return preds[a].confidence > preds[b].confidence; });
  return order;
}

enum class Status { kTruePositive, kFalsePositive, kIgnored };

struct Assignment {
  std::optional<int> gt;
  double iou = 0.0;
};

// Greedy matcher shared by every metric. `order` lists the predictions to
// consider, highest confidence first. Ground truths flagged in `gt_ignored`
// are matched only when no regular ground truth qualifies.
std::vector<Assignment> greedy_match(std::span<const BBox> preds, std::span<const int> order,
                                     std::span<const BBox> gts, const std::vector<char>& gt_ignored,
                                     double iou_min, std::vector<char>& gt_taken) {
  std::vector<Assignment> out(preds.size());
  gt_taken.assign(gts.size(), 0);
  for (int p : order) {
    Assignment best;
    for (int pass = 0; pass < 2 && !best.gt; ++pass) {
      for (size_t g = 0; g < gts.size(); ++g) {
        if (gt_taken[g] || gt_ignored[g] != pass) continue;
        const double o = iou(preds[p], gts[g]);
        if (o >= iou_min && (!best.gt || o > best.iou)) best = {static_cast<int>(g), o};
      }
    }
    if (best.gt) gt_taken[*best.gt] = 1;
    out[p] = best;
  }
  return out;
}

struct ScoredPrediction {
  double confidence;
  bool true_positive;
};

struct ImageMatch {
  std::vector<ScoredPrediction> scored;  ///< non-ignored predictions, confidence order
  int num_gt = 0;                        ///< non-ignored ground truths
};

ImageMatch match_image(const ImageDetections& img, int class_id, const ApOptions& opts) {
  std::vector<BBox> preds, gts;
  for (const auto& b : img.predictions)
    if (b.class_id == class_id) preds.push_back(b);
  for (const auto& b : img.ground_truth)
    if (b.class_id == class_id) gts.push_back(b);

  std::vector<int> order = confidence_order(preds);
  if (opts.max_dets > 0 && static_cast<int>(order.size()) > opts.max_dets) order.resize(opts.max_dets);

  std::vector<char> ignored(gts.size());
  ImageMatch out;
  for (size_t g = 0; g < gts.size(); ++g) {
    ignored[g] = !opts.area.contains(gts[g].area());
    out.num_gt += !ignored[g];
  }
  std::vector<char> taken;
  const auto assign = greedy_match(preds, order, gts, ignored, opts.iou_min, taken);
  for (int p : order) {
    const auto& a = assign[p];
    if (a.gt) {
      if (!ignored[*a.gt]) out.scored.push_back({preds[p].confidence, true});
    } else if (opts.area.contains(preds[p].area())) {
      out.scored.push_back({preds[p].confidence, false});
    }
  }
  return out;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& xs) {
  double sum = 0;
  int n = 0;
  for (const auto& x : xs)
    if (x) sum += *x, ++n;
  if (n == 0) return std::nullopt;
  return sum / n;
}

void check_iou_min(double iou_min) {
  if (!(iou_min > 0.0 && iou_min <= 1.0)) throw Error(fmt::format("iou_min must be in (0,1] (got {})", iou_min));
}

}  // namespace

MatchResult match_detections(std::span<const BBox> predictions, std::span<const BBox> ground_truth,
                             double iou_min) {
  check_iou_min(iou_min);
  std::optional<int> cls;
  for (auto boxes : {predictions, ground_truth})
    for (const auto& b : boxes) {
      if (cls && *cls != b.class_id) throw Error("match_detections: boxes of different classes");
      cls = b.class_id;
    }
  const auto order = confidence_order(predictions);
  std::vector<char> ignored(ground_truth.size(), 0), taken;
  const auto assign = greedy_match(predictions, order, ground_truth, ignored, iou_min, taken);
  MatchResult r;
  for (const auto& a : assign) r.predictions.push_back({a.gt.has_value(), a.gt, a.iou});
  for (size_t g = 0; g < ground_truth.size(); ++g)
    if (!taken[g]) r.unmatched_gts.push_back(static_cast<int>(g));
  return r;
}

ClassEvaluation evaluate_class(std::span<const ImageDetections> images, int class_id,
                               const ApOptions& opts, int workers) {
  check_iou_min(opts.iou_min);
  std::vector<ImageMatch> per_image(images.size());
  parallel_for(static_cast<std::ptrdiff_t>(images.size()), workers,
               [&](std::ptrdiff_t i) { per_image[i] = match_image(images[i], class_id, opts); });

  ClassEvaluation ev;
  std::vector<ScoredPrediction> scored;
  for (const auto& m : per_image) {
    ev.num_gt += m.num_gt;
    scored.insert(scored.end(), m.scored.begin(), m.scored.end());
  }
  if (ev.num_gt == 0) return ev;
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredPrediction& a, const ScoredPrediction& b) { return a.confidence > b.confidence; });

  const size_t n = scored.size();
  std::vector<double> recall(n), precision(n);
  int tp = 0, fp = 0;
  for (size_t i = 0; i < n; ++i) {
    scored[i].true_positive ? ++tp : ++fp;
    recall[i] = static_cast<double>(tp) / ev.num_gt;
    precision[i] = static_cast<double>(tp) / (tp + fp);
  }
  for (size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double sum = 0.0;
  for (int k = 0; k < kRecallSamples; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    const double p = it == recall.end() ? 0.0 : precision[it - recall.begin()];
    ev.precision_at_recall[k] = p;
    sum += p;
  }
  ev.ap = sum / kRecallSamples;
  ev.recall = n == 0 ? 0.0 : recall.back();
  return ev;
}

std::optional<double> average_precision(std::span<const ImageDetections> images, int class_id,
                                        double iou_min) {
  return evaluate_class(images, class_id, ApOptions{iou_min, kAreaAll, 0}).ap;
}

EvalReport map_range(std::span<const ImageDetections> images, const ClassMap& class_map,
                     double conf_threshold, int workers) {
  EvalReport report;
  report.num_images = static_cast<int>(images.size());
  report.conf_threshold = conf_threshold;

  // Predictions gated by the confidence threshold, for P/R/F1.
  std::vector<ImageDetections> gated(images.begin(), images.end());
  for (auto& img : gated)
    std::erase_if(img.predictions, [&](const BBox& b) { return b.confidence < conf_threshold; });

  std::vector<std::optional<double>> ap50s, ap5095s;
  for (int c = 0; c < class_map.size(); ++c) {
    ClassReport cr;
    cr.class_id = c;
    cr.name = class_map.name_of(c);
    for (const auto& img : images) {
      cr.num_gt += static_cast<int>(std::count_if(img.ground_truth.begin(), img.ground_truth.end(),
                                                  [&](const BBox& b) { return b.class_id == c; }));
      cr.num_pred += static_cast<int>(std::count_if(img.predictions.begin(), img.predictions.end(),
                                                    [&](const BBox& b) { return b.class_id == c; }));
    }

    for (const auto& img : gated) {
      std::vector<BBox> preds, gts;
      for (const auto& b : img.predictions)
        if (b.class_id == c) preds.push_back(b);
      for (const auto& b : img.ground_truth)
        if (b.class_id == c) gts.push_back(b);
      const auto m = match_detections(preds, gts, 0.5);
      cr.tp += m.true_positives();
      cr.fp += m.false_positives();
      cr.fn += m.false_negatives();
    }
    if (cr.tp + cr.fp > 0) cr.precision = static_cast<double>(cr.tp) / (cr.tp + cr.fp);
    if (cr.tp + cr.fn > 0) cr.recall = static_cast<double>(cr.tp) / (cr.tp + cr.fn);
    if (cr.precision && cr.recall) {
      const double s = *cr.precision + *cr.recall;
      cr.f1 = s > 0 ? 2 * *cr.precision * *cr.recall / s : 0.0;
    }

    // AP and AR over the IoU sweep.
    auto sweep = [&](AreaRange area, int max_dets, bool want_recall) {
      std::vector<std::optional<double>> vals;
      for (double t : kCocoIouThresholds) {
        const auto ev = evaluate_class(images, c, ApOptions{t, area, max_dets}, workers);
        vals.push_back(want_recall ? ev.recall : ev.ap);
      }
      return mean_of(vals);
    };
    const auto at50 = evaluate_class(images, c, ApOptions{0.5, kAreaAll, 0}, workers);
    cr.ap50 = at50.ap;
    cr.pr_curve = at50.precision_at_recall;
    cr.ap75 = evaluate_class(images, c, ApOptions{0.75, kAreaAll, 0}, workers).ap;
    cr.ap50_95 = sweep(kAreaAll, 0, false);
    cr.ap_small = sweep(kAreaSmall, 0, false);
    cr.ap_medium = sweep(kAreaMedium, 0, false);
    cr.ap_large = sweep(kAreaLarge, 0, false);
    cr.ar1 = sweep(kAreaAll, 1, true);
    cr.ar10 = sweep(kAreaAll, 10, true);
    cr.ar100 = sweep(kAreaAll, 100, true);
    cr.ar_small = sweep(kAreaSmall, 100, true);
    cr.ar_medium = sweep(kAreaMedium, 100, true);
    cr.ar_large = sweep(kAreaLarge, 100, true);

    ap50s.push_back(cr.ap50);
    ap5095s.push_back(cr.ap50_95);
    report.classes.push_back(std::move(cr));
  }
  report.map50 = mean_of(ap50s);
  report.map50_95 = mean_of(ap5095s);
  return report;
}

namespace {

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string opt_fixed(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : "-1.000"; }

std::optional<double> class_mean(const EvalReport& r, std::optional<double> ClassReport::*field) {
  std::vector<std::optional<double>> vals;
  for (const auto& c : r.classes) vals.push_back(c.*field);
  return mean_of(vals);
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  ojson classes = ojson::array();
  for (const auto& c : report.classes) {
    ojson curve = ojson::array();
    for (int k = 0; k < kRecallSamples; ++k) curve.push_back(ojson::array({k / 100.0, c.pr_curve[k]}));
    classes.push_back(ojson{{"class_id", c.class_id},
                            {"name", c.name},
                            {"num_gt", c.num_gt},
                            {"num_pred", c.num_pred},
                            {"tp", c.tp},
                            {"fp", c.fp},
                            {"fn", c.fn},
                            {"precision", opt_json(c.precision)},
                            {"recall", opt_json(c.recall)},
                            {"f1", opt_json(c.f1)},
                            {"AP50", opt_json(c.ap50)},
                            {"AP75", opt_json(c.ap75)},
                            {"AP50_95", opt_json(c.ap50_95)},
                            {"AP_small", opt_json(c.ap_small)},
                            {"AP_medium", opt_json(c.ap_medium)},
                            {"AP_large", opt_json(c.ap_large)},
                            {"AR1", opt_json(c.ar1)},
                            {"AR10", opt_json(c.ar10)},
                            {"AR100", opt_json(c.ar100)},
                            {"AR_small", opt_json(c.ar_small)},
                            {"AR_medium", opt_json(c.ar_medium)},
                            {"AR_large", opt_json(c.ar_large)},
                            {"pr_curve", std::move(curve)}});
  }
  ojson root{{"num_images", report.num_images},
             {"conf_threshold", report.conf_threshold},
             {"mAP50", opt_json(report.map50)},
             {"mAP50_95", opt_json(report.map50_95)},
             {"classes", std::move(classes)}};
  return root.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& r) {
  std::string out;
  auto line = [&](const char* kind, const char* iou, const char* area, int dets, std::optional<double> v) {
    const bool ap = kind[1] == 'P';
    fmt::format_to(std::back_inserter(out), " {:<18} {} @[ IoU={:<9} | area={:>6} | maxDets={:>3} ] = {}\n",
                   ap ? "Average Precision" : "Average Recall", ap ? "(AP)" : "(AR)", iou, area, dets,
                   opt_fixed(v));
  };
  line("AP", "0.50:0.95", "all", 100, class_mean(r, &ClassReport::ap50_95));
  line("AP", "0.50", "all", 100, class_mean(r, &ClassReport::ap50));
  line("AP", "0.75", "all", 100, class_mean(r, &ClassReport::ap75));
  line("AP", "0.50:0.95", "small", 100, class_mean(r, &ClassReport::ap_small));
  line("AP", "0.50:0.95", "medium", 100, class_mean(r, &ClassReport::ap_medium));
  line("AP", "0.50:0.95", "large", 100, class_mean(r, &ClassReport::ap_large));
  line("AR", "0.50:0.95", "all", 1, class_mean(r, &ClassReport::ar1));
  line("AR", "0.50:0.95", "all", 10, class_mean(r, &ClassReport::ar10));
  line("AR", "0.50:0.95", "all", 100, class_mean(r, &ClassReport::ar100));
  line("AR", "0.50:0.95", "small", 100, class_mean(r, &ClassReport::ar_small));
  line("AR", "0.50:0.95", "medium", 100, class_mean(r, &ClassReport::ar_medium));
  line("AR", "0.50:0.95", "large", 100, class_mean(r, &ClassReport::ar_large));
  out += "\n";
  fmt::format_to(std::back_inserter(out), "{:>10} {:>8} {:>8} {:>6} {:>6} {:>6} {:>7} {:>7} {:>9}\n", "class",
                 "images", "labels", "P", "R", "F1", "mAP50", "mAP75", "mAP50-95");
  for (const auto& c : r.classes)
    fmt::format_to(std::back_inserter(out), "{:>10} {:>8} {:>8} {:>6} {:>6} {:>6} {:>7} {:>7} {:>9}\n", c.name,
                   r.num_images, c.num_gt, opt_fixed(c.precision), opt_fixed(c.recall), opt_fixed(c.f1),
                   opt_fixed(c.ap50), opt_fixed(c.ap75), opt_fixed(c.ap50_95));
  fmt::format_to(std::back_inserter(out), "{:>10} {:>8} {:>8} {:>6} {:>6} {:>6} {:>7} {:>7} {:>9}\n", "all",
                 r.num_images, "", "", "", "", opt_fixed(r.map50), "", opt_fixed(r.map50_95));
  fmt::format_to(std::back_inserter(out), "(P/R/F1 at conf >= {}, IoU 0.50)\n", r.conf_threshold);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ImageConfusion confuse_image(const ImageDetections& img, double conf_min, double iou_min) {
  ImageConfusion out;
  out.image_id = img.image_id;
  std::set<int> classes;
  for (const auto& b : img.ground_truth) classes.insert(b.class_id);
  for (const auto& b : img.predictions) classes.insert(b.class_id);
  for (int c : classes) {
    std::vector<BBox> preds, gts;
    std::vector<int> pred_idx, gt_idx;
    for (size_t i = 0; i < img.predictions.size(); ++i)
      if (img.predictions[i].class_id == c && img.predictions[i].confidence >= conf_min)
        preds.push_back(img.predictions[i]), pred_idx.push_back(static_cast<int>(i));
    for (size_t i = 0; i < img.ground_truth.size(); ++i)
      if (img.ground_truth[i].class_id == c) gts.push_back(img.ground_truth[i]), gt_idx.push_back(static_cast<int>(i));
    const auto m = match_detections(preds, gts, iou_min);
    for (size_t p = 0; p < preds.size(); ++p) {
      const auto& pm = m.predictions[p];
      if (pm.true_positive)
        out.true_positives.push_back({Outcome::kTruePositive, pred_idx[p], preds[p], gt_idx[*pm.gt_index], pm.iou});
      else
        out.false_positives.push_back({Outcome::kFalsePositive, pred_idx[p], preds[p], std::nullopt, 0.0});
    }
    for (int g : m.unmatched_gts)
      out.false_negatives.push_back({Outcome::kFalseNegative, gt_idx[g], gts[g], std::nullopt, 0.0});
  }
  auto by_index = [](const ConfusionItem& a, const ConfusionItem& b) { return a.index < b.index; };
  std::sort(out.true_positives.begin(), out.true_positives.end(), by_index);
  std::sort(out.false_positives.begin(), out.false_positives.end(), by_index);
  std::sort(out.false_negatives.begin(), out.false_negatives.end(), by_index);
  return out;
}

ConfusionReport reduce(std::vector<ImageConfusion> images) {
  ConfusionReport r;
  for (const auto& img : images) {
    r.tp += static_cast<int>(img.true_positives.size());
    r.fp += static_cast<int>(img.false_positives.size());
    r.fn += static_cast<int>(img.false_negatives.size());
  }
  r.images = std::move(images);
  return r;
}

}  // namespace

ConfusionReport confusion_report_serial(std::span<const ImageDetections> images, double conf_min,
                                        double iou_min) {
  check_iou_min(iou_min);
  std::vector<ImageConfusion> per_image;
  for (const auto& img : images) per_image.push_back(confuse_image(img, conf_min, iou_min));
  return reduce(std::move(per_image));
}

ConfusionReport confusion_report(std::span<const ImageDetections> images, double conf_min, double iou_min,
                                 int workers) {
  check_iou_min(iou_min);
  std::vector<ImageConfusion> per_image(images.size());
  parallel_for(static_cast<std::ptrdiff_t>(images.size()), workers,
               [&](std::ptrdiff_t i) { per_image[i] = confuse_image(images[i], conf_min, iou_min); });
  return reduce(std::move(per_image));
}

std::string confusion_to_json(const ConfusionReport& report) {
  auto items = [](const std::vector<ConfusionItem>& xs) {
    ojson arr = ojson::array();
    for (const auto& it : xs) {
      ojson j{{"index", it.index},
              {"class_id", it.box.class_id},
              {"box", ojson::array({it.box.cx, it.box.cy, it.box.w, it.box.h})},
              {"confidence", it.box.confidence}};
      if (it.matched_gt) {
        j["matched_gt"] = *it.matched_gt;
        j["iou"] = it.iou;
      }
      arr.push_back(std::move(j));
    }
    return arr;
  };
  ojson images = ojson::array();
  for (const auto& img : report.images) {
    if (img.false_positives.empty() && img.false_negatives.empty()) continue;
    images.push_back(ojson{{"image_id", img.image_id},
                           {"false_positives", items(img.false_positives)},
                           {"false_negatives", items(img.false_negatives)}});
  }
  ojson root{{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}, {"images", std::move(images)}};
  return root.dump(2) + "\n";
}

}  // namespace gunpose
