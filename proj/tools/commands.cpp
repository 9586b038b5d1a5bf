// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <chrono>
#include <set>

#include <fmt/format.h>

#include "gunpose/augment.hpp"
#include "gunpose/bundle.hpp"
#include "gunpose/error.hpp"
#include "gunpose/eval.hpp"
#include "gunpose/ingest.hpp"
#include "gunpose/kvconfig.hpp"
#include "gunpose/render.hpp"
#include "gunpose/threat.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace gunpose::cli {

namespace {

using ojson = nlohmann::ordered_json;

// Machine-readable record of one run; written exactly once.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::ostream& sink)
      : sink_(sink), start_(std::chrono::steady_clock::now()) {
    doc_["tool"] = "gunpose";
    doc_["version"] = kToolVersion;
    doc_["subcommand"] = std::move(subcommand);
    doc_["config"] = ojson::object();
    doc_["inputs"] = ojson::object();
    doc_["outputs"] = ojson::object();
    doc_["counts"] = ojson::object();
    doc_["failures"] = ojson::array();
  }

  ojson& config() { return doc_["config"]; }
  ojson& inputs() { return doc_["inputs"]; }
  ojson& outputs() { return doc_["outputs"]; }
  ojson& counts() { return doc_["counts"]; }

  void fail_item(const std::string& item, const std::string& error) {
    doc_["failures"].push_back(ojson{{"item", item}, {"error", error}});
  }

  int finish(int status, const std::string& fatal = {}) {
    doc_["status"] = status;
    if (!fatal.empty()) doc_["fatal_error"] = fatal;
    doc_["counts"]["failed"] = doc_["failures"].size();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    doc_["wall_time_s"] = dt.count();
    sink_ << doc_.dump() << '\n';
    return status;
  }

 private:
  std::ostream& sink_;
  std::chrono::steady_clock::time_point start_;
  ojson doc_;
};

ojson text_config_json(std::string_view text) {
  ojson j = ojson::object();
  for (const auto& kv : parse_key_values(text)) j[kv.key] = kv.value;
  return j;
}

ThreatConfig load_threat_config(const std::optional<fs::path>& path, const std::vector<std::string>& overrides) {
  ThreatConfig cfg = path ? ThreatConfig::parse(read_text_file(*path)) : ThreatConfig{};
  for (const auto& o : overrides) {
    const auto kv = split_override(o);
    cfg.set(kv.key, kv.value);
  }
  cfg.validate();
  return cfg;
}

struct LoadedBundle {
  std::vector<Sample> samples;
  std::vector<std::string> failed_ids;
};

LoadedBundle load_bundle(const fs::path& dir, const ClassMap& classes, bool rasters, RunManifest& manifest) {
  LoadedBundle out;
  for (const auto& id : list_bundle_ids(dir)) {
    try {
      Sample s = load_bundle_sample(dir, id, classes, rasters);
      if (auto problems = validate_scene(s.scene); !problems.empty()) throw Error(problems.front());
      out.samples.push_back(std::move(s));
    } catch (const std::exception& e) {
      manifest.fail_item(id, e.what());
      out.failed_ids.push_back(id);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

int run_convert(const ConvertOptions& opts, std::ostream& out, std::ostream& manifest_sink) {
  RunManifest m("convert", manifest_sink);
  m.inputs() = {{"via_project", opts.via_project.string()}, {"images_dir", opts.images_dir.string()}};
  m.outputs() = {{"labels_dir", opts.out_labels_dir.string()}};
  m.config() = {{"attribute_key", opts.attribute_key}, {"classes", opts.classes}, {"auto_orient", opts.auto_orient}};
  try {
    const ClassMap classes = ClassMap::parse(opts.classes);
    if (!fs::is_directory(opts.images_dir))
      throw Error(fmt::format("images directory '{}' does not exist", opts.images_dir.string()));
    const ViaProject project = parse_via_project(read_text_file(opts.via_project));
    for (const auto& w : project.warnings) m.fail_item("warning", w);

    int written = 0, boxes_total = 0;
    for (const auto& [id, image] : project.images) {
      try {
        const fs::path image_path = opts.images_dir / image.filename;
        const auto bytes = read_binary_file(image_path);
        const auto size = probe_image_size(bytes);
        if (!size) throw Error(fmt::format("cannot read image size of '{}'", image_path.string()));
        Scene scene;
        scene.image_id = id;
        scene.width_px = size->width;
        scene.height_px = size->height;
        std::vector<BBox> boxes;
        for (const auto& region : image.regions)
          boxes.push_back(via_to_bbox(region, size->width, size->height, classes, opts.attribute_key));
        if (opts.auto_orient) {
          if (auto code = read_jpeg_exif_orientation(bytes); code && *code != 1) {
            scene.guns = boxes;  // carrier only; class ids are preserved by the remap
            boxes = apply_exif_orientation(scene, ExifOrientation(*code)).guns;
          }
        }
        write_text_file(opts.out_labels_dir / (id + ".txt"), write_yolo_labels(boxes));
        ++written;
        boxes_total += static_cast<int>(boxes.size());
      } catch (const std::exception& e) {
        m.fail_item(id, e.what());
      }
    }
    m.counts() = {{"images", project.images.size()}, {"label_files", written}, {"boxes", boxes_total}};
    out << fmt::format("converted {} of {} images, {} boxes\n", written, project.images.size(), boxes_total);
    return m.finish(0);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return m.finish(1, e.what());
  }
}

int run_fuse(const FuseOptions& opts, std::ostream& out, std::ostream& manifest_sink) {
  RunManifest m("fuse", manifest_sink);
  m.inputs() = {{"scenes_dir", opts.scenes_dir.string()}};
  if (opts.config_path) m.inputs()["config"] = opts.config_path->string();
  m.outputs() = {{"verdicts", opts.out_verdicts.string()}};
  if (opts.svg_dir) m.outputs()["svg_dir"] = opts.svg_dir->string();
  try {
    const ClassMap classes = ClassMap::parse(opts.classes);
    const ThreatConfig cfg = load_threat_config(opts.config_path, opts.overrides);
    m.config() = text_config_json(cfg.to_text());
    m.config()["workers"] = opts.workers;

    auto bundle = load_bundle(opts.scenes_dir, classes, false, m);
    std::vector<Scene> scenes;
    for (auto& s : bundle.samples) scenes.push_back(std::move(s.scene));
    const auto verdicts = classify_batch(scenes, cfg, opts.workers);

    std::string jsonl;
    int guns = 0, threats = 0;
    for (size_t i = 0; i < scenes.size(); ++i) {
      jsonl += verdicts_to_jsonl(scenes[i].image_id, verdicts[i]);
      guns += static_cast<int>(verdicts[i].size());
      for (const auto& v : verdicts[i]) threats += v.threat;
      if (opts.svg_dir)
        write_text_file(*opts.svg_dir / (scenes[i].image_id + ".svg"), render_overlay(scenes[i], verdicts[i]));
    }
    if (opts.out_verdicts == "-")
      out << jsonl;
    else
      write_text_file(opts.out_verdicts, jsonl);
    m.counts() = {{"scenes", scenes.size()}, {"skipped", bundle.failed_ids.size()}, {"verdicts", guns}, {"threats", threats}};
    return m.finish(0);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return m.finish(1, e.what());
  }
}

int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& manifest_sink) {
  RunManifest m("evaluate", manifest_sink);
  m.inputs() = {{"pred_dir", opts.pred_dir.string()}, {"gt_dir", opts.gt_dir.string()}};
  m.outputs() = {{"report", opts.report_path.string()}};
  m.config() = {{"classes", opts.classes}, {"conf_threshold", opts.conf_threshold}, {"iou_min", opts.iou_min},
                {"workers", opts.workers}};
  try {
    const ClassMap classes = ClassMap::parse(opts.classes);
    for (const auto& d : {opts.pred_dir, opts.gt_dir})
      if (!fs::is_directory(d)) throw Error(fmt::format("'{}' is not a directory", d.string()));
    const auto pred_ids = list_stems(opts.pred_dir, ".txt");
    const auto gt_ids = list_stems(opts.gt_dir, ".txt");
    std::vector<std::string> missing;
    const std::set<std::string> pred_set(pred_ids.begin(), pred_ids.end()), gt_set(gt_ids.begin(), gt_ids.end());
    for (const auto& id : gt_ids)
      if (!pred_set.count(id)) missing.push_back("predictions/" + id + ".txt");
    for (const auto& id : pred_ids)
      if (!gt_set.count(id)) missing.push_back("ground_truth/" + id + ".txt");
    if (!missing.empty()) {
      std::string list;
      for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
      throw Error(fmt::format("label stems differ; missing counterparts: {}", list));
    }

    std::vector<ImageDetections> images;
    for (const auto& id : gt_ids) {
      ImageDetections img;
      img.image_id = id;
      img.ground_truth = parse_yolo_labels(read_text_file(opts.gt_dir / (id + ".txt")), classes);
      for (auto& b : img.ground_truth) b.confidence = 1.0;
      img.predictions = parse_yolo_labels(read_text_file(opts.pred_dir / (id + ".txt")), classes);
      images.push_back(std::move(img));
    }
    const EvalReport report = map_range(images, classes, opts.conf_threshold, opts.workers);
    write_text_file(opts.report_path, report_to_json(report));
    const std::string table = report_to_table(report);
    if (opts.table_path) {
      write_text_file(*opts.table_path, table);
      m.outputs()["table"] = opts.table_path->string();
    } else {
      out << table;
    }
    const auto confusion = confusion_report(images, opts.conf_threshold, opts.iou_min, opts.workers);
    if (opts.confusion_path) {
      write_text_file(*opts.confusion_path, confusion_to_json(confusion));
      m.outputs()["confusion"] = opts.confusion_path->string();
    }
    m.counts() = {{"images", images.size()}, {"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}};
    return m.finish(0);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return m.finish(1, e.what());
  }
}

int run_augment(const AugmentOptions& opts, std::ostream& out, std::ostream& manifest_sink) {
  RunManifest m("augment", manifest_sink);
  m.inputs() = {{"scenes_dir", opts.scenes_dir.string()}};
  if (opts.spec_path) m.inputs()["spec"] = opts.spec_path->string();
  m.outputs() = {{"out_dir", opts.out_dir.string()}};
  try {
    const ClassMap classes = ClassMap::parse(opts.classes);
    AugmentSpec spec = opts.spec_path ? AugmentSpec::parse(read_text_file(*opts.spec_path)) : AugmentSpec{};
    for (const auto& o : opts.overrides) {
      const auto kv = split_override(o);
      spec.set(kv.key, kv.value);
    }
    spec.validate();
    m.config() = text_config_json(spec.to_text());
    m.config()["workers"] = opts.workers;

    auto bundle = load_bundle(opts.scenes_dir, classes, true, m);
    const auto augmented = augment_batch(bundle.samples, spec, opts.workers);
    int rasters = 0, dropped_boxes = 0;
    for (size_t i = 0; i < augmented.size(); ++i) {
      const auto& a = augmented[i];
      const auto& src = bundle.samples[i].scene;
      dropped_boxes += static_cast<int>(src.guns.size() + src.persons.size() - a.scene.guns.size() - a.scene.persons.size());
      rasters += a.raster.has_value();
      write_bundle_sample(opts.out_dir, a, classes);
    }
    m.counts() = {{"items", augmented.size()}, {"rasters", rasters}, {"skipped", bundle.failed_ids.size()},
                  {"boxes_dropped", dropped_boxes}};
    out << fmt::format("augmented {} items ({} with pixels)\n", augmented.size(), rasters);
    return m.finish(0);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return m.finish(1, e.what());
  }
}

int run_render(const RenderOptions& opts, std::ostream& out, std::ostream& manifest_sink) {
  RunManifest m("render", manifest_sink);
  m.inputs() = {{"scenes_dir", opts.scenes_dir.string()}};
  if (opts.verdicts_path) m.inputs()["verdicts"] = opts.verdicts_path->string();
  m.outputs() = {{"out_dir", opts.out_dir.string()}};
  try {
    const ClassMap classes = ClassMap::parse(opts.classes);
    std::optional<std::map<std::string, std::vector<ThreatVerdict>>> given;
    ThreatConfig cfg;
    if (opts.verdicts_path) {
      given = verdicts_from_jsonl(read_text_file(*opts.verdicts_path));
    } else {
      cfg = load_threat_config(opts.config_path, opts.overrides);
      m.config() = text_config_json(cfg.to_text());
    }
    auto bundle = load_bundle(opts.scenes_dir, classes, false, m);
    int written = 0;
    for (const auto& s : bundle.samples) {
      try {
        std::vector<ThreatVerdict> verdicts;
        if (given) {
          if (auto it = given->find(s.scene.image_id); it != given->end()) verdicts = it->second;
        } else {
          verdicts = classify_scene(s.scene, cfg);
        }
        write_text_file(opts.out_dir / (s.scene.image_id + ".svg"), render_overlay(s.scene, verdicts));
        ++written;
      } catch (const std::exception& e) {
        m.fail_item(s.scene.image_id, e.what());
      }
    }
    m.counts() = {{"scenes", bundle.samples.size()}, {"svg_files", written}};
    return m.finish(0);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return m.finish(1, e.what());
  }
}

}  // namespace gunpose::cli
