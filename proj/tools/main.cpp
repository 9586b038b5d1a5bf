// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace gunpose::cli;

int main(int argc, char** argv) {
  CLI::App app{"Gun detection and pose threat-rule toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  ConvertOptions conv;
  auto* c = app.add_subcommand("convert", "VIA rectangle project to normalized YOLO labels");
  c->add_option("via_project", conv.via_project, "VIA project JSON")->required();
  c->add_option("images_dir", conv.images_dir, "directory holding the annotated images")->required();
  c->add_option("-o,--out", conv.out_labels_dir, "output labels directory")->required();
  c->add_option("--attribute", conv.attribute_key, "region attribute holding the class name");
  c->add_option("--classes", conv.classes, "comma separated class names, id order");
  c->add_flag("--auto-orient", conv.auto_orient, "apply JPEG EXIF orientation to the boxes");

  FuseOptions fuse;
  std::string fuse_config;
  auto* f = app.add_subcommand("fuse", "apply threat rules to a scene bundle");
  f->add_option("scenes_dir", fuse.scenes_dir, "bundle with labels/ and poses/")->required();
  f->add_option("-c,--config", fuse_config, "threat rule config file");
  f->add_option("--set", fuse.overrides, "config override key=value (repeatable)");
  f->add_option("-o,--out", fuse.out_verdicts, "verdict JSONL path, - for stdout")->default_val("-");
  std::string fuse_svg;
  f->add_option("--svg-dir", fuse_svg, "also write one overlay SVG per scene");
  f->add_option("--classes", fuse.classes, "comma separated class names, id order");
  f->add_option("-j,--workers", fuse.workers, "worker threads, 0 = all cores");

  EvaluateOptions ev;
  std::string ev_table, ev_confusion;
  auto* e = app.add_subcommand("evaluate", "detection metrics over matching label stems");
  e->add_option("pred_dir", ev.pred_dir, "prediction labels (6th column = confidence)")->required();
  e->add_option("gt_dir", ev.gt_dir, "ground-truth labels")->required();
  e->add_option("-o,--report", ev.report_path, "report JSON path")->required();
  e->add_option("--table", ev_table, "write the text table here instead of stdout");
  e->add_option("--confusion", ev_confusion, "per-image TP/FP/FN JSON path");
  e->add_option("--conf", ev.conf_threshold, "confidence threshold for P/R/F1 and confusion");
  e->add_option("--iou", ev.iou_min, "IoU threshold for confusion lists");
  e->add_option("--classes", ev.classes, "comma separated class names, id order");
  e->add_option("-j,--workers", ev.workers);

  AugmentOptions aug;
  std::string aug_spec;
  auto* a = app.add_subcommand("augment", "seeded geometric and colour augmentation of a bundle");
  a->add_option("scenes_dir", aug.scenes_dir)->required();
  a->add_option("-o,--out", aug.out_dir, "output bundle")->required();
  a->add_option("-s,--spec", aug_spec, "augmentation spec file");
  a->add_option("--set", aug.overrides, "spec override key=value (repeatable)");
  a->add_option("--classes", aug.classes);
  a->add_option("-j,--workers", aug.workers);

  RenderOptions ren;
  std::string ren_verdicts, ren_config;
  auto* r = app.add_subcommand("render", "SVG overlays of boxes, skeletons and threat labels");
  r->add_option("scenes_dir", ren.scenes_dir)->required();
  r->add_option("-o,--out", ren.out_dir, "SVG output directory")->required();
  r->add_option("--verdicts", ren_verdicts, "verdict JSONL; computed from the config when absent");
  r->add_option("-c,--config", ren_config);
  r->add_option("--set", ren.overrides);
  r->add_option("--classes", ren.classes);

  CLI11_PARSE(app, argc, argv);

  auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  if (*c) return run_convert(conv, std::cout, std::cerr);
  if (*f) {
    fuse.config_path = opt_path(fuse_config);
    fuse.svg_dir = opt_path(fuse_svg);
    return run_fuse(fuse, std::cout, std::cerr);
  }
  if (*e) {
    ev.table_path = opt_path(ev_table);
    ev.confusion_path = opt_path(ev_confusion);
    return run_evaluate(ev, std::cout, std::cerr);
  }
  if (*a) {
    aug.spec_path = opt_path(aug_spec);
    return run_augment(aug, std::cout, std::cerr);
  }
  ren.verdicts_path = opt_path(ren_verdicts);
  ren.config_path = opt_path(ren_config);
  return run_render(ren, std::cout, std::cerr);
}
