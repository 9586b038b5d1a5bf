// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gunpose::cli {

inline constexpr char kToolVersion[] = "0.1.0";

struct ConvertOptions {
  std::filesystem::path via_project;
  std::filesystem::path images_dir;
  std::filesystem::path out_labels_dir;
  std::string attribute_key = "label";
  std::string classes = "gun,person";
  bool auto_orient = false;
};

struct FuseOptions {
  std::filesystem::path scenes_dir;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> overrides;  ///< key=value
  std::filesystem::path out_verdicts;  ///< "-" for stdout
  std::optional<std::filesystem::path> svg_dir;
  std::string classes = "gun,person";
  int workers = 0;
};

struct EvaluateOptions {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  std::filesystem::path report_path;
  std::optional<std::filesystem::path> table_path;
  std::optional<std::filesystem::path> confusion_path;
  std::string classes = "gun,person";
  double conf_threshold = 0.25;
  double iou_min = 0.5;
  int workers = 0;
};

struct AugmentOptions {
  std::filesystem::path scenes_dir;
  std::optional<std::filesystem::path> spec_path;
  std::vector<std::string> overrides;
  std::filesystem::path out_dir;
  std::string classes = "gun,person";
  int workers = 0;
};

struct RenderOptions {
  std::filesystem::path scenes_dir;
  std::optional<std::filesystem::path> verdicts_path;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> overrides;
  std::filesystem::path out_dir;
  std::string classes = "gun,person";
};

// Each command writes its run manifest (one JSON object) to `manifest` and
// returns the process exit status: 0 unless a fatal error occurred.
// `out` receives human-readable output (summaries, tables, stdout verdicts).
int run_convert(const ConvertOptions& opts, std::ostream& out, std::ostream& manifest);
int run_fuse(const FuseOptions& opts, std::ostream& out, std::ostream& manifest);
int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& manifest);
int run_augment(const AugmentOptions& opts, std::ostream& out, std::ostream& manifest);
int run_render(const RenderOptions& opts, std::ostream& out, std::ostream& manifest);

}  // namespace gunpose::cli
