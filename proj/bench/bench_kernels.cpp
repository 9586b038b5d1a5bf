// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "gunpose/augment.hpp"
#include "gunpose/eval.hpp"
#include "gunpose/threat.hpp"

using namespace gunpose;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 r(2026);
  return r;
}

double u(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

BBox box(int cls) {
  const double w = u(0.02, 0.3), h = u(0.02, 0.3);
  return {cls, u(w / 2, 1 - w / 2), u(h / 2, 1 - h / 2), w, h, u(0.05, 1.0)};
}

const std::vector<Scene>& scenes() {
  static const std::vector<Scene> s = [] {
    std::vector<Scene> out(4000);
    for (auto& sc : out) {
      for (int g = 0; g < 3; ++g) sc.guns.push_back(box(kGunClass));
      for (int p = 0; p < 3; ++p) {
        Pose pose;
        for (int i = 0; i < kNumPoseLandmarks; ++i) pose.landmarks.push_back({i, u(0, 1), u(0, 1), u(0, 1)});
        sc.poses.push_back(std::move(pose));
      }
    }
    return out;
  }();
  return s;
}

ThreatConfig all_rules() {
  ThreatConfig cfg;
  cfg.enabled_rules = {Rule::kProximity, Rule::kOverlap, Rule::kAim, Rule::kZone};
  return cfg;
}

const Raster& image() {
  static const Raster r = [] {
    Raster out(1280, 720);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& px : out.pixels()) px = {std::uint8_t(byte(rng())), std::uint8_t(byte(rng())), std::uint8_t(byte(rng()))};
    return out;
  }();
  return r;
}

const std::vector<ImageDetections>& detections() {
  static const std::vector<ImageDetections> d = [] {
    std::vector<ImageDetections> out(2000);
    for (auto& img : out) {
      for (int g = 0; g < 8; ++g) img.ground_truth.push_back(box(g % 2));
      for (const auto& g : img.ground_truth) {
        BBox p = g;
        p.cx += u(-0.03, 0.03);
        p.confidence = u(0, 1);
        img.predictions.push_back(p);
      }
      for (int f = 0; f < 8; ++f) img.predictions.push_back(box(f % 2));
    }
    return out;
  }();
  return d;
}

void BM_classify_serial(benchmark::State& st) {
  scenes();
  const auto cfg = all_rules();
  for (auto _ : st) benchmark::DoNotOptimize(classify_batch_serial(scenes(), cfg));
  st.SetItemsProcessed(st.iterations() * scenes().size());
}

void BM_classify_parallel(benchmark::State& st) {
  scenes();
  const auto cfg = all_rules();
  for (auto _ : st) benchmark::DoNotOptimize(classify_batch(scenes(), cfg, static_cast<int>(st.range(0))));
  st.SetItemsProcessed(st.iterations() * scenes().size());
}

void BM_hsv_serial(benchmark::State& st) {
  image();
  for (auto _ : st) benchmark::DoNotOptimize(hsv_adjust_serial(image(), 0.1, 1.3, 0.8));
  st.SetItemsProcessed(st.iterations() * image().pixels().size());
}

void BM_hsv_parallel(benchmark::State& st) {
  image();
  for (auto _ : st) benchmark::DoNotOptimize(hsv_adjust(image(), 0.1, 1.3, 0.8, static_cast<int>(st.range(0))));
  st.SetItemsProcessed(st.iterations() * image().pixels().size());
}

void BM_rotate_serial(benchmark::State& st) {
  image();
  for (auto _ : st) benchmark::DoNotOptimize(rotate_raster_serial(image(), 17.0));
  st.SetItemsProcessed(st.iterations() * image().pixels().size());
}

void BM_rotate_parallel(benchmark::State& st) {
  image();
  for (auto _ : st) benchmark::DoNotOptimize(rotate_raster(image(), 17.0, static_cast<int>(st.range(0))));
  st.SetItemsProcessed(st.iterations() * image().pixels().size());
}

void BM_confusion_serial(benchmark::State& st) {
  detections();
  for (auto _ : st) benchmark::DoNotOptimize(confusion_report_serial(detections(), 0.25, 0.5));
  st.SetItemsProcessed(st.iterations() * detections().size());
}

void BM_confusion_parallel(benchmark::State& st) {
  detections();
  for (auto _ : st)
    benchmark::DoNotOptimize(confusion_report(detections(), 0.25, 0.5, static_cast<int>(st.range(0))));
  st.SetItemsProcessed(st.iterations() * detections().size());
}

}  // namespace

BENCHMARK(BM_classify_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_classify_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_hsv_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_hsv_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rotate_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rotate_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_confusion_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_confusion_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
