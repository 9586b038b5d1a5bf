// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/threat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gunpose/error.hpp"
#include "gunpose/kvconfig.hpp"
#include "gunpose/parallel.hpp"
#include "json.hpp"

namespace gunpose {

using ojson = nlohmann::ordered_json;

std::string_view rule_name(Rule rule) noexcept {
  switch (rule) {
    case Rule::kProximity: return "proximity";
    case Rule::kOverlap: return "overlap";
    case Rule::kAim: return "aim";
    case Rule::kZone: return "zone";
  }
  return "?";
}

std::optional<Rule> rule_from_name(std::string_view name) noexcept {
  for (Rule r : kAllRules)
    if (rule_name(r) == name) return r;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ThreatConfig

bool ThreatConfig::enabled(Rule rule) const noexcept {
  return std::find(enabled_rules.begin(), enabled_rules.end(), rule) != enabled_rules.end();
}

void ThreatConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError(fmt::format("alpha must be > 0 (got {})", alpha));
  if (!in_unit(gun_conf_min)) throw ConfigError(fmt::format("gun_conf_min must be in [0,1] (got {})", gun_conf_min));
  if (!in_unit(visibility_min))
    throw ConfigError(fmt::format("visibility_min must be in [0,1] (got {})", visibility_min));
  if (!(aim_angle_max_deg >= 0.0 && aim_angle_max_deg <= 180.0))
    throw ConfigError(fmt::format("aim_angle_max_deg must be in [0,180] (got {})", aim_angle_max_deg));
  if (!(head_radius_factor >= 0.0) || !std::isfinite(head_radius_factor))
    throw ConfigError(fmt::format("head_radius_factor must be >= 0 (got {})", head_radius_factor));
  if (enabled_rules.empty()) throw ConfigError("enabled_rules must not be empty");
  for (size_t i = 0; i < enabled_rules.size(); ++i)
    for (size_t j = i + 1; j < enabled_rules.size(); ++j)
      if (enabled_rules[i] == enabled_rules[j])
        throw ConfigError(fmt::format("rule '{}' enabled twice", rule_name(enabled_rules[i])));
}

void ThreatConfig::set(std::string_view key, std::string_view value) {
  if (key == "alpha") {
    alpha = parse_double_value(key, value);
  } else if (key == "gun_conf_min") {
    gun_conf_min = parse_double_value(key, value);
  } else if (key == "visibility_min") {
    visibility_min = parse_double_value(key, value);
  } else if (key == "aim_angle_max_deg") {
    aim_angle_max_deg = parse_double_value(key, value);
  } else if (key == "head_radius_factor") {
    head_radius_factor = parse_double_value(key, value);
  } else if (key == "combinator") {
    if (value == "any" || value == "ANY")
      combinator = Combinator::kAny;
    else if (value == "all" || value == "ALL")
      combinator = Combinator::kAll;
    else
      throw ConfigError(fmt::format("combinator: expected any|all, got '{}'", value));
  } else if (key == "enabled_rules") {
    std::vector<Rule> rules;
    size_t start = 0;
    while (start <= value.size()) {
      size_t end = value.find(',', start);
      if (end == std::string_view::npos) end = value.size();
      std::string_view item = value.substr(start, end - start);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      if (!item.empty()) {
        auto r = rule_from_name(item);
        if (!r) throw ConfigError(fmt::format("enabled_rules: unknown rule '{}'", item));
        rules.push_back(*r);
      }
      start = end + 1;
    }
    enabled_rules = std::move(rules);
  } else if (key == "size_mode") {
    if (value == "width")
      size_mode = SizeMode::kWidth;
    else if (value == "max_side")
      size_mode = SizeMode::kMaxSide;
    else
      throw ConfigError(fmt::format("size_mode: expected width|max_side, got '{}'", value));
  } else if (key == "aspect_correct") {
    aspect_correct = parse_bool_value(key, value);
  } else {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
}

ThreatConfig ThreatConfig::parse(std::string_view text) {
  ThreatConfig cfg;
  for (const auto& kv : parse_key_values(text)) {
    try {
      cfg.set(kv.key, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", kv.line, e.what()));
    }
  }
  cfg.validate();
  return cfg;
}

std::string ThreatConfig::to_text() const {
  std::string rules;
  for (Rule r : enabled_rules) {
    if (!rules.empty()) rules += ",";
    rules += rule_name(r);
  }
  return fmt::format(
      "alpha = {}\ngun_conf_min = {}\nvisibility_min = {}\naim_angle_max_deg = {}\n"
      "head_radius_factor = {}\ncombinator = {}\nenabled_rules = {}\nsize_mode = {}\n"
      "aspect_correct = {}\n",
      alpha, gun_conf_min, visibility_min, aim_angle_max_deg, head_radius_factor,
      combinator == Combinator::kAny ? "any" : "all", rules,
      size_mode == SizeMode::kWidth ? "width" : "max_side", aspect_correct ? "true" : "false");
}

// ---------------------------------------------------------------------------
// Rules

namespace {

constexpr double kMinVectorNorm = 1e-9;

Point scaled(const Landmark& lm, double ys) { return {lm.x, lm.y * ys}; }

BBox scaled(BBox b, double ys) {
  b.cy *= ys;
  b.h *= ys;
  return b;
}

// Landmark at or above the visibility floor, else null.
const Landmark* visible(const Pose& pose, int index, const ThreatConfig& cfg) {
  const Landmark* lm = pose.find(index);
  return lm && lm->visibility >= cfg.visibility_min ? lm : nullptr;
}

double y_scale_for(const Scene& scene, const ThreatConfig& cfg) {
  return cfg.aspect_correct ? static_cast<double>(scene.height_px) / scene.width_px : 1.0;
}

std::vector<HandPoint> hand_points_scaled(const Pose& pose, const ThreatConfig& cfg, double ys) {
  std::vector<HandPoint> out;
  for (const auto& lm : pose.landmarks) {
    if (lm.visibility < cfg.visibility_min) continue;
    if (std::find(std::begin(landmark::kHandSet), std::end(landmark::kHandSet), lm.index) ==
        std::end(landmark::kHandSet))
      continue;
    out.push_back({lm.index, scaled(lm, ys)});
  }
  return out;
}

}  // namespace

std::vector<HandPoint> hand_points(const Pose& pose, const ThreatConfig& cfg) {
  return hand_points_scaled(pose, cfg, 1.0);
}

std::vector<GunAssignment> associate(const Scene& scene, const ThreatConfig& cfg) {
  const double ys = y_scale_for(scene, cfg);
  std::vector<std::vector<HandPoint>> hands;
  hands.reserve(scene.poses.size());
  for (const auto& pose : scene.poses) hands.push_back(hand_points_scaled(pose, cfg, ys));

  std::vector<GunAssignment> out;
  for (size_t g = 0; g < scene.guns.size(); ++g) {
    const BBox& gun = scene.guns[g];
    if (gun.confidence < cfg.gun_conf_min) continue;
    const Point c = center(scaled(gun, ys));
    GunAssignment a{static_cast<int>(g), std::nullopt};
    double best = std::numeric_limits<double>::infinity();
    for (size_t p = 0; p < hands.size(); ++p) {
      for (const auto& hp : hands[p]) {
        const double d = euclidean(hp.point, c);
        if (d < best) {
          best = d;
          a.pose_index = static_cast<int>(p);
        }
      }
    }
    out.push_back(a);
  }
  return out;
}

RuleResult rule_proximity(const BBox& gun, const Pose& pose, const ThreatConfig& cfg, double ys) {
  RuleResult r{Rule::kProximity, false, {}, {}};
  const BBox g = scaled(gun, ys);
  const double threshold = dynamic_threshold(g, cfg.alpha, cfg.size_mode);
  r.evidence["threshold"] = threshold;
  const auto hands = hand_points_scaled(pose, cfg, ys);
  if (hands.empty()) return r;
  const Point c = center(g);
  double best = std::numeric_limits<double>::infinity();
  int argmin = -1;
  for (const auto& hp : hands) {
    const double d = euclidean(hp.point, c);
    if (d < best) {
      best = d;
      argmin = hp.index;
    }
  }
  r.evidence["distance"] = best;
  r.evidence["landmark"] = argmin;
  r.landmarks_used = {argmin};
  r.fired = best < threshold;
  return r;
}

RuleResult rule_overlap(const BBox& gun, const Pose& pose, const ThreatConfig& cfg, double ys) {
  RuleResult r{Rule::kOverlap, false, {}, {}};
  const BBox g = scaled(gun, ys);
  for (const auto& hp : hand_points_scaled(pose, cfg, ys))
    if (point_in_box(hp.point, g)) r.landmarks_used.push_back(hp.index);
  r.evidence["inside_count"] = static_cast<double>(r.landmarks_used.size());
  r.fired = !r.landmarks_used.empty();
  return r;
}

RuleResult rule_aim(const BBox& gun, const Pose& pose, const ThreatConfig& cfg, double ys) {
  RuleResult r{Rule::kAim, false, {}, {}};
  const Point target = center(scaled(gun, ys));
  struct Side {
    const char* name;
    int elbow;
    int wrist;
  };
  static constexpr Side kSides[] = {{"left", landmark::kLeftElbow, landmark::kLeftWrist},
                                    {"right", landmark::kRightElbow, landmark::kRightWrist}};
  double best = std::numeric_limits<double>::infinity();
  for (const Side& side : kSides) {
    const Landmark* elbow = visible(pose, side.elbow, cfg);
    const Landmark* wrist = visible(pose, side.wrist, cfg);
    if (!elbow || !wrist) continue;
    const Point e = scaled(*elbow, ys);
    const Vector forearm = scaled(*wrist, ys) - e;
    const Vector to_gun = target - e;
    if (forearm.norm() <= kMinVectorNorm || to_gun.norm() <= kMinVectorNorm) {
      r.evidence[fmt::format("{}_degenerate", side.name)] = 1.0;
      continue;
    }
    const double angle = angle_deg(forearm, to_gun);
    r.evidence[fmt::format("{}_angle_deg", side.name)] = angle;
    if (angle < best) {
      best = angle;
      r.landmarks_used = {side.elbow, side.wrist};
    }
  }
  if (std::isfinite(best)) {
    r.evidence["angle_deg"] = best;
    r.evidence["angle_max_deg"] = cfg.aim_angle_max_deg;
    r.fired = best <= cfg.aim_angle_max_deg;
  }
  return r;
}

RuleResult rule_zone(const BBox& gun, const Pose& pose, const ThreatConfig& cfg, double ys) {
  RuleResult r{Rule::kZone, false, {}, {}};
  const Point c = center(scaled(gun, ys));
  const Landmark* ls = visible(pose, landmark::kLeftShoulder, cfg);
  const Landmark* rs = visible(pose, landmark::kRightShoulder, cfg);
  const Landmark* lh = visible(pose, landmark::kLeftHip, cfg);
  const Landmark* rh = visible(pose, landmark::kRightHip, cfg);
  const Landmark* nose = visible(pose, landmark::kNose, cfg);

  if (ls && rs && lh && rh) {
    const Point quad[] = {scaled(*ls, ys), scaled(*rs, ys), scaled(*rh, ys), scaled(*lh, ys)};
    bool inside = false;
    try {
      inside = point_in_polygon(c, quad);
      r.evidence["torso_available"] = 1.0;
    } catch (const GeometryError&) {
      r.evidence["torso_degenerate"] = 1.0;
    }
    if (inside) {
      r.evidence["in_torso"] = 1.0;
      r.landmarks_used.insert(r.landmarks_used.end(), {landmark::kLeftShoulder, landmark::kRightShoulder,
                                                       landmark::kRightHip, landmark::kLeftHip});
      r.fired = true;
    }
  }
  if (nose && ls && rs) {
    const Point n = scaled(*nose, ys);
    const Point a = scaled(*ls, ys), b = scaled(*rs, ys);
    const Point mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
    const double radius = cfg.head_radius_factor * euclidean(n, mid);
    r.evidence["head_available"] = 1.0;
    r.evidence["head_radius"] = radius;
    if (euclidean(c, n) <= radius) {
      r.evidence["in_head"] = 1.0;
      r.landmarks_used.insert(r.landmarks_used.end(),
                              {landmark::kNose, landmark::kLeftShoulder, landmark::kRightShoulder});
      r.fired = true;
    }
  }
  return r;
}

std::vector<ThreatVerdict> classify_scene(const Scene& scene, const ThreatConfig& cfg) {
  cfg.validate();
  const double ys = y_scale_for(scene, cfg);
  std::vector<ThreatVerdict> out;
  for (const auto& a : associate(scene, cfg)) {
    ThreatVerdict v;
    v.gun_index = a.gun_index;
    v.person_index = a.pose_index;
    const BBox& gun = scene.guns[a.gun_index];
    for (Rule rule : kAllRules) {
      if (!cfg.enabled(rule)) continue;
      if (!a.pose_index) {
        v.rules.push_back(RuleResult{rule, false, {}, {}});
        continue;
      }
      const Pose& pose = scene.poses[*a.pose_index];
      switch (rule) {
        case Rule::kProximity: v.rules.push_back(rule_proximity(gun, pose, cfg, ys)); break;
        case Rule::kOverlap: v.rules.push_back(rule_overlap(gun, pose, cfg, ys)); break;
        case Rule::kAim: v.rules.push_back(rule_aim(gun, pose, cfg, ys)); break;
        case Rule::kZone: v.rules.push_back(rule_zone(gun, pose, cfg, ys)); break;
      }
    }
    auto fired = [](const RuleResult& r) { return r.fired; };
    v.threat = cfg.combinator == Combinator::kAny ? std::any_of(v.rules.begin(), v.rules.end(), fired)
                                                  : std::all_of(v.rules.begin(), v.rules.end(), fired);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<ThreatVerdict>> classify_batch_serial(std::span<const Scene> scenes,
                                                              const ThreatConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<ThreatVerdict>> out;
  out.reserve(scenes.size());
  for (const auto& s : scenes) out.push_back(classify_scene(s, cfg));
  return out;
}

std::vector<std::vector<ThreatVerdict>> classify_batch(std::span<const Scene> scenes,
                                                       const ThreatConfig& cfg, int workers) {
  cfg.validate();
  std::vector<std::vector<ThreatVerdict>> out(scenes.size());
  parallel_for(static_cast<std::ptrdiff_t>(scenes.size()), workers,
               [&](std::ptrdiff_t i) { out[i] = classify_scene(scenes[i], cfg); });
  return out;
}

// ---------------------------------------------------------------------------
// JSON lines

std::string verdicts_to_jsonl(const std::string& image_id, std::span<const ThreatVerdict> verdicts) {
  std::string out;
  for (const auto& v : verdicts) {
    ojson rules = ojson::array();
    for (const auto& r : v.rules) {
      ojson evidence = ojson::object();
      for (const auto& [k, val] : r.evidence) evidence[k] = val;
      rules.push_back(ojson{{"rule", rule_name(r.rule)},
                            {"fired", r.fired},
                            {"evidence", std::move(evidence)},
                            {"landmarks_used", r.landmarks_used}});
    }
    ojson line{{"image_id", image_id},
               {"gun_index", v.gun_index},
               {"person_index", v.person_index ? ojson(*v.person_index) : ojson(nullptr)},
               {"threat", v.threat},
               {"rules", std::move(rules)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::map<std::string, std::vector<ThreatVerdict>> verdicts_from_jsonl(std::string_view text) {
  std::map<std::string, std::vector<ThreatVerdict>> out;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = ojson::parse(line.begin(), line.end());
      ThreatVerdict v;
      v.gun_index = j.at("gun_index").get<int>();
      if (!j.at("person_index").is_null()) v.person_index = j["person_index"].get<int>();
      v.threat = j.at("threat").get<bool>();
      for (const auto& rj : j.at("rules")) {
        RuleResult r;
        auto rule = rule_from_name(rj.at("rule").get<std::string>());
        if (!rule) throw ParseError("unknown rule name", line_no);
        r.rule = *rule;
        r.fired = rj.at("fired").get<bool>();
        for (const auto& [k, val] : rj.at("evidence").items()) r.evidence[k] = val.get<double>();
        r.landmarks_used = rj.at("landmarks_used").get<std::vector<int>>();
        v.rules.push_back(std::move(r));
      }
      out[j.at("image_id").get<std::string>()].push_back(std::move(v));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("verdicts line {}: {}", line_no, e.what()), line_no);
    }
  }
  return out;
}

}  // namespace gunpose
