// Copyright 2026 The lanetopo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "lanetopo/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "lanetopo/errors.hpp"
#include "lanetopo/rng.hpp"

namespace lanetopo::synthgen {

using geometry::Box2;
using geometry::ControlPolygon;
using geometry::Point3;

namespace {

enum Stream : std::uint64_t { kSceneStream = 1, kCorruptStream = 2 };

constexpr double kForkSpread = 0.35;      // radians between fork branches and the parent heading
constexpr double kMaxBend = 0.3;          // radians of heading change along one lane
constexpr double kInteriorJitter = 0.25;  // meters

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng);
}

struct LaneShape {
  ControlPolygon ctrl;
  double end_heading = 0.0;
};

// Control points on a gentle arc leaving `start` along `heading`. The first
// control point is `start` itself, bit for bit.
LaneShape make_lane(const Point3& start, double heading, std::size_t m, double length, Rng& rng) {
  const double bend = uniform(rng, -kMaxBend, kMaxBend);
  const double slope = uniform(rng, -0.02, 0.02);
  const double chord_heading = heading + 0.5 * bend;
  const double cx = std::cos(chord_heading);
  const double cy = std::sin(chord_heading);
  const double bow = -length * bend / 8.0;

  LaneShape shape;
  shape.ctrl.points.reserve(m);
  shape.ctrl.points.push_back(start);
  for (std::size_t k = 1; k < m; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(m - 1);
    double lateral = bow * 4.0 * s * (1.0 - s);
    if (k + 1 < m) lateral += uniform(rng, -kInteriorJitter, kInteriorJitter);
    shape.ctrl.points.push_back({start.x + s * length * cx - lateral * cy,
                                 start.y + s * length * cy + lateral * cx,
                                 start.z + s * length * slope});
  }
  shape.end_heading = heading + bend;
  return shape;
}

// Box whose centre is a plan-view projection of `anchor`: image x follows
// world x and image y runs against world y.
Box2 box_for_anchor(const Point3& anchor, double map_extent, Rng& rng) {
  const double span = 2.0 * map_extent;
  const double w = uniform(rng, 24.0, 72.0);
  const double h = uniform(rng, 24.0, 72.0);
  double cx = 0.5 * kImageWidth * (1.0 + anchor.x / span) + uniform(rng, -10.0, 10.0);
  double cy = 0.5 * kImageHeight * (1.0 - anchor.y / span) + uniform(rng, -10.0, 10.0);
  cx = std::clamp(cx, 0.5 * w + 1.0, kImageWidth - 0.5 * w - 1.0);
  cy = std::clamp(cy, 0.5 * h + 1.0, kImageHeight - 0.5 * h - 1.0);
  return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

int sample_category(const GeneratorConfig& cfg, Rng& rng) {
  std::discrete_distribution<int> dist(cfg.category_weights.begin(), cfg.category_weights.end());
  return dist(rng);
}

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0,1]");
}

std::string scene_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%06zu", index);
  return buf;
}

}  // namespace

void validate(const GeneratorConfig& cfg) {
  check_prob(cfg.branch_prob, "branch_prob");
  check_prob(cfg.lt_assoc_prob, "lt_assoc_prob");
  if (cfg.lanes_min < 1 || cfg.lanes_max < cfg.lanes_min) {
    throw ConfigError("lanes_per_scene range must satisfy 1 <= min <= max");
  }
  if (cfg.traffic_min < 0 || cfg.traffic_max < cfg.traffic_min) {
    throw ConfigError("traffic_per_scene range must satisfy 0 <= min <= max");
  }
  if (!(cfg.map_extent > 0.0)) throw ConfigError("map_extent must be > 0");
  if (cfg.max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (cfg.control_points < 2) throw ConfigError("control_points must be >= 2");
  if (!(cfg.lane_length_min > 0.0) || cfg.lane_length_max < cfg.lane_length_min) {
    throw ConfigError("lane length range must satisfy 0 < min <= max");
  }
  const double total = std::accumulate(cfg.category_weights.begin(), cfg.category_weights.end(), 0.0);
  for (double w : cfg.category_weights) {
    if (!(w >= 0.0)) throw ConfigError("category weights must be >= 0");
  }
  if (!(total > 0.0)) throw ConfigError("category weights must not all be zero");
}

void validate(const NoiseModel& noise) {
  check_prob(noise.drop_prob, "drop_prob");
  check_prob(noise.confusion_prob, "confusion_prob");
  if (!(noise.ctrl_sigma >= 0.0)) throw ConfigError("ctrl_sigma must be >= 0");
  if (!(noise.box_sigma >= 0.0)) throw ConfigError("box_sigma must be >= 0");
  if (!(noise.spurious_rate >= 0.0)) throw ConfigError("spurious_rate must be >= 0");
  if (!(noise.conf_noise >= 0.0)) throw ConfigError("conf_noise must be >= 0");
  if (!(noise.map_extent > 0.0)) throw ConfigError("map_extent must be > 0");
}

SceneRecord generate_scene(const GeneratorConfig& cfg, std::size_t scene_index) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, {kSceneStream, scene_index}));
  SceneRecord scene;
  scene.scene_id = scene_name(scene_index);

  struct OpenEnd {
    int lane;
    int depth;
    double heading;
  };
  const int target = uniform_int(rng, cfg.lanes_min, cfg.lanes_max);
  std::vector<int> parent;  // -1 for chain roots
  std::deque<OpenEnd> frontier;
  const double extent = cfg.map_extent;

  auto add_lane = [&](const Point3& start, double heading, int parent_lane, int depth) {
    const double length = uniform(rng, cfg.lane_length_min, cfg.lane_length_max);
    LaneShape shape = make_lane(start, heading, cfg.control_points, length, rng);
    const int id = static_cast<int>(scene.lanes.size());
    scene.lanes.push_back({id, std::move(shape.ctrl), 0});
    parent.push_back(parent_lane);
    if (parent_lane >= 0) scene.topo_ll.emplace_back(parent_lane, id);
    frontier.push_back({id, depth, shape.end_heading});
  };

  while (static_cast<int>(scene.lanes.size()) < target) {
    if (frontier.empty()) {
      const Point3 start{uniform(rng, -0.8 * extent, 0.8 * extent),
                         uniform(rng, -0.8 * extent, 0.8 * extent), 0.0};
      add_lane(start, uniform(rng, -std::numbers::pi, std::numbers::pi), -1, 1);
      continue;
    }
    const OpenEnd open = frontier.front();
    frontier.pop_front();
    if (open.depth >= cfg.max_depth) continue;
    const bool fork = bernoulli(rng, cfg.branch_prob);
    const int remaining = target - static_cast<int>(scene.lanes.size());
    // A fork that does not fit the lane budget leaves the lane terminal.
    if (fork && remaining < 2) continue;
    const Point3 end = scene.lanes[static_cast<std::size_t>(open.lane)].ctrl.back();
    if (fork) {
      add_lane(end, open.heading + kForkSpread, open.lane, open.depth + 1);
      add_lane(end, open.heading - kForkSpread, open.lane, open.depth + 1);
    } else {
      add_lane(end, open.heading + uniform(rng, -0.1, 0.1), open.lane, open.depth + 1);
    }
  }

  // Each traffic element is spawned beside one lane and may also govern that
  // lane's fork siblings.
  const int traffic_count = uniform_int(rng, cfg.traffic_min, cfg.traffic_max);
  const int lane_count = static_cast<int>(scene.lanes.size());
  for (int k = 0; k < traffic_count; ++k) {
    const int lane = uniform_int(rng, 0, lane_count - 1);
    dataio::TrafficElement te;
    te.id = k;
    te.category = sample_category(cfg, rng);
    te.box = box_for_anchor(scene.lanes[static_cast<std::size_t>(lane)].ctrl.back(), extent, rng);
    te.confidence = 1.0;
    scene.traffic.push_back(te);
    scene.topo_lt.emplace_back(lane, k);
    const int p = parent[static_cast<std::size_t>(lane)];
    if (p < 0) continue;
    for (int other = 0; other < lane_count; ++other) {
      if (other == lane || parent[static_cast<std::size_t>(other)] != p) continue;
      if (bernoulli(rng, cfg.lt_assoc_prob)) scene.topo_lt.emplace_back(other, k);
    }
  }
  return scene;
}

std::vector<SceneRecord> generate_scenes(const GeneratorConfig& cfg) {
  std::vector<SceneRecord> scenes;
  scenes.reserve(cfg.scenes);
  for (std::size_t i = 0; i < cfg.scenes; ++i) scenes.push_back(generate_scene(cfg, i));
  return scenes;
}

DetectionRecord corrupt_scene(const SceneRecord& scene, const NoiseModel& noise,
                              std::uint64_t seed) {
  validate(noise);
  Rng rng(seed);
  DetectionRecord det;
  det.scene_id = scene.scene_id;

  auto confidence = [&]() {
    if (noise.conf_noise == 0.0) return 1.0;
    return std::clamp(1.0 - noise.conf_noise * uniform(rng, 0.0, 1.0), 0.0, 1.0);
  };
  auto jitter = [&](double sigma) {
    if (sigma == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(rng);
  };
  auto spurious_count = [&]() -> int {
    if (noise.spurious_rate == 0.0) return 0;
    return std::poisson_distribution<int>(noise.spurious_rate)(rng);
  };

  for (const auto& lane : scene.lanes) {
    if (bernoulli(rng, noise.drop_prob)) continue;
    dataio::PredLane pred;
    pred.ctrl = lane.ctrl;
    for (auto& p : pred.ctrl.points) {
      p.x += jitter(noise.ctrl_sigma);
      p.y += jitter(noise.ctrl_sigma);
      p.z += jitter(noise.ctrl_sigma);
    }
    pred.class_score = confidence();
    det.lanes.push_back(std::move(pred));
  }
  const std::size_t m = scene.lanes.empty() ? geometry::kDefaultControlPoints
                                            : scene.lanes.front().ctrl.size();
  const int false_lanes = spurious_count();
  for (int s = 0; s < false_lanes; ++s) {
    const double e = noise.map_extent;
    const Point3 start{uniform(rng, -e, e), uniform(rng, -e, e), 0.0};
    LaneShape shape = make_lane(start, uniform(rng, -std::numbers::pi, std::numbers::pi), m,
                                uniform(rng, 3.0, 8.0), rng);
    det.lanes.push_back({std::move(shape.ctrl), uniform(rng, 0.0, 0.3), std::nullopt});
  }

  int next_id = 0;
  for (const auto& te : scene.traffic) next_id = std::max(next_id, te.id + 1);
  for (const auto& te : scene.traffic) {
    if (bernoulli(rng, noise.drop_prob)) continue;
    dataio::TrafficElement out = te;
    if (noise.box_sigma > 0.0) {
      out.box.x1 += jitter(noise.box_sigma);
      out.box.y1 += jitter(noise.box_sigma);
      out.box.x2 += jitter(noise.box_sigma);
      out.box.y2 += jitter(noise.box_sigma);
      if (out.box.x2 < out.box.x1 + 1.0) out.box.x2 = out.box.x1 + 1.0;
      if (out.box.y2 < out.box.y1 + 1.0) out.box.y2 = out.box.y1 + 1.0;
    }
    if (bernoulli(rng, noise.confusion_prob)) {
      const int shift = uniform_int(rng, 1, dataio::kTrafficCategoryCount - 1);
      out.category = (te.category + shift) % dataio::kTrafficCategoryCount;
    }
    out.confidence = confidence();
    det.traffic.push_back(out);
  }
  const int false_boxes = spurious_count();
  for (int s = 0; s < false_boxes; ++s) {
    dataio::TrafficElement out;
    out.id = next_id++;
    const double w = uniform(rng, 20.0, 80.0);
    const double h = uniform(rng, 20.0, 80.0);
    const double x1 = uniform(rng, 0.0, kImageWidth - w);
    const double y1 = uniform(rng, 0.0, kImageHeight - h);
    out.box = {x1, y1, x1 + w, y1 + h};
    out.category = uniform_int(rng, 0, dataio::kTrafficCategoryCount - 1);
    out.confidence = uniform(rng, 0.0, 0.3);
    det.traffic.push_back(out);
  }
  return det;
}

std::vector<DetectionRecord> corrupt_scenes(const std::vector<SceneRecord>& scenes,
                                            const NoiseModel& noise, std::uint64_t seed) {
  std::vector<DetectionRecord> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    out.push_back(corrupt_scene(scenes[i], noise, derive_seed(seed, {kCorruptStream, i})));
  }
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t total, const std::vector<double>& fractions) {
  if (fractions.size() != 3) {
    throw ConfigError("split needs exactly three fractions (train,val,test) summing to 1");
  }
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw ConfigError("split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
  const auto train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(total)));
  const auto val = std::min(total - std::min(train, total),
                            static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(total))));
  const std::size_t clamped_train = std::min(train, total);
  return {clamped_train, val, total - clamped_train - val};
}

std::vector<SplitFiles> generate_dataset(const GeneratorConfig& cfg, const NoiseModel& noise,
                                         const std::vector<double>& fractions,
                                         const std::string& out_dir) {
  validate(cfg);
  validate(noise);
  const auto sizes = split_sizes(cfg.scenes, fractions);
  std::filesystem::create_directories(out_dir);

  const std::array<const char*, 3> names = {"train", "val", "test"};
  std::vector<SplitFiles> out;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<SceneRecord> scenes;
    std::vector<DetectionRecord> dets;
    for (std::size_t i = begin; i < begin + sizes[s]; ++i) {
      scenes.push_back(generate_scene(cfg, i));
      dets.push_back(corrupt_scene(scenes.back(), noise, derive_seed(cfg.seed, {kCorruptStream, i})));
    }
    begin += sizes[s];
    SplitFiles files;
    files.name = names[s];
    files.scenes_path = (std::filesystem::path(out_dir) / (files.name + ".scenes.jsonl")).string();
    files.detections_path = (std::filesystem::path(out_dir) / (files.name + ".dets.jsonl")).string();
    files.count = scenes.size();
    dataio::save_scenes(files.scenes_path, scenes);
    dataio::save_detections(files.detections_path, dets);
    out.push_back(std::move(files));
  }
  return out;
}

}  // namespace lanetopo::synthgen
