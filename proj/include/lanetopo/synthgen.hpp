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
#ifndef LANETOPO_SYNTHGEN_HPP_
#define LANETOPO_SYNTHGEN_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lanetopo/dataio.hpp"

namespace lanetopo::synthgen {

using dataio::DetectionRecord;
using dataio::SceneRecord;

// Virtual front-camera image the traffic boxes live in.
inline constexpr double kImageWidth = 2048.0;
inline constexpr double kImageHeight = 1550.0;

struct GeneratorConfig {
  std::size_t scenes = 100;
  int lanes_min = 12;
  int lanes_max = 24;
  double map_extent = 30.0;  // half-width of the square map, meters
  double branch_prob = 0.3;
  int max_depth = 3;  // lanes along one chain, root included
  int traffic_min = 8;
  int traffic_max = 16;
  double lt_assoc_prob = 0.5;
  std::size_t control_points = 4;
  double lane_length_min = 8.0;
  double lane_length_max = 16.0;
  // Relative frequency of each of the 13 traffic categories. Defaults follow
  // the skew of real data: unknown lights dominate, yellow lights are rare
  // and the nine sign types share a fifth of all annotations.
  std::array<double, dataio::kTrafficCategoryCount> category_weights = {
      0.45, 0.15, 0.17, 0.03, 0.05, 0.04, 0.03, 0.02, 0.015, 0.015, 0.01, 0.01, 0.01};
  std::uint64_t seed = 0;
};

struct NoiseModel {
  double ctrl_sigma = 0.0;  // meters, per control-point coordinate
  double box_sigma = 0.0;   // pixels, per box coordinate
  double drop_prob = 0.0;
  double spurious_rate = 0.0;  // expected false lanes and false boxes per scene
  double confusion_prob = 0.0;
  double conf_noise = 0.0;
  double map_extent = 30.0;  // where spurious lanes are drawn
};

// Throw ConfigError on out-of-range fields.
void validate(const GeneratorConfig& cfg);
void validate(const NoiseModel& noise);

SceneRecord generate_scene(const GeneratorConfig& cfg, std::size_t scene_index);
std::vector<SceneRecord> generate_scenes(const GeneratorConfig& cfg);

DetectionRecord corrupt_scene(const SceneRecord& scene, const NoiseModel& noise,
                              std::uint64_t seed);
// Scene i is corrupted with a seed derived from (seed, i).
std::vector<DetectionRecord> corrupt_scenes(const std::vector<SceneRecord>& scenes,
                                            const NoiseModel& noise, std::uint64_t seed);

struct SplitFiles {
  std::string name;
  std::string scenes_path;
  std::string detections_path;
  std::size_t count = 0;
};

// Scene counts per split for `total` scenes. Throws ConfigError unless there
// are exactly three positive fractions summing to 1.
std::array<std::size_t, 3> split_sizes(std::size_t total, const std::vector<double>& fractions);

// Writes {train,val,test}.scenes.jsonl and {train,val,test}.dets.jsonl into
// `out_dir`. Splits are contiguous, disjoint scene-index ranges; detections
// use noise seed cfg.seed.
std::vector<SplitFiles> generate_dataset(const GeneratorConfig& cfg, const NoiseModel& noise,
                                         const std::vector<double>& fractions,
                                         const std::string& out_dir);

}  // namespace lanetopo::synthgen

#endif  // LANETOPO_SYNTHGEN_HPP_
