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
#ifndef LANETOPO_DATAIO_HPP_
#define LANETOPO_DATAIO_HPP_

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lanetopo/geometry.hpp"
#include "lanetopo/matrix.hpp"

namespace lanetopo::dataio {

using geometry::Box2;
using geometry::ControlPolygon;

inline constexpr int kTrafficCategoryCount = 13;
inline constexpr std::size_t kDefaultQueryBudget = 300;

// 0-3 are traffic-light states, 4-12 the nine sign types.
std::string_view traffic_category_name(int category);

struct GtLane {
  int id = 0;
  ControlPolygon ctrl;
  int category = 0;  // single centerline class

  bool operator==(const GtLane&) const = default;
};

struct TrafficElement {
  int id = 0;
  Box2 box;
  int category = 0;
  double confidence = 1.0;

  bool operator==(const TrafficElement&) const = default;
};

using Edge = std::pair<int, int>;

struct SceneRecord {
  std::string scene_id;
  std::vector<GtLane> lanes;
  std::vector<TrafficElement> traffic;
  std::vector<Edge> topo_ll;  // (from lane id, to lane id)
  std::vector<Edge> topo_lt;  // (lane id, traffic id)

  bool operator==(const SceneRecord&) const = default;
};

struct PredLane {
  ControlPolygon ctrl;
  double class_score = 1.0;
  std::optional<std::vector<double>> feature;

  bool operator==(const PredLane&) const = default;
};

struct DetectionRecord {
  std::string scene_id;
  std::vector<PredLane> lanes;
  std::vector<TrafficElement> traffic;

  bool operator==(const DetectionRecord&) const = default;
};

// Detections plus the topology probabilities predicted for them. ll is
// lanes x lanes, lt is lanes x traffic.
struct PredictionRecord {
  DetectionRecord detections;
  Matrix ll_prob;
  Matrix lt_prob;

  bool operator==(const PredictionRecord&) const = default;
};

struct ThresholdAp {
  double threshold = 0.0;
  double ap = 0.0;
  bool operator==(const ThresholdAp&) const = default;
};

struct AttributeAp {
  int category = 0;
  double ap = 0.0;
  std::size_t num_gt = 0;
  std::size_t num_pred = 0;
  bool included = false;  // false when the attribute has neither GT nor predictions
  bool operator==(const AttributeAp&) const = default;
};

struct MetricReport {
  double det_l = 0.0;
  double det_t = 0.0;
  double top_ll = 0.0;
  double top_lt = 0.0;
  double ols = 0.0;
  std::vector<ThresholdAp> det_l_per_threshold;
  std::vector<AttributeAp> det_t_per_attribute;
  std::size_t scene_count = 0;

  bool operator==(const MetricReport&) const = default;
};

// Record-level constraints applied while loading.
struct FormatConfig {
  std::size_t control_points = geometry::kDefaultControlPoints;
  std::size_t query_budget = kDefaultQueryBudget;
  // When unset, feature vectors only need to agree in width within a file.
  std::optional<std::size_t> feature_width;
};

// Throw ValidationError naming the scene and offending field.
void validate(const SceneRecord& scene, const FormatConfig& cfg = {});
void validate(const DetectionRecord& det, const FormatConfig& cfg = {});
void validate(const PredictionRecord& pred, const FormatConfig& cfg = {});

// JSON lines, one record per line. Blank lines are ignored.
std::vector<SceneRecord> read_scenes(std::istream& in, const FormatConfig& cfg = {});
std::vector<DetectionRecord> read_detections(std::istream& in, const FormatConfig& cfg = {});
std::vector<PredictionRecord> read_predictions(std::istream& in, const FormatConfig& cfg = {});
void write_scenes(std::ostream& out, const std::vector<SceneRecord>& scenes);
void write_detections(std::ostream& out, const std::vector<DetectionRecord>& dets);
void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& preds);

std::vector<SceneRecord> load_scenes(const std::string& path, const FormatConfig& cfg = {});
std::vector<DetectionRecord> load_detections(const std::string& path,
                                             const FormatConfig& cfg = {});
std::vector<PredictionRecord> load_predictions(const std::string& path,
                                               const FormatConfig& cfg = {});
void save_scenes(const std::string& path, const std::vector<SceneRecord>& scenes);
void save_detections(const std::string& path, const std::vector<DetectionRecord>& dets);
void save_predictions(const std::string& path, const std::vector<PredictionRecord>& preds);

// Single-record JSON text without trailing newline.
std::string to_json_line(const SceneRecord& scene);
std::string to_json_line(const DetectionRecord& det);
std::string to_json_line(const PredictionRecord& pred);

// Writes the JSON report at `path` and the console table at `path` + ".txt".
// A header warning is recorded when `ols` disagrees with the sub-scores.
void write_report(const MetricReport& report, const std::string& path);
MetricReport read_report(const std::string& path);
std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);
// Warnings the report header would carry.
std::vector<std::string> report_warnings(const MetricReport& report);

// Percentages with two decimals, DET_l | DET_t | TOP_ll | TOP_lt | OLS.
std::string format_report_table(const MetricReport& report);

}  // namespace lanetopo::dataio

#endif  // LANETOPO_DATAIO_HPP_
