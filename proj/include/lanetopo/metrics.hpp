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
#ifndef LANETOPO_METRICS_HPP_
#define LANETOPO_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanetopo/dataio.hpp"
#include "lanetopo/matrix.hpp"

namespace lanetopo::metrics {

using dataio::DetectionRecord;
using dataio::MetricReport;
using dataio::PredictionRecord;
using dataio::SceneRecord;

struct DetMatchConfig {
  std::vector<double> lane_frechet_thresholds = {1.0, 2.0, 3.0};  // meters
  double traffic_iou_threshold = 0.75;
  std::size_t lane_samples = geometry::kDefaultSamples;
};

// Throws ConfigError.
void validate(const DetMatchConfig& cfg);

// All-point AP: sum of precision at each TP rank, divided by num_gt, capped
// at 1 for flag sequences holding more TPs than num_gt.
// num_gt == 0 gives 1.0 without predictions and 0.0 with any.
double average_precision(const std::vector<bool>& ranked_flags, std::size_t num_gt);

struct LaneDetection {
  double score = 0.0;
  std::vector<dataio::ThresholdAp> per_threshold;
};

struct TrafficDetection {
  double score = 0.0;
  std::vector<dataio::AttributeAp> per_attribute;
};

// Records are aligned by scene_id; throws InputError when the two sides do
// not cover the same scenes.
LaneDetection det_l(std::span<const DetectionRecord> preds, std::span<const SceneRecord> gts,
                    const DetMatchConfig& cfg = {});
TrafficDetection det_t(std::span<const DetectionRecord> preds, std::span<const SceneRecord> gts,
                       const DetMatchConfig& cfg = {});

// GT index -> matched prediction index, from the greedy detection match at
// the loosest lane threshold and the traffic IoU threshold.
struct TopologyMatch {
  std::vector<std::optional<std::size_t>> lane_gt_to_pred;
  std::vector<std::optional<std::size_t>> traffic_gt_to_pred;
};

TopologyMatch match_for_topology(const DetectionRecord& pred, const SceneRecord& gt,
                                 const DetMatchConfig& cfg = {});

// Per-vertex APs of one scene. Every GT vertex with at least one edge
// contributes: its matched prediction's incident candidate edges are ranked
// by probability (ties by candidate order) and scored against the GT edges;
// an undetected vertex scores 0. ll candidates are outgoing edges followed by
// incoming edges; lt vertices are GT lanes (candidates: all traffic
// predictions) followed by GT traffic elements (candidates: all lanes).
std::vector<double> top_ll_vertex_aps(const Matrix& ll_prob, const SceneRecord& gt,
                                      const TopologyMatch& match);
std::vector<double> top_lt_vertex_aps(const Matrix& lt_prob, const SceneRecord& gt,
                                      const TopologyMatch& match);

// Mean of pooled vertex APs; 1.0 when there is no vertex to score.
double top_score(const std::vector<double>& vertex_aps);

double top_ll(std::span<const PredictionRecord> preds, std::span<const SceneRecord> gts,
              const DetMatchConfig& cfg = {});
double top_lt(std::span<const PredictionRecord> preds, std::span<const SceneRecord> gts,
              const DetMatchConfig& cfg = {});

// (det_l + det_t + sqrt(top_ll) + sqrt(top_lt)) / 4. Throws DomainError on
// inputs outside [0, 1].
double ols(double det_l, double det_t, double top_ll, double top_lt);

MetricReport evaluate(std::span<const PredictionRecord> preds, std::span<const SceneRecord> gts,
                      const DetMatchConfig& cfg = {});
MetricReport evaluate_files(const std::string& predictions_path, const std::string& gt_path,
                            const DetMatchConfig& cfg = {},
                            const dataio::FormatConfig& format = {});

}  // namespace lanetopo::metrics

#endif  // LANETOPO_METRICS_HPP_
