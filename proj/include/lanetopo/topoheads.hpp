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
#ifndef LANETOPO_TOPOHEADS_HPP_
#define LANETOPO_TOPOHEADS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanetopo/adamw.hpp"
#include "lanetopo/assoc.hpp"
#include "lanetopo/dataio.hpp"
#include "lanetopo/focal.hpp"
#include "lanetopo/matrix.hpp"
#include "lanetopo/mlp.hpp"

namespace lanetopo::topoheads {

using dataio::DetectionRecord;
using dataio::PredLane;
using dataio::SceneRecord;
using dataio::TrafficElement;

// Box corners (normalized) + one-hot category + confidence.
inline constexpr std::size_t kTrafficInputWidth = 4 + dataio::kTrafficCategoryCount + 1;

struct HeadConfig {
  std::size_t feature_width = 128;  // C
  std::size_t query_budget = dataio::kDefaultQueryBudget;
  std::size_t mlp_hidden = 0;  // 0 means C
  std::size_t control_points = geometry::kDefaultControlPoints;
  // Width of detector decoded features; unset selects the [ctrl, score]
  // surrogate input for the feature embedder.
  std::optional<std::size_t> detector_feature_width;
  double coord_scale = 30.0;  // meters mapped to unit input
  double image_width = 2048.0;
  double image_height = 1550.0;
  int epochs = 10;
  double lr = 2e-4;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  assoc::CostConfig matching;

  std::size_t hidden() const { return mlp_hidden == 0 ? feature_width : mlp_hidden; }
  std::size_t lane_feature_input_width() const {
    return detector_feature_width ? *detector_feature_width : 3 * control_points + 1;
  }
  AdamWConfig adamw() const { return {lr, adam_beta1, adam_beta2, adam_eps, weight_decay}; }
  bool operator==(const HeadConfig&) const = default;
};

// Throws ConfigError.
void validate(const HeadConfig& cfg);

struct TopoHeadParams {
  HeadConfig config;
  MlpParams coord_embedder;    // 3M -> C -> C
  MlpParams feat_embedder;     // detector width or 3M+1 -> C -> C
  MlpParams traffic_embedder;  // 18 -> C -> C
  MlpParams ll_head;           // 2C -> hidden -> 1
  MlpParams lt_head;           // C -> hidden -> 1

  bool operator==(const TopoHeadParams&) const = default;
};

// Seeded Glorot-uniform initialization.
TopoHeadParams init_params(const HeadConfig& cfg);
TopoHeadParams zeros_like(const TopoHeadParams& params);
// Every weight and bias array in a fixed canonical order.
std::vector<std::span<double>> parameter_views(TopoHeadParams& params);
std::vector<std::span<const double>> parameter_views(const TopoHeadParams& params);
std::size_t parameter_count(const TopoHeadParams& params);
// Throws ValidationError when dimensions do not chain or entries are non-finite.
void check_params(const TopoHeadParams& params);

std::vector<double> lane_coord_input(const PredLane& lane, const HeadConfig& cfg);
std::vector<double> lane_feature_input(const PredLane& lane, const HeadConfig& cfg);
std::vector<double> traffic_input(const TrafficElement& te, const HeadConfig& cfg);

// coord_embedder(ctrl) + feat_embedder(feature or surrogate).
std::vector<double> embed_lane(const PredLane& lane, const TopoHeadParams& params);
std::vector<double> embed_traffic(const TrafficElement& te, const TopoHeadParams& params);

// (i, j) = ll_head([feat_i, feat_j]); the diagonal is computed too.
Matrix ll_logits(std::span<const std::vector<double>> lane_feats, const TopoHeadParams& params);
// (i, k) = lt_head(feat_i + traffic_feat_k).
Matrix lt_logits(std::span<const std::vector<double>> lane_feats,
                 std::span<const std::vector<double>> traffic_feats, const TopoHeadParams& params);

struct SceneAssignment {
  assoc::Assignment lanes;
  assoc::Assignment traffic;
};

struct TopologyLabels {
  Matrix ll;  // n x n, 0/1
  Matrix lt;  // n x t, 0/1
};

// Lane and traffic matching of detections to the scene for supervision.
SceneAssignment match_scene(const DetectionRecord& det, const SceneRecord& scene,
                            const assoc::CostConfig& cfg = {});

// Ground-truth adjacency pulled back onto prediction indices. Unmatched
// predictions get all-zero rows and columns. Throws DomainError on indices
// outside the scene.
TopologyLabels project_labels(const SceneAssignment& assignment, const SceneRecord& scene,
                              std::size_t n, std::size_t t);

struct SceneLoss {
  double ll = 0.0;
  double lt = 0.0;
  double total() const { return ll + lt; }
};

// Summed focal loss over all off-diagonal ll pairs and all lt pairs. When
// `grads` is given (shaped like params) the exact gradient is accumulated
// into it.
SceneLoss scene_loss(const DetectionRecord& det, const TopologyLabels& labels,
                     const TopoHeadParams& params, TopoHeadParams* grads);

void adamw_step(TopoHeadParams& params, const TopoHeadParams& grads, AdamWState& state,
                std::int64_t step, const HeadConfig& cfg);

struct EpochStats {
  double ll = 0.0;  // mean per-scene loss
  double lt = 0.0;
  double total = 0.0;
  double val_total = 0.0;  // mean per-scene validation loss, 0 without a validation set
  double grad_norm = 0.0;  // mean per-step global gradient norm
};

struct TrainStats {
  std::vector<EpochStats> epochs;
  double wall_clock_seconds = 0.0;
};

struct TrainResult {
  TopoHeadParams params;
  TrainStats stats;
};

using EpochCallback = std::function<void(int epoch, const EpochStats&)>;

// One AdamW step per scene, scenes visited in a seeded order per epoch.
// Throws ConfigError on an empty or misaligned training set, TrainingError
// on a non-finite loss.
TrainResult train(std::span<const SceneRecord> train_scenes,
                  std::span<const DetectionRecord> train_dets,
                  std::span<const SceneRecord> val_scenes, std::span<const DetectionRecord> val_dets,
                  const HeadConfig& cfg, const EpochCallback& on_epoch = {});

struct TopologyProbs {
  Matrix ll;  // diagonal forced to 0
  Matrix lt;
};

TopologyProbs predict(const DetectionRecord& det, const TopoHeadParams& params);
dataio::PredictionRecord predict_record(const DetectionRecord& det, const TopoHeadParams& params);

std::string params_to_json(const TopoHeadParams& params);
TopoHeadParams params_from_json(const std::string& text);
void save_params(const TopoHeadParams& params, const std::string& path);
TopoHeadParams load_params(const std::string& path);

std::string stats_to_json(const TrainStats& stats);

}  // namespace lanetopo::topoheads

#endif  // LANETOPO_TOPOHEADS_HPP_
