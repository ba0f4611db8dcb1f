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
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/rng.hpp"
#include "lanetopo/topoheads.hpp"

namespace lanetopo::topoheads {

namespace {

struct Example {
  const DetectionRecord* det;
  TopologyLabels labels;
};

std::vector<Example> prepare(std::span<const SceneRecord> scenes,
                             std::span<const DetectionRecord> dets, const HeadConfig& cfg,
                             const char* what) {
  if (scenes.size() != dets.size()) {
    throw ConfigError(std::string(what) + ": scene and detection counts differ");
  }
  std::vector<Example> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (scenes[i].scene_id != dets[i].scene_id) {
      throw ConfigError(std::string(what) + ": scene '" + scenes[i].scene_id +
                        "' paired with detections for '" + dets[i].scene_id + "'");
    }
    if (dets[i].lanes.size() > cfg.query_budget) {
      throw ConfigError(std::string(what) + ": scene '" + dets[i].scene_id +
                        "' exceeds the lane query budget");
    }
    const SceneAssignment assignment = match_scene(dets[i], scenes[i], cfg.matching);
    out.push_back({&dets[i], project_labels(assignment, scenes[i], dets[i].lanes.size(),
                                            dets[i].traffic.size())});
  }
  return out;
}

double global_norm(const TopoHeadParams& grads) {
  double sq = 0.0;
  for (const auto& view : parameter_views(grads)) {
    for (double g : view) sq += g * g;
  }
  return std::sqrt(sq);
}

}  // namespace

TrainResult train(std::span<const SceneRecord> train_scenes,
                  std::span<const DetectionRecord> train_dets,
                  std::span<const SceneRecord> val_scenes, std::span<const DetectionRecord> val_dets,
                  const HeadConfig& cfg, const EpochCallback& on_epoch) {
  validate(cfg);
  if (train_scenes.empty()) throw ConfigError("training set is empty");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Example> train_set = prepare(train_scenes, train_dets, cfg, "train");
  const std::vector<Example> val_set = prepare(val_scenes, val_dets, cfg, "val");

  TrainResult result{init_params(cfg), {}};
  TopoHeadParams& params = result.params;
  TopoHeadParams grads = zeros_like(params);
  AdamWState state;
  std::int64_t step = 0;

  std::vector<std::size_t> order(train_set.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {0x0dde, static_cast<std::uint64_t>(epoch)}));
    std::shuffle(order.begin(), order.end(), rng);

    EpochStats stats;
    for (std::size_t idx : order) {
      const Example& ex = train_set[idx];
      for (auto view : parameter_views(grads)) std::fill(view.begin(), view.end(), 0.0);
      const SceneLoss loss = scene_loss(*ex.det, ex.labels, params, &grads);
      if (!std::isfinite(loss.total())) {
        throw TrainingError("non-finite training loss on '" + ex.det->scene_id + "'", epoch, idx);
      }
      stats.ll += loss.ll;
      stats.lt += loss.lt;
      stats.grad_norm += global_norm(grads);
      adamw_step(params, grads, state, ++step, cfg);
    }
    const double count = static_cast<double>(train_set.size());
    stats.ll /= count;
    stats.lt /= count;
    stats.grad_norm /= count;
    stats.total = stats.ll + stats.lt;
    if (!val_set.empty()) {
      for (const Example& ex : val_set) stats.val_total += scene_loss(*ex.det, ex.labels, params, nullptr).total();
      stats.val_total /= static_cast<double>(val_set.size());
    }
    result.stats.epochs.push_back(stats);
    if (on_epoch) on_epoch(epoch, stats);
  }
  result.stats.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string stats_to_json(const TrainStats& stats) {
  nlohmann::ordered_json j;
  j["header"] = {{"format", "lanetopo.train_stats"}, {"wall_clock_seconds", stats.wall_clock_seconds}};
  nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < stats.epochs.size(); ++e) {
    const auto& s = stats.epochs[e];
    epochs.push_back({{"epoch", e + 1},
                      {"ll", s.ll},
                      {"lt", s.lt},
                      {"total", s.total},
                      {"val_total", s.val_total},
                      {"grad_norm", s.grad_norm}});
  }
  j["epochs"] = std::move(epochs);
  return j.dump(2);
}

}  // namespace lanetopo::topoheads
