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
#include "lanetopo/detstrat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lanetopo/errors.hpp"

namespace lanetopo::detstrat {

void validate(const ResampleConfig& cfg) {
  if (!(cfg.freq_threshold > 0.0 && cfg.freq_threshold <= 1.0)) {
    throw ConfigError("freq_threshold must be in (0,1]");
  }
  if (cfg.min_factor < 1 || cfg.max_factor < cfg.min_factor) {
    throw ConfigError("resample factors must satisfy 1 <= min_factor <= max_factor");
  }
}

void validate(const PseudoConfig& cfg) {
  if (!(cfg.confidence_threshold >= 0.0 && cfg.confidence_threshold <= 1.0)) {
    throw ConfigError("pseudo-label confidence threshold must be in [0,1]");
  }
  if (!(cfg.loss_weight >= 0.0)) throw ConfigError("pseudo-label loss weight must be >= 0");
}

void validate(const TtaConfig& cfg) {
  if (cfg.scales.empty()) throw ConfigError("TTA needs at least one scale");
  for (double s : cfg.scales) {
    if (!(s >= kMinTtaScale && s <= kMaxTtaScale)) {
      throw ConfigError("TTA scale " + std::to_string(s) + " outside [0.7,1.4]");
    }
  }
  if (!(cfg.merge_iou > 0.0 && cfg.merge_iou <= 1.0)) throw ConfigError("merge_iou must be in (0,1]");
}

CategoryStats category_histogram(std::span<const SceneRecord> frames) {
  CategoryStats stats;
  for (const auto& frame : frames) {
    for (const auto& te : frame.traffic) {
      if (te.category < 0 || te.category >= static_cast<int>(kCategories)) continue;
      ++stats.counts[static_cast<std::size_t>(te.category)];
      ++stats.total;
    }
  }
  if (stats.total > 0) {
    for (std::size_t c = 0; c < kCategories; ++c) {
      stats.frequency[c] = static_cast<double>(stats.counts[c]) / static_cast<double>(stats.total);
    }
  }
  return stats;
}

int frame_factor(const SceneRecord& frame, const CategoryStats& stats, const ResampleConfig& cfg) {
  int factor = 1;
  for (const auto& te : frame.traffic) {
    if (te.category < 0 || te.category >= static_cast<int>(kCategories)) continue;
    const double freq = stats.frequency[static_cast<std::size_t>(te.category)];
    if (!(freq > 0.0) || freq >= cfg.freq_threshold) continue;
    const auto raw = static_cast<int>(std::lround(cfg.freq_threshold / freq));
    factor = std::max(factor, std::clamp(raw, cfg.min_factor, cfg.max_factor));
  }
  return factor;
}

std::vector<std::size_t> resample_plan(std::span<const SceneRecord> frames,
                                       const CategoryStats& stats, const ResampleConfig& cfg) {
  validate(cfg);
  std::vector<std::size_t> plan;
  plan.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const int factor = frame_factor(frames[i], stats, cfg);
    plan.insert(plan.end(), static_cast<std::size_t>(factor), i);
  }
  return plan;
}

std::array<double, kCategories> class_weight_map(const std::set<int>& difficult, double weight) {
  if (!(weight > 0.0)) throw DomainError("class_weight_map: weight must be > 0");
  std::array<double, kCategories> out;
  out.fill(1.0);
  for (int c : difficult) {
    if (c >= 0 && c < static_cast<int>(kCategories)) out[static_cast<std::size_t>(c)] = weight;
  }
  return out;
}

std::vector<WeightedAnnotation> select_pseudo_labels(std::span<const TrafficElement> predictions,
                                                     const PseudoConfig& cfg) {
  validate(cfg);
  std::vector<WeightedAnnotation> out;
  for (const auto& te : predictions) {
    if (te.confidence >= cfg.confidence_threshold) out.push_back({te, cfg.loss_weight});
  }
  return out;
}

std::vector<TrafficElement> tta_merge(std::span<const ScaledBoxes> per_scale, const TtaConfig& cfg) {
  std::vector<TrafficElement> pool;
  for (const auto& group : per_scale) {
    if (!(group.scale > 0.0)) throw DomainError("tta_merge: scale must be > 0");
    for (TrafficElement te : group.boxes) {
      te.box.x1 /= group.scale;
      te.box.y1 /= group.scale;
      te.box.x2 /= group.scale;
      te.box.y2 /= group.scale;
      pool.push_back(te);
    }
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pool[a].confidence > pool[b].confidence;
  });

  std::vector<bool> suppressed(pool.size(), false);
  std::vector<TrafficElement> kept;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const std::size_t i = order[a];
    if (suppressed[i]) continue;
    kept.push_back(pool[i]);
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::size_t j = order[b];
      if (suppressed[j] || pool[j].category != pool[i].category) continue;
      if (geometry::box_iou(pool[i].box, pool[j].box) >= cfg.merge_iou) suppressed[j] = true;
    }
  }
  return kept;
}

}  // namespace lanetopo::detstrat
