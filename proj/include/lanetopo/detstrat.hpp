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
#ifndef LANETOPO_DETSTRAT_HPP_
#define LANETOPO_DETSTRAT_HPP_

#include <array>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "lanetopo/dataio.hpp"

namespace lanetopo::detstrat {

using dataio::SceneRecord;
using dataio::TrafficElement;
inline constexpr std::size_t kCategories = dataio::kTrafficCategoryCount;

struct CategoryStats {
  std::array<std::size_t, kCategories> counts{};
  std::size_t total = 0;
  std::array<double, kCategories> frequency{};  // zero when total == 0
};

struct ResampleConfig {
  double freq_threshold = 0.10;
  int min_factor = 5;
  int max_factor = 20;
};

struct PseudoConfig {
  double confidence_threshold = 0.5;
  double loss_weight = 1.0;
};

struct TtaConfig {
  std::vector<double> scales = {0.7, 0.85, 1.0, 1.2, 1.4};
  double merge_iou = 0.6;
};

inline constexpr double kMinTtaScale = 0.7;
inline constexpr double kMaxTtaScale = 1.4;

// Throw ConfigError.
void validate(const ResampleConfig& cfg);
void validate(const PseudoConfig& cfg);
void validate(const TtaConfig& cfg);

CategoryStats category_histogram(std::span<const SceneRecord> frames);

// Duplication factor of one frame: the largest clamp(round(threshold/freq),
// min, max) over the rare categories (freq < threshold) it contains, else 1.
int frame_factor(const SceneRecord& frame, const CategoryStats& stats, const ResampleConfig& cfg);

// Frame indices in input order, each repeated frame_factor times.
std::vector<std::size_t> resample_plan(std::span<const SceneRecord> frames,
                                       const CategoryStats& stats, const ResampleConfig& cfg);

// `weight` for the listed categories, 1.0 for the rest.
std::array<double, kCategories> class_weight_map(const std::set<int>& difficult, double weight);

struct WeightedAnnotation {
  TrafficElement element;
  double loss_weight = 1.0;
};

std::vector<WeightedAnnotation> select_pseudo_labels(std::span<const TrafficElement> predictions,
                                                     const PseudoConfig& cfg);

struct ScaledBoxes {
  double scale = 1.0;
  std::vector<TrafficElement> boxes;
};

// Boxes are divided by their scale, pooled, and reduced by per-category
// greedy NMS (highest confidence first, ties in pooled order). Throws
// DomainError when a scale is not positive.
std::vector<TrafficElement> tta_merge(std::span<const ScaledBoxes> per_scale, const TtaConfig& cfg);

}  // namespace lanetopo::detstrat

#endif  // LANETOPO_DETSTRAT_HPP_
