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
#ifndef LANETOPO_ASSOC_HPP_
#define LANETOPO_ASSOC_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lanetopo/dataio.hpp"
#include "lanetopo/matrix.hpp"

namespace lanetopo::assoc {

using dataio::GtLane;
using dataio::PredLane;
using dataio::TrafficElement;

// DETR-style matching cost: focal classification term plus control-point L1.
struct CostConfig {
  double w_cls = 1.5;
  double w_l1 = 0.0075;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;

  bool operator==(const CostConfig&) const = default;
};

// Injective partial map from prediction (row) index to GT (column) index.
struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // sorted by prediction index
  std::vector<std::size_t> unmatched_preds;
  std::vector<std::size_t> unmatched_gts;

  // gt index per prediction, nullopt when unmatched.
  std::vector<std::optional<std::size_t>> pred_to_gt(std::size_t num_preds) const;
  bool operator==(const Assignment&) const = default;
};

// Minimum-total-cost assignment of min(R, C) pairs. Rectangular inputs are
// padded to square with a sentinel of 1 + R*C*max|cost|. Among equal-cost
// optima the solver's scan order (rows ascending, first minimal column)
// decides. Throws DomainError on non-finite entries.
Assignment hungarian_solve(const Matrix& cost);

double assignment_cost(const Matrix& cost, const Assignment& a);

double lane_pair_cost(const PredLane& pred, const GtLane& gt, const CostConfig& cfg = {});

// Traffic analogue used only for topology supervision: the focal confidence
// term, plus (1 - IoU), plus 1 when the categories differ.
double traffic_pair_cost(const TrafficElement& pred, const TrafficElement& gt,
                         const CostConfig& cfg = {});

// Ungated Hungarian matching on the pairwise cost matrix.
Assignment match_for_training(std::span<const PredLane> preds, std::span<const GtLane> gts,
                              const CostConfig& cfg = {});
Assignment match_traffic_for_training(std::span<const TrafficElement> preds,
                                      std::span<const TrafficElement> gts,
                                      const CostConfig& cfg = {});

enum class Affinity {
  kDistance,    // smaller is better, match when affinity <= threshold
  kSimilarity,  // larger is better, match when affinity >= threshold
};

struct GreedyMatch {
  std::vector<bool> tp;  // per prediction, in rank order
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (prediction rank, gt index)
};

// Predictions are indexed by rank (0 = most confident). Each prediction in
// turn takes the best-affinity GT that is still free and within threshold;
// ties go to the lowest GT index.
GreedyMatch greedy_metric_match(std::size_t num_preds, std::size_t num_gts,
                                const std::function<double(std::size_t, std::size_t)>& affinity,
                                Affinity kind, double threshold);

// Indices sorted by descending confidence, ties kept in input order.
std::vector<std::size_t> rank_by_confidence(std::span<const double> confidences);

}  // namespace lanetopo::assoc

#endif  // LANETOPO_ASSOC_HPP_
