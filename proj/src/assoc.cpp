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
#include "lanetopo/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lanetopo/errors.hpp"
#include "lanetopo/focal.hpp"
#include "lanetopo/geometry.hpp"

namespace lanetopo::assoc {

std::vector<std::optional<std::size_t>> Assignment::pred_to_gt(std::size_t num_preds) const {
  std::vector<std::optional<std::size_t>> out(num_preds);
  for (const auto& [p, g] : pairs) {
    if (p < num_preds) out[p] = g;
  }
  return out;
}

Assignment hungarian_solve(const Matrix& cost) {
  const std::size_t rows = cost.rows;
  const std::size_t cols = cost.cols;
  double max_abs = 0.0;
  for (double c : cost.data) {
    if (!std::isfinite(c)) throw DomainError("hungarian_solve: non-finite cost entry");
    max_abs = std::max(max_abs, std::abs(c));
  }
  Assignment result;
  if (rows == 0 || cols == 0) {
    for (std::size_t r = 0; r < rows; ++r) result.unmatched_preds.push_back(r);
    for (std::size_t c = 0; c < cols; ++c) result.unmatched_gts.push_back(c);
    return result;
  }

  const std::size_t n = std::max(rows, cols);
  const double sentinel = 1.0 + static_cast<double>(rows * cols) * max_abs;
  auto at = [&](std::size_t r, std::size_t c) {
    return (r < rows && c < cols) ? cost(r, c) : sentinel;
  };

  // Shortest augmenting path with row/column potentials, 1-based with a
  // virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::optional<std::size_t>> row_to_col(rows);
  std::vector<bool> col_used(cols, false);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t r = match_col[j] - 1;
    const std::size_t c = j - 1;
    if (r < rows && c < cols) {
      row_to_col[r] = c;
      col_used[c] = true;
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_to_col[r]) {
      result.pairs.emplace_back(r, *row_to_col[r]);
    } else {
      result.unmatched_preds.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_used[c]) result.unmatched_gts.push_back(c);
  }
  return result;
}

double assignment_cost(const Matrix& cost, const Assignment& a) {
  double total = 0.0;
  for (const auto& [r, c] : a.pairs) total += cost(r, c);
  return total;
}

double lane_pair_cost(const PredLane& pred, const GtLane& gt, const CostConfig& cfg) {
  if (pred.ctrl.size() != gt.ctrl.size()) {
    throw DomainError("lane_pair_cost: control point counts differ");
  }
  const double cls = topoheads::focal_positive_term(pred.class_score, cfg.focal_alpha, cfg.focal_gamma);
  return cfg.w_cls * cls + cfg.w_l1 * geometry::control_point_l1(pred.ctrl, gt.ctrl);
}

double traffic_pair_cost(const TrafficElement& pred, const TrafficElement& gt, const CostConfig& cfg) {
  const double cls = topoheads::focal_positive_term(pred.confidence, cfg.focal_alpha, cfg.focal_gamma);
  const double mismatch = pred.category == gt.category ? 0.0 : 1.0;
  return cfg.w_cls * cls + (1.0 - geometry::box_iou(pred.box, gt.box)) + mismatch;
}

Assignment match_for_training(std::span<const PredLane> preds, std::span<const GtLane> gts,
                              const CostConfig& cfg) {
  Matrix cost(preds.size(), gts.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) cost(i, j) = lane_pair_cost(preds[i], gts[j], cfg);
  }
  return hungarian_solve(cost);
}

Assignment match_traffic_for_training(std::span<const TrafficElement> preds,
                                      std::span<const TrafficElement> gts, const CostConfig& cfg) {
  Matrix cost(preds.size(), gts.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) cost(i, j) = traffic_pair_cost(preds[i], gts[j], cfg);
  }
  return hungarian_solve(cost);
}

GreedyMatch greedy_metric_match(std::size_t num_preds, std::size_t num_gts,
                                const std::function<double(std::size_t, std::size_t)>& affinity,
                                Affinity kind, double threshold) {
  GreedyMatch out;
  out.tp.assign(num_preds, false);
  std::vector<bool> taken(num_gts, false);
  for (std::size_t p = 0; p < num_preds; ++p) {
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t g = 0; g < num_gts; ++g) {
      if (taken[g]) continue;
      const double a = affinity(p, g);
      const bool ok = kind == Affinity::kDistance ? a <= threshold : a >= threshold;
      if (!ok) continue;
      const bool better = !best || (kind == Affinity::kDistance ? a < best_value : a > best_value);
      if (better) {
        best = g;
        best_value = a;
      }
    }
    if (best) {
      taken[*best] = true;
      out.tp[p] = true;
      out.pairs.emplace_back(p, *best);
    }
  }
  return out;
}

std::vector<std::size_t> rank_by_confidence(std::span<const double> confidences) {
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] > confidences[b];
  });
  return order;
}

}  // namespace lanetopo::assoc
