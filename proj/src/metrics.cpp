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
#include "lanetopo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "lanetopo/assoc.hpp"
#include "lanetopo/errors.hpp"

namespace lanetopo::metrics {

namespace {

const std::string& scene_id_of(const DetectionRecord& d) { return d.scene_id; }
const std::string& scene_id_of(const PredictionRecord& p) { return p.detections.scene_id; }
const DetectionRecord& detections_of(const DetectionRecord& d) { return d; }
const DetectionRecord& detections_of(const PredictionRecord& p) { return p.detections; }

// (prediction index, gt index) for every GT scene, in GT order.
template <typename Pred>
std::vector<std::pair<std::size_t, std::size_t>> align(std::span<const Pred> preds,
                                                       std::span<const SceneRecord> gts) {
  std::map<std::string, std::size_t> pred_index;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pred_index.emplace(scene_id_of(preds[i]), i).second) {
      throw InputError("duplicate prediction scene id '" + scene_id_of(preds[i]) + "'");
    }
  }
  std::set<std::string> gt_ids;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<std::string> missing_preds;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gt_ids.insert(gts[g].scene_id).second) {
      throw InputError("duplicate ground-truth scene id '" + gts[g].scene_id + "'");
    }
    auto it = pred_index.find(gts[g].scene_id);
    if (it == pred_index.end()) {
      missing_preds.push_back(gts[g].scene_id);
    } else {
      out.emplace_back(it->second, g);
    }
  }
  std::vector<std::string> missing_gts;
  for (const auto& [id, idx] : pred_index) {
    if (!gt_ids.count(id)) missing_gts.push_back(id);
  }
  if (!missing_preds.empty() || !missing_gts.empty()) {
    std::string msg = "scene mismatch between predictions and ground truth;";
    if (!missing_preds.empty()) {
      msg += " missing predictions:";
      for (const auto& id : missing_preds) msg += " " + id;
      msg += ";";
    }
    if (!missing_gts.empty()) {
      msg += " missing ground truth:";
      for (const auto& id : missing_gts) msg += " " + id;
    }
    throw InputError(msg);
  }
  return out;
}

// One ranked prediction entering a pooled AP computation.
struct Scored {
  double confidence;
  const std::string* scene_id;
  std::size_t index;
  bool tp;
};

double pooled_ap(std::vector<Scored>& pool, std::size_t num_gt) {
  std::stable_sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (*a.scene_id != *b.scene_id) return *a.scene_id < *b.scene_id;
    return a.index < b.index;
  });
  std::vector<bool> flags;
  flags.reserve(pool.size());
  for (const auto& s : pool) flags.push_back(s.tp);
  return average_precision(flags, num_gt);
}

double max_lane_threshold(const DetMatchConfig& cfg) {
  return *std::max_element(cfg.lane_frechet_thresholds.begin(), cfg.lane_frechet_thresholds.end());
}

// Frechet distance per (prediction, gt) lane pair of one scene.
Matrix lane_distances(const DetectionRecord& pred, const SceneRecord& gt, std::size_t samples) {
  std::vector<geometry::Polyline3> p, g;
  for (const auto& lane : pred.lanes) p.push_back(geometry::sample_lane(lane.ctrl, samples));
  for (const auto& lane : gt.lanes) g.push_back(geometry::sample_lane(lane.ctrl, samples));
  Matrix d(p.size(), g.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) d(i, j) = geometry::frechet_distance(p[i], g[j]);
  }
  return d;
}

std::vector<std::size_t> lane_ranking(const DetectionRecord& pred) {
  std::vector<double> conf;
  for (const auto& lane : pred.lanes) conf.push_back(lane.class_score);
  return assoc::rank_by_confidence(conf);
}

// Greedy match of one category's traffic predictions; returns (pred, gt) index pairs
// and per-prediction flags in the original prediction indexing.
struct CategoryMatch {
  std::vector<std::size_t> pred_indices;
  std::vector<bool> tp;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

CategoryMatch match_traffic_category(const DetectionRecord& pred, const SceneRecord& gt, int category,
                                     double iou_threshold) {
  std::vector<std::size_t> p_idx, g_idx;
  std::vector<double> conf;
  for (std::size_t i = 0; i < pred.traffic.size(); ++i) {
    if (pred.traffic[i].category == category) {
      p_idx.push_back(i);
      conf.push_back(pred.traffic[i].confidence);
    }
  }
  for (std::size_t j = 0; j < gt.traffic.size(); ++j) {
    if (gt.traffic[j].category == category) g_idx.push_back(j);
  }
  const auto rank = assoc::rank_by_confidence(conf);
  const auto greedy = assoc::greedy_metric_match(
      rank.size(), g_idx.size(),
      [&](std::size_t r, std::size_t g) {
        return geometry::box_iou(pred.traffic[p_idx[rank[r]]].box, gt.traffic[g_idx[g]].box);
      },
      assoc::Affinity::kSimilarity, iou_threshold);
  CategoryMatch out;
  for (std::size_t r = 0; r < rank.size(); ++r) {
    out.pred_indices.push_back(p_idx[rank[r]]);
    out.tp.push_back(greedy.tp[r]);
  }
  for (const auto& [r, g] : greedy.pairs) out.pairs.emplace_back(p_idx[rank[r]], g_idx[g]);
  return out;
}

template <typename Pred>
LaneDetection det_l_impl(std::span<const Pred> preds, std::span<const SceneRecord> gts,
                         const DetMatchConfig& cfg) {
  validate(cfg);
  const auto aligned = align(preds, gts);
  const std::size_t levels = cfg.lane_frechet_thresholds.size();
  std::vector<std::vector<Scored>> pools(levels);
  std::size_t num_gt = 0;
  for (const auto& [pi, gi] : aligned) {
    const DetectionRecord& pred = detections_of(preds[pi]);
    const SceneRecord& gt = gts[gi];
    num_gt += gt.lanes.size();
    const Matrix dist = lane_distances(pred, gt, cfg.lane_samples);
    const auto rank = lane_ranking(pred);
    for (std::size_t l = 0; l < levels; ++l) {
      const auto greedy = assoc::greedy_metric_match(
          rank.size(), gt.lanes.size(),
          [&](std::size_t r, std::size_t g) { return dist(rank[r], g); }, assoc::Affinity::kDistance,
          cfg.lane_frechet_thresholds[l]);
      for (std::size_t r = 0; r < rank.size(); ++r) {
        pools[l].push_back({pred.lanes[rank[r]].class_score, &gt.scene_id, rank[r], greedy.tp[r]});
      }
    }
  }
  LaneDetection out;
  for (std::size_t l = 0; l < levels; ++l) {
    const double ap = pooled_ap(pools[l], num_gt);
    out.per_threshold.push_back({cfg.lane_frechet_thresholds[l], ap});
    out.score += ap;
  }
  out.score /= static_cast<double>(levels);
  return out;
}

template <typename Pred>
TrafficDetection det_t_impl(std::span<const Pred> preds, std::span<const SceneRecord> gts,
                            const DetMatchConfig& cfg) {
  validate(cfg);
  const auto aligned = align(preds, gts);
  TrafficDetection out;
  std::size_t included = 0;
  for (int c = 0; c < dataio::kTrafficCategoryCount; ++c) {
    std::vector<Scored> pool;
    dataio::AttributeAp attr;
    attr.category = c;
    for (const auto& [pi, gi] : aligned) {
      const DetectionRecord& pred = detections_of(preds[pi]);
      const SceneRecord& gt = gts[gi];
      for (const auto& te : gt.traffic) attr.num_gt += te.category == c ? 1 : 0;
      const CategoryMatch m = match_traffic_category(pred, gt, c, cfg.traffic_iou_threshold);
      for (std::size_t r = 0; r < m.pred_indices.size(); ++r) {
        const std::size_t idx = m.pred_indices[r];
        pool.push_back({pred.traffic[idx].confidence, &gt.scene_id, idx, m.tp[r]});
      }
    }
    attr.num_pred = pool.size();
    attr.included = attr.num_gt > 0 || attr.num_pred > 0;
    attr.ap = attr.included ? pooled_ap(pool, attr.num_gt) : 0.0;
    if (attr.included) {
      out.score += attr.ap;
      ++included;
    }
    out.per_attribute.push_back(attr);
  }
  out.score = included == 0 ? 1.0 : out.score / static_cast<double>(included);
  return out;
}

using EdgeSet = std::set<dataio::Edge>;

// Ranks candidate scores (ties by candidate order) and returns the AP.
double rank_and_score(const std::vector<double>& scores, const std::vector<bool>& positive,
                      std::size_t num_gt) {
  const auto order = assoc::rank_by_confidence(scores);
  std::vector<bool> flags;
  flags.reserve(order.size());
  for (std::size_t i : order) flags.push_back(positive[i]);
  return average_precision(flags, num_gt);
}

std::vector<std::optional<std::size_t>> invert(const std::vector<std::optional<std::size_t>>& gt_to_pred,
                                               std::size_t num_preds) {
  std::vector<std::optional<std::size_t>> out(num_preds);
  for (std::size_t g = 0; g < gt_to_pred.size(); ++g) {
    if (gt_to_pred[g]) out[*gt_to_pred[g]] = g;
  }
  return out;
}

template <typename Pred>
std::vector<std::pair<const PredictionRecord*, const SceneRecord*>> aligned_predictions(
    std::span<const Pred> preds, std::span<const SceneRecord> gts) {
  std::vector<std::pair<const PredictionRecord*, const SceneRecord*>> out;
  for (const auto& [pi, gi] : align(preds, gts)) out.emplace_back(&preds[pi], &gts[gi]);
  return out;
}

}  // namespace

void validate(const DetMatchConfig& cfg) {
  if (cfg.lane_frechet_thresholds.empty()) throw ConfigError("need at least one lane threshold");
  for (std::size_t i = 0; i < cfg.lane_frechet_thresholds.size(); ++i) {
    if (!(cfg.lane_frechet_thresholds[i] > 0.0)) throw ConfigError("lane thresholds must be positive");
    if (i > 0 && !(cfg.lane_frechet_thresholds[i] > cfg.lane_frechet_thresholds[i - 1])) {
      throw ConfigError("lane thresholds must be sorted ascending");
    }
  }
  if (!(cfg.traffic_iou_threshold > 0.0 && cfg.traffic_iou_threshold <= 1.0)) {
    throw ConfigError("traffic IoU threshold must be in (0,1]");
  }
  if (cfg.lane_samples < 2) throw ConfigError("lane_samples must be >= 2");
}

double average_precision(const std::vector<bool>& flags, std::size_t num_gt) {
  if (num_gt == 0) return flags.empty() ? 1.0 : 0.0;
  double sum = 0.0;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (!flags[k]) continue;
    ++tp;
    sum += static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  return std::min(1.0, sum / static_cast<double>(num_gt));
}

LaneDetection det_l(std::span<const DetectionRecord> preds, std::span<const SceneRecord> gts,
                    const DetMatchConfig& cfg) {
  return det_l_impl(preds, gts, cfg);
}

TrafficDetection det_t(std::span<const DetectionRecord> preds, std::span<const SceneRecord> gts,
                       const DetMatchConfig& cfg) {
  return det_t_impl(preds, gts, cfg);
}

TopologyMatch match_for_topology(const DetectionRecord& pred, const SceneRecord& gt,
                                 const DetMatchConfig& cfg) {
  validate(cfg);
  TopologyMatch out;
  out.lane_gt_to_pred.resize(gt.lanes.size());
  out.traffic_gt_to_pred.resize(gt.traffic.size());
  const Matrix dist = lane_distances(pred, gt, cfg.lane_samples);
  const auto rank = lane_ranking(pred);
  const auto greedy = assoc::greedy_metric_match(
      rank.size(), gt.lanes.size(), [&](std::size_t r, std::size_t g) { return dist(rank[r], g); },
      assoc::Affinity::kDistance, max_lane_threshold(cfg));
  for (const auto& [r, g] : greedy.pairs) out.lane_gt_to_pred[g] = rank[r];
  for (int c = 0; c < dataio::kTrafficCategoryCount; ++c) {
    const CategoryMatch m = match_traffic_category(pred, gt, c, cfg.traffic_iou_threshold);
    for (const auto& [p, g] : m.pairs) out.traffic_gt_to_pred[g] = p;
  }
  return out;
}

std::vector<double> top_ll_vertex_aps(const Matrix& ll_prob, const SceneRecord& gt,
                                      const TopologyMatch& match) {
  const std::size_t n = ll_prob.rows;
  if (ll_prob.cols != n || match.lane_gt_to_pred.size() != gt.lanes.size()) {
    throw DomainError("top_ll: probability matrix or match does not fit the scene");
  }
  const auto pred_to_gt = invert(match.lane_gt_to_pred, n);
  const EdgeSet edges(gt.topo_ll.begin(), gt.topo_ll.end());
  std::vector<double> aps;
  for (std::size_t g = 0; g < gt.lanes.size(); ++g) {
    const int gid = gt.lanes[g].id;
    std::size_t num_gt = 0;
    for (const auto& [a, b] : gt.topo_ll) num_gt += (a == gid ? 1 : 0) + (b == gid ? 1 : 0);
    if (num_gt == 0) continue;
    const auto p = match.lane_gt_to_pred[g];
    if (!p || *p >= n) {
      aps.push_back(0.0);
      continue;
    }
    std::vector<double> scores;
    std::vector<bool> positive;
    for (int direction = 0; direction < 2; ++direction) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == *p) continue;
        scores.push_back(direction == 0 ? ll_prob(*p, j) : ll_prob(j, *p));
        bool tp = false;
        if (pred_to_gt[j]) {
          const int hid = gt.lanes[*pred_to_gt[j]].id;
          tp = direction == 0 ? edges.count({gid, hid}) > 0 : edges.count({hid, gid}) > 0;
        }
        positive.push_back(tp);
      }
    }
    aps.push_back(rank_and_score(scores, positive, num_gt));
  }
  return aps;
}

std::vector<double> top_lt_vertex_aps(const Matrix& lt_prob, const SceneRecord& gt,
                                      const TopologyMatch& match) {
  const std::size_t n = lt_prob.rows;
  const std::size_t t = lt_prob.cols;
  if (match.lane_gt_to_pred.size() != gt.lanes.size() ||
      match.traffic_gt_to_pred.size() != gt.traffic.size()) {
    throw DomainError("top_lt: match does not fit the scene");
  }
  const auto lane_pred_to_gt = invert(match.lane_gt_to_pred, n);
  const auto traffic_pred_to_gt = invert(match.traffic_gt_to_pred, t);
  const EdgeSet edges(gt.topo_lt.begin(), gt.topo_lt.end());
  std::vector<double> aps;

  for (std::size_t g = 0; g < gt.lanes.size(); ++g) {
    const int gid = gt.lanes[g].id;
    std::size_t num_gt = 0;
    for (const auto& e : gt.topo_lt) num_gt += e.first == gid ? 1 : 0;
    if (num_gt == 0) continue;
    const auto p = match.lane_gt_to_pred[g];
    if (!p || *p >= n) {
      aps.push_back(0.0);
      continue;
    }
    std::vector<double> scores;
    std::vector<bool> positive;
    for (std::size_t k = 0; k < t; ++k) {
      scores.push_back(lt_prob(*p, k));
      positive.push_back(traffic_pred_to_gt[k] &&
                         edges.count({gid, gt.traffic[*traffic_pred_to_gt[k]].id}) > 0);
    }
    aps.push_back(rank_and_score(scores, positive, num_gt));
  }

  for (std::size_t m = 0; m < gt.traffic.size(); ++m) {
    const int mid = gt.traffic[m].id;
    std::size_t num_gt = 0;
    for (const auto& e : gt.topo_lt) num_gt += e.second == mid ? 1 : 0;
    if (num_gt == 0) continue;
    const auto k = match.traffic_gt_to_pred[m];
    if (!k || *k >= t) {
      aps.push_back(0.0);
      continue;
    }
    std::vector<double> scores;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back(lt_prob(i, *k));
      positive.push_back(lane_pred_to_gt[i] &&
                         edges.count({gt.lanes[*lane_pred_to_gt[i]].id, mid}) > 0);
    }
    aps.push_back(rank_and_score(scores, positive, num_gt));
  }
  return aps;
}

double top_score(const std::vector<double>& vertex_aps) {
  if (vertex_aps.empty()) return 1.0;
  return std::accumulate(vertex_aps.begin(), vertex_aps.end(), 0.0) /
         static_cast<double>(vertex_aps.size());
}

double top_ll(std::span<const PredictionRecord> preds, std::span<const SceneRecord> gts,
              const DetMatchConfig& cfg) {
  std::vector<double> aps;
  for (const auto& [pred, gt] : aligned_predictions(preds, gts)) {
    const auto v = top_ll_vertex_aps(pred->ll_prob, *gt, match_for_topology(pred->detections, *gt, cfg));
    aps.insert(aps.end(), v.begin(), v.end());
  }
  return top_score(aps);
}

double top_lt(std::span<const PredictionRecord> preds, std::span<const SceneRecord> gts,
              const DetMatchConfig& cfg) {
  std::vector<double> aps;
  for (const auto& [pred, gt] : aligned_predictions(preds, gts)) {
    const auto v = top_lt_vertex_aps(pred->lt_prob, *gt, match_for_topology(pred->detections, *gt, cfg));
    aps.insert(aps.end(), v.begin(), v.end());
  }
  return top_score(aps);
}

double ols(double det_l, double det_t, double top_ll, double top_lt) {
  for (double v : {det_l, det_t, top_ll, top_lt}) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("ols: sub-scores must lie in [0,1]");
  }
  return 0.25 * (det_l + det_t + std::sqrt(top_ll) + std::sqrt(top_lt));
}

MetricReport evaluate(std::span<const PredictionRecord> preds, std::span<const SceneRecord> gts,
                      const DetMatchConfig& cfg) {
  validate(cfg);
  MetricReport report;
  const LaneDetection lanes = det_l_impl(preds, gts, cfg);
  const TrafficDetection traffic = det_t_impl(preds, gts, cfg);
  std::vector<double> ll_aps, lt_aps;
  for (const auto& [pred, gt] : aligned_predictions(preds, gts)) {
    const TopologyMatch match = match_for_topology(pred->detections, *gt, cfg);
    const auto ll = top_ll_vertex_aps(pred->ll_prob, *gt, match);
    const auto lt = top_lt_vertex_aps(pred->lt_prob, *gt, match);
    ll_aps.insert(ll_aps.end(), ll.begin(), ll.end());
    lt_aps.insert(lt_aps.end(), lt.begin(), lt.end());
  }
  report.det_l = lanes.score;
  report.det_t = traffic.score;
  report.top_ll = top_score(ll_aps);
  report.top_lt = top_score(lt_aps);
  report.ols = ols(report.det_l, report.det_t, report.top_ll, report.top_lt);
  report.det_l_per_threshold = lanes.per_threshold;
  report.det_t_per_attribute = traffic.per_attribute;
  report.scene_count = gts.size();
  return report;
}

MetricReport evaluate_files(const std::string& predictions_path, const std::string& gt_path,
                            const DetMatchConfig& cfg, const dataio::FormatConfig& format) {
  const auto preds = dataio::load_predictions(predictions_path, format);
  const auto gts = dataio::load_scenes(gt_path, format);
  return evaluate(preds, gts, cfg);
}

}  // namespace lanetopo::metrics
