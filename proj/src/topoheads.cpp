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
#include "lanetopo/topoheads.hpp"

#include <cmath>
#include <set>
#include <string>

#include "lanetopo/errors.hpp"

namespace lanetopo::topoheads {

namespace {

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

// W[:, offset:offset+x.size()] x, without bias.
std::vector<double> partial_matvec(const Linear& layer, std::size_t offset, std::span<const double> x) {
  std::vector<double> y(layer.out, 0.0);
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double* row = layer.weight.data() + o * layer.in + offset;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += row[i] * x[i];
    y[o] = s;
  }
  return y;
}

// Accumulates the first-layer weight gradient for a column block and returns
// W[:, offset:offset+width]^T d.
void partial_backward(const Linear& layer, Linear& grad, std::size_t offset,
                      std::span<const double> x, std::span<const double> d,
                      std::span<double> x_grad) {
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double dv = d[o];
    if (dv == 0.0) continue;
    const double* row = layer.weight.data() + o * layer.in + offset;
    double* grow = grad.weight.data() + o * layer.in + offset;
    for (std::size_t i = 0; i < x.size(); ++i) {
      grow[i] += dv * x[i];
      x_grad[i] += row[i] * dv;
    }
  }
}

// Pair heads split their first layer so that per-entity projections are
// computed once: pre = A_i + B_j + b. The remaining layers (the "tail") run
// per pair on rectified `pre`.
struct PairEval {
  std::vector<double> pre;
  MlpCache tail_cache;
  double logit = 0.0;
};

void pair_forward(const MlpParams& head, std::span<const double> a, std::span<const double> b,
                  PairEval& ev, bool keep_cache) {
  const Linear& first = head.layers.front();
  ev.pre.resize(first.out);
  for (std::size_t o = 0; o < first.out; ++o) ev.pre[o] = a[o] + b[o] + first.bias[o];
  if (head.layers.size() == 1) {
    ev.logit = ev.pre[0];
    return;
  }
  std::vector<double> hidden(ev.pre.size());
  for (std::size_t o = 0; o < hidden.size(); ++o) hidden[o] = ev.pre[o] < 0.0 ? 0.0 : ev.pre[o];
  const std::span<const Linear> tail(head.layers.data() + 1, head.layers.size() - 1);
  ev.logit = mlp_apply(tail, hidden, keep_cache ? &ev.tail_cache : nullptr)[0];
}

// Returns d loss / d pre for the pair and accumulates tail and first-layer
// bias gradients.
std::vector<double> pair_backward(const MlpParams& head, MlpParams& grad, const PairEval& ev,
                                  double dlogit) {
  std::vector<double> dpre;
  if (head.layers.size() == 1) {
    dpre = {dlogit};
  } else {
    const std::span<const Linear> tail(head.layers.data() + 1, head.layers.size() - 1);
    const std::span<Linear> gtail(grad.layers.data() + 1, grad.layers.size() - 1);
    const double out_grad[1] = {dlogit};
    dpre = mlp_backward_into(tail, ev.tail_cache, out_grad, gtail);
    for (std::size_t o = 0; o < dpre.size(); ++o) {
      if (!(ev.pre[o] > 0.0)) dpre[o] = 0.0;
    }
  }
  for (std::size_t o = 0; o < dpre.size(); ++o) grad.layers.front().bias[o] += dpre[o];
  return dpre;
}

void accumulate(std::vector<double>& acc, const std::vector<double>& v) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

void check_head_shape(const MlpParams& head, std::size_t in, const char* what) {
  if (head.layers.empty() || head.input_width() != in || head.output_width() != 1) {
    throw DomainError(std::string(what) + ": head shape does not match the features");
  }
}

}  // namespace

void validate(const HeadConfig& cfg) {
  if (cfg.feature_width == 0) throw ConfigError("feature width C must be > 0");
  if (cfg.control_points < 2) throw ConfigError("control_points must be >= 2");
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(cfg.lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (!(cfg.coord_scale > 0.0)) throw ConfigError("coord_scale must be > 0");
  if (!(cfg.image_width > 0.0 && cfg.image_height > 0.0)) throw ConfigError("image extent must be > 0");
  if (cfg.detector_feature_width && *cfg.detector_feature_width == 0) {
    throw ConfigError("detector_feature_width must be > 0 when set");
  }
}

TopoHeadParams init_params(const HeadConfig& cfg) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, {0x1417}));
  const std::size_t c = cfg.feature_width;
  const std::size_t h = cfg.hidden();
  const std::size_t coord_in = 3 * cfg.control_points;
  TopoHeadParams p;
  p.config = cfg;
  const std::size_t coord_w[] = {coord_in, c, c};
  const std::size_t feat_w[] = {cfg.lane_feature_input_width(), c, c};
  const std::size_t traffic_w[] = {kTrafficInputWidth, c, c};
  const std::size_t ll_w[] = {2 * c, h, 1};
  const std::size_t lt_w[] = {c, h, 1};
  p.coord_embedder = make_mlp(coord_w, rng);
  p.feat_embedder = make_mlp(feat_w, rng);
  p.traffic_embedder = make_mlp(traffic_w, rng);
  p.ll_head = make_mlp(ll_w, rng);
  p.lt_head = make_mlp(lt_w, rng);
  return p;
}

TopoHeadParams zeros_like(const TopoHeadParams& params) {
  TopoHeadParams z;
  z.config = params.config;
  z.coord_embedder = topoheads::zeros_like(params.coord_embedder);
  z.feat_embedder = topoheads::zeros_like(params.feat_embedder);
  z.traffic_embedder = topoheads::zeros_like(params.traffic_embedder);
  z.ll_head = topoheads::zeros_like(params.ll_head);
  z.lt_head = topoheads::zeros_like(params.lt_head);
  return z;
}

std::vector<std::span<double>> parameter_views(TopoHeadParams& params) {
  std::vector<std::span<double>> views;
  for (MlpParams* mlp : {&params.coord_embedder, &params.feat_embedder, &params.traffic_embedder,
                         &params.ll_head, &params.lt_head}) {
    for (auto& layer : mlp->layers) {
      views.emplace_back(layer.weight);
      views.emplace_back(layer.bias);
    }
  }
  return views;
}

std::vector<std::span<const double>> parameter_views(const TopoHeadParams& params) {
  std::vector<std::span<const double>> views;
  for (const MlpParams* mlp : {&params.coord_embedder, &params.feat_embedder,
                               &params.traffic_embedder, &params.ll_head, &params.lt_head}) {
    for (const auto& layer : mlp->layers) {
      views.emplace_back(layer.weight);
      views.emplace_back(layer.bias);
    }
  }
  return views;
}

std::size_t parameter_count(const TopoHeadParams& params) {
  std::size_t total = 0;
  for (const auto& v : parameter_views(params)) total += v.size();
  return total;
}

void check_params(const TopoHeadParams& p) {
  const HeadConfig& cfg = p.config;
  const std::size_t c = cfg.feature_width;
  check_mlp(p.coord_embedder, 3 * cfg.control_points, c, "coord_embedder");
  check_mlp(p.feat_embedder, cfg.lane_feature_input_width(), c, "feat_embedder");
  check_mlp(p.traffic_embedder, kTrafficInputWidth, c, "traffic_embedder");
  check_mlp(p.ll_head, 2 * c, 1, "ll_head");
  check_mlp(p.lt_head, c, 1, "lt_head");
}

std::vector<double> lane_coord_input(const PredLane& lane, const HeadConfig& cfg) {
  if (lane.ctrl.size() != cfg.control_points) {
    throw DomainError("lane has " + std::to_string(lane.ctrl.size()) +
                      " control points, heads expect " + std::to_string(cfg.control_points));
  }
  std::vector<double> x;
  x.reserve(3 * lane.ctrl.size());
  for (const auto& pt : lane.ctrl.points) {
    x.push_back(pt.x / cfg.coord_scale);
    x.push_back(pt.y / cfg.coord_scale);
    x.push_back(pt.z / cfg.coord_scale);
  }
  return x;
}

std::vector<double> lane_feature_input(const PredLane& lane, const HeadConfig& cfg) {
  if (cfg.detector_feature_width) {
    if (!lane.feature || lane.feature->size() != *cfg.detector_feature_width) {
      throw DomainError("lane feature width mismatch: heads expect " +
                        std::to_string(*cfg.detector_feature_width));
    }
    return *lane.feature;
  }
  std::vector<double> x = lane_coord_input(lane, cfg);
  x.push_back(lane.class_score);
  return x;
}

std::vector<double> traffic_input(const TrafficElement& te, const HeadConfig& cfg) {
  std::vector<double> x(kTrafficInputWidth, 0.0);
  x[0] = te.box.x1 / cfg.image_width;
  x[1] = te.box.y1 / cfg.image_height;
  x[2] = te.box.x2 / cfg.image_width;
  x[3] = te.box.y2 / cfg.image_height;
  if (te.category < 0 || te.category >= dataio::kTrafficCategoryCount) {
    throw DomainError("traffic category outside [0,12]");
  }
  x[4 + static_cast<std::size_t>(te.category)] = 1.0;
  x[kTrafficInputWidth - 1] = te.confidence;
  return x;
}

std::vector<double> embed_lane(const PredLane& lane, const TopoHeadParams& params) {
  const auto coord = mlp_apply(params.coord_embedder.layers, lane_coord_input(lane, params.config), nullptr);
  const auto feat = mlp_apply(params.feat_embedder.layers, lane_feature_input(lane, params.config), nullptr);
  return add(coord, feat);
}

std::vector<double> embed_traffic(const TrafficElement& te, const TopoHeadParams& params) {
  return mlp_apply(params.traffic_embedder.layers, traffic_input(te, params.config), nullptr);
}

Matrix ll_logits(std::span<const std::vector<double>> lane_feats, const TopoHeadParams& params) {
  const std::size_t n = lane_feats.size();
  const std::size_t c = params.config.feature_width;
  Matrix out(n, n);
  if (n == 0) return out;
  check_head_shape(params.ll_head, 2 * c, "ll_logits");
  const Linear& first = params.ll_head.layers.front();
  std::vector<std::vector<double>> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = partial_matvec(first, 0, lane_feats[i]);
    b[i] = partial_matvec(first, c, lane_feats[i]);
  }
  PairEval ev;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      pair_forward(params.ll_head, a[i], b[j], ev, false);
      out(i, j) = ev.logit;
    }
  }
  return out;
}

Matrix lt_logits(std::span<const std::vector<double>> lane_feats,
                 std::span<const std::vector<double>> traffic_feats, const TopoHeadParams& params) {
  const std::size_t n = lane_feats.size();
  const std::size_t t = traffic_feats.size();
  Matrix out(n, t);
  if (n == 0 || t == 0) return out;
  check_head_shape(params.lt_head, params.config.feature_width, "lt_logits");
  const Linear& first = params.lt_head.layers.front();
  std::vector<std::vector<double>> a(n), e(t);
  for (std::size_t i = 0; i < n; ++i) a[i] = partial_matvec(first, 0, lane_feats[i]);
  for (std::size_t k = 0; k < t; ++k) e[k] = partial_matvec(first, 0, traffic_feats[k]);
  PairEval ev;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < t; ++k) {
      pair_forward(params.lt_head, a[i], e[k], ev, false);
      out(i, k) = ev.logit;
    }
  }
  return out;
}

SceneAssignment match_scene(const DetectionRecord& det, const SceneRecord& scene,
                            const assoc::CostConfig& cfg) {
  return {assoc::match_for_training(det.lanes, scene.lanes, cfg),
          assoc::match_traffic_for_training(det.traffic, scene.traffic, cfg)};
}

TopologyLabels project_labels(const SceneAssignment& assignment, const SceneRecord& scene,
                              std::size_t n, std::size_t t) {
  TopologyLabels labels{Matrix(n, n), Matrix(n, t)};
  std::vector<std::optional<int>> lane_gt(n), traffic_gt(t);
  for (const auto& [p, g] : assignment.lanes.pairs) {
    if (p >= n || g >= scene.lanes.size()) throw DomainError("project_labels: lane index out of range");
    lane_gt[p] = scene.lanes[g].id;
  }
  for (const auto& [p, g] : assignment.traffic.pairs) {
    if (p >= t || g >= scene.traffic.size()) {
      throw DomainError("project_labels: traffic index out of range");
    }
    traffic_gt[p] = scene.traffic[g].id;
  }
  const std::set<dataio::Edge> ll(scene.topo_ll.begin(), scene.topo_ll.end());
  const std::set<dataio::Edge> lt(scene.topo_lt.begin(), scene.topo_lt.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (!lane_gt[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && lane_gt[j] && ll.count({*lane_gt[i], *lane_gt[j]})) labels.ll(i, j) = 1.0;
    }
    for (std::size_t k = 0; k < t; ++k) {
      if (traffic_gt[k] && lt.count({*lane_gt[i], *traffic_gt[k]})) labels.lt(i, k) = 1.0;
    }
  }
  return labels;
}

SceneLoss scene_loss(const DetectionRecord& det, const TopologyLabels& labels,
                     const TopoHeadParams& params, TopoHeadParams* grads) {
  const HeadConfig& cfg = params.config;
  const std::size_t n = det.lanes.size();
  const std::size_t t = det.traffic.size();
  const std::size_t c = cfg.feature_width;
  if (labels.ll.rows != n || labels.ll.cols != n || labels.lt.rows != n || labels.lt.cols != t) {
    throw DomainError("scene_loss: label shape does not match detections");
  }
  const bool want_grad = grads != nullptr;

  std::vector<MlpCache> coord_cache(n), feat_cache(n), traffic_cache(t);
  std::vector<std::vector<double>> f(n), e(t);
  for (std::size_t i = 0; i < n; ++i) {
    const auto coord = mlp_apply(params.coord_embedder.layers, lane_coord_input(det.lanes[i], cfg),
                                 want_grad ? &coord_cache[i] : nullptr);
    const auto feat = mlp_apply(params.feat_embedder.layers, lane_feature_input(det.lanes[i], cfg),
                                want_grad ? &feat_cache[i] : nullptr);
    f[i] = add(coord, feat);
  }
  for (std::size_t k = 0; k < t; ++k) {
    e[k] = mlp_apply(params.traffic_embedder.layers, traffic_input(det.traffic[k], cfg),
                     want_grad ? &traffic_cache[k] : nullptr);
  }

  SceneLoss loss;
  std::vector<std::vector<double>> df(n, std::vector<double>(c, 0.0));
  std::vector<std::vector<double>> de(t, std::vector<double>(c, 0.0));
  PairEval ev;

  if (n >= 2) {
    const MlpParams& head = params.ll_head;
    check_head_shape(head, 2 * c, "scene_loss");
    const Linear& first = head.layers.front();
    std::vector<std::vector<double>> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = partial_matvec(first, 0, f[i]);
      b[i] = partial_matvec(first, c, f[i]);
    }
    std::vector<std::vector<double>> da(n, std::vector<double>(first.out, 0.0));
    std::vector<std::vector<double>> db(n, std::vector<double>(first.out, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        pair_forward(head, a[i], b[j], ev, want_grad);
        const int target = labels.ll(i, j) > 0.5 ? 1 : 0;
        const FocalValue fv = focal_loss_logit(ev.logit, target, cfg.focal_alpha, cfg.focal_gamma);
        loss.ll += fv.loss;
        if (!want_grad) continue;
        const auto dpre = pair_backward(head, grads->ll_head, ev, fv.grad_logit);
        accumulate(da[i], dpre);
        accumulate(db[j], dpre);
      }
    }
    if (want_grad) {
      Linear& gfirst = grads->ll_head.layers.front();
      for (std::size_t i = 0; i < n; ++i) {
        partial_backward(first, gfirst, 0, f[i], da[i], df[i]);
        partial_backward(first, gfirst, c, f[i], db[i], df[i]);
      }
    }
  }

  if (n >= 1 && t >= 1) {
    const MlpParams& head = params.lt_head;
    check_head_shape(head, c, "scene_loss");
    const Linear& first = head.layers.front();
    std::vector<std::vector<double>> a(n), b(t);
    for (std::size_t i = 0; i < n; ++i) a[i] = partial_matvec(first, 0, f[i]);
    for (std::size_t k = 0; k < t; ++k) b[k] = partial_matvec(first, 0, e[k]);
    std::vector<std::vector<double>> da(n, std::vector<double>(first.out, 0.0));
    std::vector<std::vector<double>> db(t, std::vector<double>(first.out, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < t; ++k) {
        pair_forward(head, a[i], b[k], ev, want_grad);
        const int target = labels.lt(i, k) > 0.5 ? 1 : 0;
        const FocalValue fv = focal_loss_logit(ev.logit, target, cfg.focal_alpha, cfg.focal_gamma);
        loss.lt += fv.loss;
        if (!want_grad) continue;
        const auto dpre = pair_backward(head, grads->lt_head, ev, fv.grad_logit);
        accumulate(da[i], dpre);
        accumulate(db[k], dpre);
      }
    }
    if (want_grad) {
      Linear& gfirst = grads->lt_head.layers.front();
      for (std::size_t i = 0; i < n; ++i) partial_backward(first, gfirst, 0, f[i], da[i], df[i]);
      for (std::size_t k = 0; k < t; ++k) partial_backward(first, gfirst, 0, e[k], db[k], de[k]);
    }
  }

  if (want_grad) {
    for (std::size_t i = 0; i < n; ++i) {
      mlp_backward_into(params.coord_embedder.layers, coord_cache[i], df[i],
                        grads->coord_embedder.layers);
      mlp_backward_into(params.feat_embedder.layers, feat_cache[i], df[i],
                        grads->feat_embedder.layers);
    }
    for (std::size_t k = 0; k < t; ++k) {
      mlp_backward_into(params.traffic_embedder.layers, traffic_cache[k], de[k],
                        grads->traffic_embedder.layers);
    }
  }
  return loss;
}

void adamw_step(TopoHeadParams& params, const TopoHeadParams& grads, AdamWState& state,
                std::int64_t step, const HeadConfig& cfg) {
  const auto p = parameter_views(params);
  const auto g = parameter_views(grads);
  topoheads::adamw_step(p, g, state, step, cfg.adamw());
}

TopologyProbs predict(const DetectionRecord& det, const TopoHeadParams& params) {
  std::vector<std::vector<double>> f, e;
  for (const auto& lane : det.lanes) f.push_back(embed_lane(lane, params));
  for (const auto& te : det.traffic) e.push_back(embed_traffic(te, params));
  TopologyProbs probs{ll_logits(f, params), lt_logits(f, e, params)};
  for (std::size_t i = 0; i < probs.ll.rows; ++i) {
    for (std::size_t j = 0; j < probs.ll.cols; ++j) {
      probs.ll(i, j) = i == j ? 0.0 : sigmoid(probs.ll(i, j));
    }
  }
  for (double& v : probs.lt.data) v = sigmoid(v);
  return probs;
}

dataio::PredictionRecord predict_record(const DetectionRecord& det, const TopoHeadParams& params) {
  TopologyProbs probs = predict(det, params);
  return {det, std::move(probs.ll), std::move(probs.lt)};
}

}  // namespace lanetopo::topoheads
