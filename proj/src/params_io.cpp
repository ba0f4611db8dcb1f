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
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/topoheads.hpp"

namespace lanetopo::topoheads {

namespace {

using Json = nlohmann::ordered_json;

Json encode_mlp(const MlpParams& mlp) {
  Json layers = Json::array();
  for (const auto& layer : mlp.layers) {
    layers.push_back({{"in", layer.in}, {"out", layer.out}, {"weight", layer.weight}, {"bias", layer.bias}});
  }
  return layers;
}

MlpParams decode_mlp(const Json& j) {
  MlpParams mlp;
  for (const auto& l : j) {
    Linear layer;
    layer.in = l.at("in").get<std::size_t>();
    layer.out = l.at("out").get<std::size_t>();
    layer.weight = l.at("weight").get<std::vector<double>>();
    layer.bias = l.at("bias").get<std::vector<double>>();
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

}  // namespace

std::string params_to_json(const TopoHeadParams& p) {
  const HeadConfig& c = p.config;
  Json cfg;
  cfg["feature_width"] = c.feature_width;
  cfg["query_budget"] = c.query_budget;
  cfg["mlp_hidden"] = c.mlp_hidden;
  cfg["control_points"] = c.control_points;
  cfg["detector_feature_width"] = c.detector_feature_width ? Json(*c.detector_feature_width) : Json();
  cfg["coord_scale"] = c.coord_scale;
  cfg["image_width"] = c.image_width;
  cfg["image_height"] = c.image_height;
  cfg["epochs"] = c.epochs;
  cfg["lr"] = c.lr;
  cfg["focal_alpha"] = c.focal_alpha;
  cfg["focal_gamma"] = c.focal_gamma;
  cfg["weight_decay"] = c.weight_decay;
  cfg["adam_beta1"] = c.adam_beta1;
  cfg["adam_beta2"] = c.adam_beta2;
  cfg["adam_eps"] = c.adam_eps;
  cfg["seed"] = c.seed;
  cfg["match_w_cls"] = c.matching.w_cls;
  cfg["match_w_l1"] = c.matching.w_l1;
  cfg["match_focal_alpha"] = c.matching.focal_alpha;
  cfg["match_focal_gamma"] = c.matching.focal_gamma;

  Json j;
  j["format"] = "lanetopo.topo_heads";
  j["config"] = std::move(cfg);
  j["coord_embedder"] = encode_mlp(p.coord_embedder);
  j["feat_embedder"] = encode_mlp(p.feat_embedder);
  j["traffic_embedder"] = encode_mlp(p.traffic_embedder);
  j["ll_head"] = encode_mlp(p.ll_head);
  j["lt_head"] = encode_mlp(p.lt_head);
  return j.dump();
}

TopoHeadParams params_from_json(const std::string& text) {
  TopoHeadParams p;
  try {
    const Json j = Json::parse(text);
    const Json& c = j.at("config");
    HeadConfig& cfg = p.config;
    cfg.feature_width = c.at("feature_width").get<std::size_t>();
    cfg.query_budget = c.at("query_budget").get<std::size_t>();
    cfg.mlp_hidden = c.at("mlp_hidden").get<std::size_t>();
    cfg.control_points = c.at("control_points").get<std::size_t>();
    if (!c.at("detector_feature_width").is_null()) {
      cfg.detector_feature_width = c.at("detector_feature_width").get<std::size_t>();
    }
    cfg.coord_scale = c.at("coord_scale").get<double>();
    cfg.image_width = c.at("image_width").get<double>();
    cfg.image_height = c.at("image_height").get<double>();
    cfg.epochs = c.at("epochs").get<int>();
    cfg.lr = c.at("lr").get<double>();
    cfg.focal_alpha = c.at("focal_alpha").get<double>();
    cfg.focal_gamma = c.at("focal_gamma").get<double>();
    cfg.weight_decay = c.at("weight_decay").get<double>();
    cfg.adam_beta1 = c.at("adam_beta1").get<double>();
    cfg.adam_beta2 = c.at("adam_beta2").get<double>();
    cfg.adam_eps = c.at("adam_eps").get<double>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.matching.w_cls = c.at("match_w_cls").get<double>();
    cfg.matching.w_l1 = c.at("match_w_l1").get<double>();
    cfg.matching.focal_alpha = c.at("match_focal_alpha").get<double>();
    cfg.matching.focal_gamma = c.at("match_focal_gamma").get<double>();
    p.coord_embedder = decode_mlp(j.at("coord_embedder"));
    p.feat_embedder = decode_mlp(j.at("feat_embedder"));
    p.traffic_embedder = decode_mlp(j.at("traffic_embedder"));
    p.ll_head = decode_mlp(j.at("ll_head"));
    p.lt_head = decode_mlp(j.at("lt_head"));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("parameter file: ") + e.what(), 0);
  }
  check_params(p);
  return p;
}

void save_params(const TopoHeadParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << params_to_json(params) << '\n';
  if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

TopoHeadParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return params_from_json(buf.str());
}

}  // namespace lanetopo::topoheads
