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
#include "lanetopo/dataio.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"

#include "lanetopo/errors.hpp"
#include "lanetopo/metrics.hpp"

namespace lanetopo::dataio {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kTrafficCategoryCount> kCategoryNames = {
    "unknown-light", "red",          "green",      "yellow",    "go-straight",
    "turn-left",     "turn-right",   "no-left-turn", "no-right-turn", "u-turn",
    "no-u-turn",     "slight-left",  "slight-right"};

// ---- encoding ----

Json encode_ctrl(const ControlPolygon& ctrl) {
  Json arr = Json::array();
  for (const auto& p : ctrl.points) arr.push_back({p.x, p.y, p.z});
  return arr;
}

Json encode_traffic(const TrafficElement& te) {
  Json j;
  j["id"] = te.id;
  j["box"] = {te.box.x1, te.box.y1, te.box.x2, te.box.y2};
  j["category"] = te.category;
  j["confidence"] = te.confidence;
  return j;
}

Json encode_edges(const std::vector<Edge>& edges) {
  Json arr = Json::array();
  for (const auto& [a, b] : edges) arr.push_back({a, b});
  return arr;
}

Json encode_matrix(const Matrix& m) {
  Json arr = Json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    arr.push_back(std::move(row));
  }
  return arr;
}

Json encode(const SceneRecord& s) {
  Json j;
  j["scene_id"] = s.scene_id;
  Json lanes = Json::array();
  for (const auto& lane : s.lanes) {
    Json l;
    l["id"] = lane.id;
    l["ctrl"] = encode_ctrl(lane.ctrl);
    if (lane.category != 0) l["category"] = lane.category;
    lanes.push_back(std::move(l));
  }
  j["lanes"] = std::move(lanes);
  Json traffic = Json::array();
  for (const auto& te : s.traffic) traffic.push_back(encode_traffic(te));
  j["traffic"] = std::move(traffic);
  j["topo_ll"] = encode_edges(s.topo_ll);
  j["topo_lt"] = encode_edges(s.topo_lt);
  return j;
}

Json encode(const DetectionRecord& d) {
  Json j;
  j["scene_id"] = d.scene_id;
  Json lanes = Json::array();
  for (const auto& lane : d.lanes) {
    Json l;
    l["ctrl"] = encode_ctrl(lane.ctrl);
    l["class_score"] = lane.class_score;
    if (lane.feature) l["feature"] = *lane.feature;
    lanes.push_back(std::move(l));
  }
  j["lanes"] = std::move(lanes);
  Json traffic = Json::array();
  for (const auto& te : d.traffic) traffic.push_back(encode_traffic(te));
  j["traffic"] = std::move(traffic);
  return j;
}

Json encode(const PredictionRecord& p) {
  Json j = encode(p.detections);
  j["topo_ll_prob"] = encode_matrix(p.ll_prob);
  j["topo_lt_prob"] = encode_matrix(p.lt_prob);
  return j;
}

// ---- decoding ----
// Structural problems surface as nlohmann exceptions or std::invalid_argument
// and are converted to FormatError with a line number by the readers.

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw std::invalid_argument("expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + name + "'");
  return *it;
}

int as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw std::invalid_argument(std::string(what) + " must be an integer");
  return j.get<int>();
}

double as_real(const Json& j, const char* what) {
  if (!j.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
  return j.get<double>();
}

const Json& as_array(const Json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
  return j;
}

ControlPolygon decode_ctrl(const Json& j) {
  ControlPolygon ctrl;
  for (const auto& p : as_array(j, "ctrl")) {
    if (!p.is_array() || p.size() != 3) throw std::invalid_argument("ctrl points must be [x,y,z]");
    ctrl.points.push_back({as_real(p[0], "x"), as_real(p[1], "y"), as_real(p[2], "z")});
  }
  return ctrl;
}

TrafficElement decode_traffic(const Json& j) {
  TrafficElement te;
  te.id = as_int(field(j, "id"), "traffic id");
  const Json& box = as_array(field(j, "box"), "box");
  if (box.size() != 4) throw std::invalid_argument("box must be [x1,y1,x2,y2]");
  te.box = {as_real(box[0], "x1"), as_real(box[1], "y1"), as_real(box[2], "x2"),
            as_real(box[3], "y2")};
  te.category = as_int(field(j, "category"), "category");
  te.confidence = j.contains("confidence") ? as_real(j["confidence"], "confidence") : 1.0;
  return te;
}

std::vector<Edge> decode_edges(const Json& j, const char* what) {
  std::vector<Edge> edges;
  for (const auto& e : as_array(j, what)) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument(std::string(what) + " entries must be pairs");
    edges.emplace_back(as_int(e[0], what), as_int(e[1], what));
  }
  return edges;
}

Matrix decode_matrix(const Json& j, const char* what, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  as_array(j, what);
  if (j.size() != rows) throw std::invalid_argument(std::string(what) + " has wrong row count");
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = as_array(j[r], what);
    if (row.size() != cols) throw std::invalid_argument(std::string(what) + " has wrong column count");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = as_real(row[c], what);
  }
  return m;
}

SceneRecord decode_scene(const Json& j) {
  SceneRecord s;
  const Json& id = field(j, "scene_id");
  if (!id.is_string()) throw std::invalid_argument("scene_id must be a string");
  s.scene_id = id.get<std::string>();
  for (const auto& l : as_array(field(j, "lanes"), "lanes")) {
    GtLane lane;
    lane.id = as_int(field(l, "id"), "lane id");
    lane.ctrl = decode_ctrl(field(l, "ctrl"));
    lane.category = l.contains("category") ? as_int(l["category"], "lane category") : 0;
    s.lanes.push_back(std::move(lane));
  }
  for (const auto& t : as_array(field(j, "traffic"), "traffic")) s.traffic.push_back(decode_traffic(t));
  s.topo_ll = decode_edges(field(j, "topo_ll"), "topo_ll");
  s.topo_lt = decode_edges(field(j, "topo_lt"), "topo_lt");
  return s;
}

DetectionRecord decode_detection(const Json& j) {
  DetectionRecord d;
  const Json& id = field(j, "scene_id");
  if (!id.is_string()) throw std::invalid_argument("scene_id must be a string");
  d.scene_id = id.get<std::string>();
  for (const auto& l : as_array(field(j, "lanes"), "lanes")) {
    PredLane lane;
    lane.ctrl = decode_ctrl(field(l, "ctrl"));
    lane.class_score = as_real(field(l, "class_score"), "class_score");
    if (l.contains("feature") && !l["feature"].is_null()) {
      std::vector<double> feat;
      for (const auto& v : as_array(l["feature"], "feature")) feat.push_back(as_real(v, "feature"));
      lane.feature = std::move(feat);
    }
    d.lanes.push_back(std::move(lane));
  }
  for (const auto& t : as_array(field(j, "traffic"), "traffic")) d.traffic.push_back(decode_traffic(t));
  return d;
}

PredictionRecord decode_prediction(const Json& j) {
  PredictionRecord p;
  p.detections = decode_detection(j);
  const std::size_t n = p.detections.lanes.size();
  const std::size_t t = p.detections.traffic.size();
  p.ll_prob = decode_matrix(field(j, "topo_ll_prob"), "topo_ll_prob", n, n);
  p.lt_prob = decode_matrix(field(j, "topo_lt_prob"), "topo_lt_prob", n, t);
  return p;
}

// ---- validation ----

[[noreturn]] void fail(const std::string& scene_id, const std::string& what) {
  throw ValidationError("scene '" + scene_id + "': " + what);
}

void check_ctrl(const std::string& sid, const std::string& where, const ControlPolygon& ctrl,
                const FormatConfig& cfg) {
  if (ctrl.size() < 2 || (cfg.control_points != 0 && ctrl.size() != cfg.control_points)) {
    fail(sid, where + ".ctrl has " + std::to_string(ctrl.size()) + " points, expected " +
                  std::to_string(cfg.control_points));
  }
  for (const auto& p : ctrl.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      fail(sid, where + ".ctrl has a non-finite coordinate");
    }
  }
}

void check_traffic(const std::string& sid, const std::vector<TrafficElement>& traffic) {
  std::set<int> ids;
  for (const auto& te : traffic) {
    const std::string where = "traffic id " + std::to_string(te.id);
    if (!ids.insert(te.id).second) fail(sid, where + " is duplicated");
    if (!te.box.valid()) fail(sid, where + ".box is not a valid box (x1<x2, y1<y2)");
    if (te.category < 0 || te.category >= kTrafficCategoryCount) {
      fail(sid, where + ".category " + std::to_string(te.category) + " outside [0,12]");
    }
    if (!(te.confidence >= 0.0 && te.confidence <= 1.0)) {
      fail(sid, where + ".confidence " + std::to_string(te.confidence) + " outside [0,1]");
    }
  }
}

void check_probabilities(const std::string& sid, const char* what, const Matrix& m) {
  for (double v : m.data) {
    if (!(v >= 0.0 && v <= 1.0)) fail(sid, std::string(what) + " entry outside [0,1]");
  }
}

template <typename Record, typename Decode>
std::vector<Record> read_lines(std::istream& in, const FormatConfig& cfg, Decode decode) {
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Record rec;
    try {
      rec = decode(Json::parse(line));
    } catch (const Json::exception& e) {
      throw FormatError(e.what(), lineno);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what(), lineno);
    }
    try {
      validate(rec, cfg);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  if (in.bad()) throw std::runtime_error("read failure");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

template <typename Record>
void write_lines(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records) out << encode(r).dump() << '\n';
  if (!out) throw std::runtime_error("write failure");
}

template <typename Record>
void save_lines(const std::string& path, const std::vector<Record>& records) {
  auto out = open_out(path);
  write_lines(out, records);
  out.flush();
  if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

}  // namespace

std::string_view traffic_category_name(int category) {
  if (category < 0 || category >= kTrafficCategoryCount) return "invalid";
  return kCategoryNames[static_cast<std::size_t>(category)];
}

void validate(const SceneRecord& s, const FormatConfig& cfg) {
  const std::string& sid = s.scene_id;
  if (sid.empty()) fail(sid, "scene_id is empty");
  std::set<int> lane_ids;
  for (const auto& lane : s.lanes) {
    const std::string where = "lane id " + std::to_string(lane.id);
    if (!lane_ids.insert(lane.id).second) fail(sid, where + " is duplicated");
    if (lane.category != 0) fail(sid, where + ".category must be 0 (centerline)");
    check_ctrl(sid, where, lane.ctrl, cfg);
  }
  check_traffic(sid, s.traffic);
  std::set<int> traffic_ids;
  for (const auto& te : s.traffic) traffic_ids.insert(te.id);

  std::set<Edge> seen;
  for (const auto& [a, b] : s.topo_ll) {
    if (!lane_ids.count(a)) fail(sid, "topo_ll references missing lane id " + std::to_string(a));
    if (!lane_ids.count(b)) fail(sid, "topo_ll references missing lane id " + std::to_string(b));
    if (a == b) fail(sid, "topo_ll has self-edge on lane id " + std::to_string(a));
    if (!seen.insert({a, b}).second) fail(sid, "topo_ll edge duplicated");
  }
  seen.clear();
  for (const auto& [a, k] : s.topo_lt) {
    if (!lane_ids.count(a)) fail(sid, "topo_lt references missing lane id " + std::to_string(a));
    if (!traffic_ids.count(k)) fail(sid, "topo_lt references missing traffic id " + std::to_string(k));
    if (!seen.insert({a, k}).second) fail(sid, "topo_lt edge duplicated");
  }
}

void validate(const DetectionRecord& d, const FormatConfig& cfg) {
  const std::string& sid = d.scene_id;
  if (sid.empty()) fail(sid, "scene_id is empty");
  if (d.lanes.size() > cfg.query_budget) {
    fail(sid, "lanes has " + std::to_string(d.lanes.size()) + " entries, query budget is " +
                  std::to_string(cfg.query_budget));
  }
  std::optional<std::size_t> width = cfg.feature_width;
  for (std::size_t i = 0; i < d.lanes.size(); ++i) {
    const auto& lane = d.lanes[i];
    const std::string where = "lanes[" + std::to_string(i) + "]";
    check_ctrl(sid, where, lane.ctrl, cfg);
    if (!(lane.class_score >= 0.0 && lane.class_score <= 1.0)) {
      fail(sid, where + ".class_score " + std::to_string(lane.class_score) + " outside [0,1]");
    }
    if (lane.feature) {
      if (!width) width = lane.feature->size();
      if (lane.feature->size() != *width) {
        fail(sid, where + ".feature has width " + std::to_string(lane.feature->size()) +
                      ", expected " + std::to_string(*width));
      }
      for (double v : *lane.feature) {
        if (!std::isfinite(v)) fail(sid, where + ".feature has a non-finite entry");
      }
    }
  }
  check_traffic(sid, d.traffic);
}

void validate(const PredictionRecord& p, const FormatConfig& cfg) {
  validate(p.detections, cfg);
  const std::string& sid = p.detections.scene_id;
  const std::size_t n = p.detections.lanes.size();
  const std::size_t t = p.detections.traffic.size();
  if (p.ll_prob.rows != n || p.ll_prob.cols != n) fail(sid, "topo_ll_prob must be lanes x lanes");
  if (p.lt_prob.rows != n || p.lt_prob.cols != t) fail(sid, "topo_lt_prob must be lanes x traffic");
  check_probabilities(sid, "topo_ll_prob", p.ll_prob);
  check_probabilities(sid, "topo_lt_prob", p.lt_prob);
}

std::vector<SceneRecord> read_scenes(std::istream& in, const FormatConfig& cfg) {
  return read_lines<SceneRecord>(in, cfg, decode_scene);
}
std::vector<DetectionRecord> read_detections(std::istream& in, const FormatConfig& cfg) {
  return read_lines<DetectionRecord>(in, cfg, decode_detection);
}
std::vector<PredictionRecord> read_predictions(std::istream& in, const FormatConfig& cfg) {
  return read_lines<PredictionRecord>(in, cfg, decode_prediction);
}

void write_scenes(std::ostream& out, const std::vector<SceneRecord>& scenes) {
  write_lines(out, scenes);
}
void write_detections(std::ostream& out, const std::vector<DetectionRecord>& dets) {
  write_lines(out, dets);
}
void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& preds) {
  write_lines(out, preds);
}

std::vector<SceneRecord> load_scenes(const std::string& path, const FormatConfig& cfg) {
  auto in = open_in(path);
  return read_scenes(in, cfg);
}
std::vector<DetectionRecord> load_detections(const std::string& path, const FormatConfig& cfg) {
  auto in = open_in(path);
  return read_detections(in, cfg);
}
std::vector<PredictionRecord> load_predictions(const std::string& path, const FormatConfig& cfg) {
  auto in = open_in(path);
  return read_predictions(in, cfg);
}

void save_scenes(const std::string& path, const std::vector<SceneRecord>& scenes) {
  save_lines(path, scenes);
}
void save_detections(const std::string& path, const std::vector<DetectionRecord>& dets) {
  save_lines(path, dets);
}
void save_predictions(const std::string& path, const std::vector<PredictionRecord>& preds) {
  save_lines(path, preds);
}

std::string to_json_line(const SceneRecord& scene) { return encode(scene).dump(); }
std::string to_json_line(const DetectionRecord& det) { return encode(det).dump(); }
std::string to_json_line(const PredictionRecord& pred) { return encode(pred).dump(); }

// ---- reports ----

std::vector<std::string> report_warnings(const MetricReport& r) {
  std::vector<std::string> warnings;
  for (double v : {r.det_l, r.det_t, r.top_ll, r.top_lt, r.ols}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      warnings.emplace_back("score outside [0,1]");
      return warnings;
    }
  }
  const double expected = metrics::ols(r.det_l, r.det_t, r.top_ll, r.top_lt);
  if (std::abs(expected - r.ols) > 1e-9) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "ols " << r.ols
        << " inconsistent with sub-scores (recomputed " << expected << ")";
    warnings.push_back(msg.str());
  }
  return warnings;
}

std::string report_to_json(const MetricReport& r) {
  Json j;
  Json header;
  header["format"] = "lanetopo.report";
  header["version"] = 1;
  header["warnings"] = report_warnings(r);
  j["header"] = std::move(header);
  j["det_l"] = r.det_l;
  j["det_t"] = r.det_t;
  j["top_ll"] = r.top_ll;
  j["top_lt"] = r.top_lt;
  j["ols"] = r.ols;
  j["scene_count"] = r.scene_count;
  Json thr = Json::array();
  for (const auto& t : r.det_l_per_threshold) thr.push_back({{"threshold", t.threshold}, {"ap", t.ap}});
  j["det_l_per_threshold"] = std::move(thr);
  Json attr = Json::array();
  for (const auto& a : r.det_t_per_attribute) {
    attr.push_back({{"category", a.category},
                    {"name", std::string(traffic_category_name(a.category))},
                    {"ap", a.ap},
                    {"num_gt", a.num_gt},
                    {"num_pred", a.num_pred},
                    {"included", a.included}});
  }
  j["det_t_per_attribute"] = std::move(attr);
  return j.dump(2);
}

MetricReport report_from_json(const std::string& text) {
  MetricReport r;
  try {
    const Json j = Json::parse(text);
    r.det_l = as_real(field(j, "det_l"), "det_l");
    r.det_t = as_real(field(j, "det_t"), "det_t");
    r.top_ll = as_real(field(j, "top_ll"), "top_ll");
    r.top_lt = as_real(field(j, "top_lt"), "top_lt");
    r.ols = as_real(field(j, "ols"), "ols");
    r.scene_count = field(j, "scene_count").get<std::size_t>();
    for (const auto& t : as_array(field(j, "det_l_per_threshold"), "det_l_per_threshold")) {
      r.det_l_per_threshold.push_back({as_real(field(t, "threshold"), "threshold"),
                                       as_real(field(t, "ap"), "ap")});
    }
    for (const auto& a : as_array(field(j, "det_t_per_attribute"), "det_t_per_attribute")) {
      r.det_t_per_attribute.push_back({as_int(field(a, "category"), "category"),
                                       as_real(field(a, "ap"), "ap"),
                                       field(a, "num_gt").get<std::size_t>(),
                                       field(a, "num_pred").get<std::size_t>(),
                                       field(a, "included").get<bool>()});
    }
  } catch (const Json::exception& e) {
    throw FormatError(e.what(), 0);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what(), 0);
  }
  return r;
}

std::string format_report_table(const MetricReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "DET_l (%) | DET_t (%) | TOP_ll (%) | TOP_lt (%) | OLS (%)\n";
  out << std::setw(9) << r.det_l * 100.0 << " | " << std::setw(9) << r.det_t * 100.0 << " | "
      << std::setw(10) << r.top_ll * 100.0 << " | " << std::setw(10) << r.top_lt * 100.0 << " | "
      << std::setw(7) << r.ols * 100.0 << '\n';
  return out.str();
}

void write_report(const MetricReport& report, const std::string& path) {
  {
    auto out = open_out(path);
    out << report_to_json(report) << '\n';
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
  }
  auto table = open_out(path + ".txt");
  table << format_report_table(report);
  if (!table) throw std::runtime_error("write failure on '" + path + ".txt'");
}

MetricReport read_report(const std::string& path) {
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace lanetopo::dataio
