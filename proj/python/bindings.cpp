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
// Python bindings for the lanetopo core. Records cross the boundary as JSON
// lines text so the Python side needs no mirror of the C++ types.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "lanetopo/assoc.hpp"
#include "lanetopo/dataio.hpp"
#include "lanetopo/detstrat.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/focal.hpp"
#include "lanetopo/geometry.hpp"
#include "lanetopo/metrics.hpp"
#include "lanetopo/synthgen.hpp"
#include "lanetopo/topoheads.hpp"

namespace py = pybind11;
using namespace lanetopo;

namespace {

using PyPoint = std::array<double, 3>;

geometry::ControlPolygon to_polygon(const std::vector<PyPoint>& pts) {
  geometry::ControlPolygon out;
  for (const auto& p : pts) out.points.push_back({p[0], p[1], p[2]});
  return out;
}

geometry::Polyline3 to_polyline(const std::vector<PyPoint>& pts) {
  geometry::Polyline3 out;
  for (const auto& p : pts) out.points.push_back({p[0], p[1], p[2]});
  return out;
}

std::vector<PyPoint> from_points(const std::vector<geometry::Point3>& pts) {
  std::vector<PyPoint> out;
  for (const auto& p : pts) out.push_back({p.x, p.y, p.z});
  return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols) throw DomainError("ragged cost matrix");
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

template <typename T>
std::string join_lines(const std::vector<T>& records) {
  std::string out;
  for (const auto& r : records) out += dataio::to_json_line(r) + "\n";
  return out;
}

std::vector<dataio::SceneRecord> parse_scenes(const std::string& text) {
  std::istringstream in(text);
  return dataio::read_scenes(in);
}

std::vector<dataio::DetectionRecord> parse_detections(const std::string& text) {
  std::istringstream in(text);
  return dataio::read_detections(in);
}

std::vector<dataio::PredictionRecord> parse_predictions(const std::string& text) {
  std::istringstream in(text);
  return dataio::read_predictions(in);
}

py::dict report_dict(const dataio::MetricReport& r) {
  py::dict d;
  d["det_l"] = r.det_l;
  d["det_t"] = r.det_t;
  d["top_ll"] = r.top_ll;
  d["top_lt"] = r.top_lt;
  d["ols"] = r.ols;
  d["scene_count"] = r.scene_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lane topology reasoning toolkit";

  auto value_error = py::module_::import("builtins").attr("ValueError");
  auto runtime_error = py::module_::import("builtins").attr("RuntimeError");
  py::register_exception<ConfigError>(m, "ConfigError", value_error);
  py::register_exception<ValidationError>(m, "ValidationError", value_error);
  py::register_exception<FormatError>(m, "FormatError", value_error);
  py::register_exception<InputError>(m, "InputError", value_error);
  py::register_exception<TrainingError>(m, "TrainingError", runtime_error);

  // geometry
  m.def(
      "bezier_point",
      [](const std::vector<PyPoint>& ctrl, double t) {
        const auto p = geometry::bezier_point(to_polygon(ctrl), t);
        return PyPoint{p.x, p.y, p.z};
      },
      py::arg("ctrl"), py::arg("t"));
  m.def(
      "sample_lane",
      [](const std::vector<PyPoint>& ctrl, std::size_t count) {
        return from_points(geometry::sample_lane(to_polygon(ctrl), count).points);
      },
      py::arg("ctrl"), py::arg("count") = geometry::kDefaultSamples);
  m.def(
      "frechet_distance",
      [](const std::vector<PyPoint>& a, const std::vector<PyPoint>& b) {
        return geometry::frechet_distance(to_polyline(a), to_polyline(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "box_iou",
      [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
        return geometry::box_iou({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
      },
      py::arg("a"), py::arg("b"));

  // assoc
  m.def(
      "hungarian_solve",
      [](const std::vector<std::vector<double>>& cost) {
        const Matrix c = to_matrix(cost);
        const auto a = assoc::hungarian_solve(c);
        return std::make_tuple(a.pairs, assoc::assignment_cost(c, a));
      },
      py::arg("cost"), "Optimal assignment: ([(row, col), ...], total cost).");
  m.def(
      "focal_loss",
      [](double prob, int target, double alpha, double gamma) {
        return topoheads::focal_loss(prob, target, alpha, gamma).loss;
      },
      py::arg("prob"), py::arg("target"), py::arg("alpha") = 0.25, py::arg("gamma") = 2.0);

  // metrics
  m.def("average_precision", &metrics::average_precision, py::arg("flags"), py::arg("num_gt"));
  m.def("ols", &metrics::ols, py::arg("det_l"), py::arg("det_t"), py::arg("top_ll"), py::arg("top_lt"));
  m.def(
      "evaluate",
      [](const std::string& predictions, const std::string& scenes) {
        return report_dict(metrics::evaluate(parse_predictions(predictions), parse_scenes(scenes)));
      },
      py::arg("predictions"), py::arg("scenes"), "Score prediction JSON lines against scene JSON lines.");
  m.def(
      "evaluate_files",
      [](const std::string& predictions_path, const std::string& gt_path) {
        return report_dict(metrics::evaluate_files(predictions_path, gt_path));
      },
      py::arg("predictions_path"), py::arg("gt_path"));

  // synthgen
  m.def(
      "generate_scenes",
      [](std::size_t scenes, std::uint64_t seed) {
        synthgen::GeneratorConfig cfg;
        cfg.scenes = scenes;
        cfg.seed = seed;
        return join_lines(synthgen::generate_scenes(cfg));
      },
      py::arg("scenes"), py::arg("seed"), "Scene JSON lines.");
  m.def(
      "corrupt_scenes",
      [](const std::string& scenes, std::uint64_t seed, double ctrl_sigma, double box_sigma,
         double drop_prob, double spurious_rate, double confusion_prob, double conf_noise) {
        synthgen::NoiseModel noise;
        noise.ctrl_sigma = ctrl_sigma;
        noise.box_sigma = box_sigma;
        noise.drop_prob = drop_prob;
        noise.spurious_rate = spurious_rate;
        noise.confusion_prob = confusion_prob;
        noise.conf_noise = conf_noise;
        return join_lines(synthgen::corrupt_scenes(parse_scenes(scenes), noise, seed));
      },
      py::arg("scenes"), py::arg("seed"), py::arg("ctrl_sigma") = 0.0, py::arg("box_sigma") = 0.0,
      py::arg("drop_prob") = 0.0, py::arg("spurious_rate") = 0.0, py::arg("confusion_prob") = 0.0,
      py::arg("conf_noise") = 0.0, "Detection JSON lines.");

  // topoheads
  m.def(
      "init_params",
      [](std::size_t feature_width, std::uint64_t seed) {
        topoheads::HeadConfig cfg;
        cfg.feature_width = feature_width;
        cfg.seed = seed;
        return topoheads::params_to_json(topoheads::init_params(cfg));
      },
      py::arg("feature_width") = 128, py::arg("seed") = 0, "Freshly initialized heads as JSON.");
  m.def(
      "train",
      [](const std::string& train_scenes, const std::string& train_dets, const std::string& val_scenes,
         const std::string& val_dets, int epochs, double lr, std::size_t feature_width, std::uint64_t seed) {
        topoheads::HeadConfig cfg;
        cfg.epochs = epochs;
        cfg.lr = lr;
        cfg.feature_width = feature_width;
        cfg.seed = seed;
        const auto ts = parse_scenes(train_scenes);
        const auto td = parse_detections(train_dets);
        const auto vs = parse_scenes(val_scenes);
        const auto vd = parse_detections(val_dets);
        topoheads::TrainResult result;
        {
          py::gil_scoped_release release;
          result = topoheads::train(ts, td, vs, vd, cfg);
        }
        std::vector<double> losses;
        for (const auto& e : result.stats.epochs) losses.push_back(e.total);
        return std::make_tuple(topoheads::params_to_json(result.params), losses);
      },
      py::arg("train_scenes"), py::arg("train_dets"), py::arg("val_scenes"), py::arg("val_dets"),
      py::arg("epochs") = 10, py::arg("lr") = 2e-4, py::arg("feature_width") = 128, py::arg("seed") = 0,
      "Returns (params JSON, per-epoch mean training loss).");
  m.def(
      "predict",
      [](const std::string& params_json, const std::string& detections) {
        const auto params = topoheads::params_from_json(params_json);
        std::vector<dataio::PredictionRecord> out;
        for (const auto& det : parse_detections(detections)) out.push_back(topoheads::predict_record(det, params));
        return join_lines(out);
      },
      py::arg("params_json"), py::arg("detections"), "Prediction JSON lines.");

  // detstrat
  m.def(
      "category_histogram",
      [](const std::string& scenes) {
        const auto s = parse_scenes(scenes);
        const auto stats = detstrat::category_histogram(s);
        return std::vector<std::size_t>(stats.counts.begin(), stats.counts.end());
      },
      py::arg("scenes"));
  m.def(
      "resample_plan",
      [](const std::string& scenes, double freq_threshold, int min_factor, int max_factor) {
        const auto s = parse_scenes(scenes);
        detstrat::ResampleConfig cfg{freq_threshold, min_factor, max_factor};
        detstrat::validate(cfg);
        return detstrat::resample_plan(s, detstrat::category_histogram(s), cfg);
      },
      py::arg("scenes"), py::arg("freq_threshold") = 0.10, py::arg("min_factor") = 5,
      py::arg("max_factor") = 20);
}
