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
// lanetopo command line front end.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lanetopo/dataio.hpp"
#include "lanetopo/detstrat.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/metrics.hpp"
#include "lanetopo/sweep.hpp"
#include "lanetopo/synthgen.hpp"
#include "lanetopo/topoheads.hpp"

namespace fs = std::filesystem;
using namespace lanetopo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = ".";
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

std::string out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

// Turns the JSON config object into command line tokens. Keys already given
// on the command line are skipped so that flags override the file.
std::vector<std::string> config_tokens(const std::string& path, const std::vector<std::string>& argv) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : argv) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  auto scalar = [&](const std::string& key, const nlohmann::ordered_json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) {
      std::ostringstream s;
      s << std::setprecision(17) << v.get<double>();
      return s.str();
    }
    throw ConfigError("config key '" + key + "' must be a string, number, boolean or array");
  };
  std::vector<std::string> tokens;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = key.rfind("--", 0) == 0 ? key : "--" + key;
    if (flag == "--config" || given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) joined += (joined.empty() ? "" : ",") + scalar(key, item);
      tokens.push_back(flag + "=" + joined);
      continue;
    }
    tokens.push_back(flag + "=" + scalar(key, value));
  }
  return tokens;
}

void add_noise_options(CLI::App* cmd, synthgen::NoiseModel& noise) {
  cmd->add_option("--ctrl-sigma", noise.ctrl_sigma, "Control-point jitter (m)");
  cmd->add_option("--box-sigma", noise.box_sigma, "Box corner jitter (px)");
  cmd->add_option("--drop-prob", noise.drop_prob, "Probability a true entity is deleted");
  cmd->add_option("--spurious-rate", noise.spurious_rate, "Expected false entities per scene");
  cmd->add_option("--confusion-prob", noise.confusion_prob, "Traffic category confusion probability");
  cmd->add_option("--conf-noise", noise.conf_noise, "Confidence perturbation width");
}

void add_match_options(CLI::App* cmd, metrics::DetMatchConfig& cfg) {
  cmd->add_option("--thresholds", cfg.lane_frechet_thresholds, "Lane Frechet thresholds (m)")
      ->delimiter(',');
  cmd->add_option("--iou", cfg.traffic_iou_threshold, "Traffic IoU threshold");
}

std::string dataset_file(const std::string& dir, const std::string& split, const std::string& kind) {
  return (fs::path(dir) / (split + "." + kind + ".jsonl")).string();
}

void require_seed(const CLI::App& app, const char* command) {
  if (app.count("--seed") == 0) throw ConfigError(std::string(command) + " requires --seed");
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  synthgen::GeneratorConfig gen;
  synthgen::NoiseModel noise;
  std::vector<double> split = {0.8, 0.1, 0.1};
};

int cmd_generate(const CLI::App& app, const Globals& g, GenerateArgs& a) {
  require_seed(app, "generate");
  a.gen.seed = g.seed;
  synthgen::split_sizes(a.gen.scenes, a.split);
  fs::create_directories(g.out);
  const auto files = synthgen::generate_dataset(a.gen, a.noise, a.split, g.out);
  for (const auto& f : files) std::cout << f.name << ": " << f.count << " scenes\n";
  return kExitOk;
}

// ---- corrupt --------------------------------------------------------------

struct CorruptArgs {
  std::string input;
  std::string output;
  synthgen::NoiseModel noise;
};

int cmd_corrupt(const CLI::App& app, const Globals& g, CorruptArgs& a) {
  require_seed(app, "corrupt");
  synthgen::validate(a.noise);
  const auto scenes = dataio::load_scenes(a.input);
  const auto dets = synthgen::corrupt_scenes(scenes, a.noise, g.seed);
  const std::string path = a.output.empty() ? out_path(g, "detections.jsonl") : a.output;
  dataio::save_detections(path, dets);
  std::cout << "wrote " << dets.size() << " detection records to " << path << '\n';
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string train_scenes, train_dets, val_scenes, val_dets;
  topoheads::HeadConfig head;
  std::size_t detector_feature_width = 0;
  bool resample = false;
  detstrat::ResampleConfig resample_cfg;
};

int cmd_train(const CLI::App& app, const Globals& g, TrainArgs& a) {
  require_seed(app, "train");
  a.head.seed = g.seed;
  if (a.detector_feature_width > 0) a.head.detector_feature_width = a.detector_feature_width;
  topoheads::validate(a.head);
  const std::string dir = a.data.empty() ? g.out : a.data;
  auto pick = [&](const std::string& given, const char* split, const char* kind) {
    return given.empty() ? dataset_file(dir, split, kind) : given;
  };
  dataio::FormatConfig fmt;
  fmt.control_points = a.head.control_points;
  fmt.query_budget = a.head.query_budget;
  fmt.feature_width = a.head.detector_feature_width;
  auto train_scenes = dataio::load_scenes(pick(a.train_scenes, "train", "scenes"), fmt);
  auto train_dets = dataio::load_detections(pick(a.train_dets, "train", "dets"), fmt);
  const auto val_scenes = dataio::load_scenes(pick(a.val_scenes, "val", "scenes"), fmt);
  const auto val_dets = dataio::load_detections(pick(a.val_dets, "val", "dets"), fmt);

  if (a.resample) {
    detstrat::validate(a.resample_cfg);
    const auto stats = detstrat::category_histogram(train_scenes);
    const auto plan = detstrat::resample_plan(train_scenes, stats, a.resample_cfg);
    std::vector<dataio::SceneRecord> scenes;
    std::vector<dataio::DetectionRecord> dets;
    std::vector<std::size_t> copies(train_scenes.size(), 0);
    for (std::size_t i : plan) {
      scenes.push_back(train_scenes[i]);
      dets.push_back(i < train_dets.size() ? train_dets[i] : dataio::DetectionRecord{});
      if (copies[i] > 0) {
        scenes.back().scene_id += "#" + std::to_string(copies[i]);
        dets.back().scene_id = scenes.back().scene_id;
      }
      ++copies[i];
    }
    std::cout << "resampled " << train_scenes.size() << " frames to " << scenes.size() << '\n';
    train_scenes = std::move(scenes);
    train_dets = std::move(dets);
  }

  const int epochs = a.head.epochs;
  const auto result = topoheads::train(
      train_scenes, train_dets, val_scenes, val_dets, a.head, [&](int epoch, const topoheads::EpochStats& s) {
        std::printf("epoch %d/%d  loss_ll %.6f  loss_lt %.6f  total %.6f  val %.6f\n", epoch, epochs, s.ll,
                    s.lt, s.total, s.val_total);
        std::fflush(stdout);
      });
  const std::string params_path = out_path(g, "params.json");
  topoheads::save_params(result.params, params_path);
  write_text(out_path(g, "stats.json"), topoheads::stats_to_json(result.stats) + "\n");
  std::cout << "wrote " << params_path << '\n';
  return kExitOk;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string params;
  std::string detections;
  std::string output;
};

int cmd_predict(const Globals& g, PredictArgs& a) {
  const auto params = topoheads::load_params(a.params);
  dataio::FormatConfig fmt;
  fmt.control_points = params.config.control_points;
  fmt.query_budget = params.config.query_budget;
  fmt.feature_width = params.config.detector_feature_width;
  const auto dets = dataio::load_detections(a.detections, fmt);
  std::vector<dataio::PredictionRecord> preds;
  preds.reserve(dets.size());
  for (const auto& det : dets) {
    if (!params.config.detector_feature_width) {
      for (const auto& lane : det.lanes) {
        if (lane.feature) {
          throw ValidationError("scene '" + det.scene_id +
                                "': detections carry features but the heads expect none");
        }
      }
    }
    preds.push_back(topoheads::predict_record(det, params));
  }
  const std::string path = a.output.empty() ? out_path(g, "predictions.jsonl") : a.output;
  dataio::save_predictions(path, preds);
  std::cout << "wrote " << preds.size() << " prediction records to " << path << '\n';
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string predictions;
  std::string gt;
  std::string output;
  metrics::DetMatchConfig match;
};

int cmd_evaluate(const Globals& g, EvaluateArgs& a) {
  metrics::validate(a.match);
  const auto report = metrics::evaluate_files(a.predictions, a.gt, a.match);
  const std::string path = a.output.empty() ? out_path(g, "report.json") : a.output;
  dataio::write_report(report, path);
  std::cout << dataio::format_report_table(report);
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string params;
  std::string gt;
  std::size_t seeds = 20;
  bool grid = false;
  std::vector<double> ctrl_sigmas = {0.0, 0.25, 0.5, 1.0};
  std::vector<double> drop_probs = {0.0, 0.1, 0.3};
  synthgen::NoiseModel base;
  metrics::DetMatchConfig match;
};

int cmd_sweep(const Globals& g, SweepArgs& a) {
  const auto params = topoheads::load_params(a.params);
  dataio::FormatConfig fmt;
  fmt.control_points = params.config.control_points;
  const auto scenes = dataio::load_scenes(a.gt, fmt);
  const auto levels =
      a.grid ? sweep::grid_levels(a.ctrl_sigmas, a.drop_probs, a.base) : sweep::default_levels(a.base);
  const auto rows = sweep::run_sweep(scenes, params, levels, a.seeds, g.seed, a.match);
  const std::string table = sweep::format_sweep_table(rows);
  write_text(out_path(g, "sweep.json"), sweep::sweep_to_json(rows) + "\n");
  write_text(out_path(g, "sweep.csv"), sweep::sweep_to_csv(rows));
  write_text(out_path(g, "sweep.txt"), table);
  std::cout << table;
  return kExitOk;
}

// ---- stats / resample -----------------------------------------------------

nlohmann::ordered_json histogram_json(const detstrat::CategoryStats& stats) {
  nlohmann::ordered_json doc;
  doc["total"] = stats.total;
  auto& cats = doc["categories"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < detstrat::kCategories; ++c) {
    cats.push_back({{"category", c},
                    {"name", std::string(dataio::traffic_category_name(static_cast<int>(c)))},
                    {"count", stats.counts[c]},
                    {"frequency", stats.frequency[c]}});
  }
  return doc;
}

struct StatsArgs {
  std::string input;
};

int cmd_stats(const Globals& g, StatsArgs& a) {
  const auto scenes = dataio::load_scenes(a.input);
  const auto stats = detstrat::category_histogram(scenes);
  auto doc = histogram_json(stats);
  doc["frames"] = scenes.size();
  write_text(out_path(g, "histogram.json"), doc.dump(2) + "\n");
  std::cout << "category          count  frequency (%)\n";
  for (std::size_t c = 0; c < detstrat::kCategories; ++c) {
    std::printf("%-16s %6zu  %13.2f\n", std::string(dataio::traffic_category_name(static_cast<int>(c))).c_str(),
                stats.counts[c], stats.frequency[c] * 100.0);
  }
  std::printf("%-16s %6zu\n", "total", stats.total);
  return kExitOk;
}

struct ResampleArgs {
  std::string input;
  std::string emit;
  detstrat::ResampleConfig cfg;
};

int cmd_resample(const Globals& g, ResampleArgs& a) {
  detstrat::validate(a.cfg);
  const auto scenes = dataio::load_scenes(a.input);
  const auto stats = detstrat::category_histogram(scenes);
  const auto plan = detstrat::resample_plan(scenes, stats, a.cfg);
  nlohmann::ordered_json doc;
  doc["freq_threshold"] = a.cfg.freq_threshold;
  doc["min_factor"] = a.cfg.min_factor;
  doc["max_factor"] = a.cfg.max_factor;
  doc["histogram"] = histogram_json(stats);
  auto& frames = doc["frames"] = nlohmann::ordered_json::array();
  std::size_t boosted = 0;
  for (const auto& scene : scenes) {
    const int factor = detstrat::frame_factor(scene, stats, a.cfg);
    frames.push_back({{"scene_id", scene.scene_id}, {"factor", factor}});
    boosted += factor > 1 ? 1 : 0;
  }
  const std::size_t total = plan.size();
  doc["resampled_frames"] = total;
  doc["plan"] = plan;
  write_text(out_path(g, "resample_plan.json"), doc.dump(2) + "\n");
  if (!a.emit.empty()) {
    std::vector<dataio::SceneRecord> out;
    std::vector<std::size_t> copies(scenes.size(), 0);
    for (std::size_t i : plan) {
      out.push_back(scenes[i]);
      if (copies[i] > 0) out.back().scene_id += "#" + std::to_string(copies[i]);
      ++copies[i];
    }
    dataio::save_scenes(a.emit, out);
  }
  std::cout << scenes.size() << " frames, " << boosted << " duplicated, " << total << " after resampling\n";
  return kExitOk;
}

// ---- tta-merge ------------------------------------------------------------

struct TtaArgs {
  std::vector<std::string> inputs;
  std::string output;
  detstrat::TtaConfig cfg;
};

int cmd_tta_merge(const Globals& g, TtaArgs& a) {
  if (a.inputs.size() != a.cfg.scales.size()) {
    throw ConfigError("tta-merge needs one --scales entry per input file");
  }
  detstrat::validate(a.cfg);
  std::vector<std::vector<dataio::DetectionRecord>> runs;
  for (const auto& path : a.inputs) runs.push_back(dataio::load_detections(path));
  for (const auto& run : runs) {
    if (run.size() != runs.front().size()) throw InputError("tta-merge inputs differ in record count");
  }
  // Lanes are carried over from the unit-scale run, or the first run.
  std::size_t lane_source = 0;
  for (std::size_t s = 0; s < a.cfg.scales.size(); ++s) {
    if (a.cfg.scales[s] == 1.0) {
      lane_source = s;
      break;
    }
  }
  std::vector<dataio::DetectionRecord> merged;
  for (std::size_t r = 0; r < runs.front().size(); ++r) {
    std::vector<detstrat::ScaledBoxes> per_scale;
    for (std::size_t s = 0; s < runs.size(); ++s) {
      if (runs[s][r].scene_id != runs.front()[r].scene_id) {
        throw InputError("tta-merge inputs disagree on scene order at record " + std::to_string(r + 1));
      }
      per_scale.push_back({a.cfg.scales[s], runs[s][r].traffic});
    }
    dataio::DetectionRecord out = runs[lane_source][r];
    out.traffic = detstrat::tta_merge(per_scale, a.cfg);
    merged.push_back(std::move(out));
  }
  const std::string path = a.output.empty() ? out_path(g, "merged.dets.jsonl") : a.output;
  dataio::save_detections(path, merged);
  std::cout << "merged " << runs.size() << " scales over " << merged.size() << " records into " << path << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lanetopo: lane topology reasoning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--config", g.config, "JSON file of flag values; command line flags take precedence");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate synthetic scenes and detections");
  generate->add_option("--scenes", gen.gen.scenes, "Number of scenes")->capture_default_str();
  generate->add_option("--split", gen.split, "train,val,test fractions")->delimiter(',');
  generate->add_option("--lanes-min", gen.gen.lanes_min);
  generate->add_option("--lanes-max", gen.gen.lanes_max);
  generate->add_option("--traffic-min", gen.gen.traffic_min);
  generate->add_option("--traffic-max", gen.gen.traffic_max);
  generate->add_option("--map-extent", gen.gen.map_extent);
  generate->add_option("--branch-prob", gen.gen.branch_prob);
  generate->add_option("--max-depth", gen.gen.max_depth);
  generate->add_option("--lt-assoc-prob", gen.gen.lt_assoc_prob);
  generate->add_option("--control-points", gen.gen.control_points);
  add_noise_options(generate, gen.noise);

  CorruptArgs corrupt_args;
  auto* corrupt = app.add_subcommand("corrupt", "Corrupt ground-truth scenes into detections");
  corrupt->add_option("--input", corrupt_args.input, "Scenes file")->required();
  corrupt->add_option("--output", corrupt_args.output, "Detections file");
  add_noise_options(corrupt, corrupt_args.noise);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the topology heads");
  train->add_option("--data", train_args.data, "Directory written by generate (defaults to --out)");
  train->add_option("--train-scenes", train_args.train_scenes);
  train->add_option("--train-dets", train_args.train_dets);
  train->add_option("--val-scenes", train_args.val_scenes);
  train->add_option("--val-dets", train_args.val_dets);
  train->add_option("--epochs", train_args.head.epochs)->capture_default_str();
  train->add_option("--lr", train_args.head.lr)->capture_default_str();
  train->add_option("--weight-decay", train_args.head.weight_decay);
  train->add_option("--feature-width", train_args.head.feature_width, "C");
  train->add_option("--hidden", train_args.head.mlp_hidden, "Hidden width of the pair heads (0 = C)");
  train->add_option("--control-points", train_args.head.control_points);
  train->add_option("--detector-feature-width", train_args.detector_feature_width,
                    "Width of detector features (0 = surrogate input)");
  train->add_option("--coord-scale", train_args.head.coord_scale);
  train->add_option("--focal-alpha", train_args.head.focal_alpha);
  train->add_option("--focal-gamma", train_args.head.focal_gamma);
  train->add_flag("--resample", train_args.resample, "Duplicate frames holding rare traffic categories");
  train->add_option("--freq-threshold", train_args.resample_cfg.freq_threshold);
  train->add_option("--min-factor", train_args.resample_cfg.min_factor);
  train->add_option("--max-factor", train_args.resample_cfg.max_factor);

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "Run trained heads over detections");
  predict->add_option("--params", predict_args.params)->required();
  predict->add_option("--detections", predict_args.detections)->required();
  predict->add_option("--output", predict_args.output, "Predictions file");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate->add_option("--predictions", eval_args.predictions)->required();
  evaluate->add_option("--gt", eval_args.gt, "Ground-truth scenes file")->required();
  evaluate->add_option("--output", eval_args.output, "Report file");
  add_match_options(evaluate, eval_args.match);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Corrupt, predict and evaluate over noise levels");
  sweep_cmd->add_option("--params", sweep_args.params)->required();
  sweep_cmd->add_option("--gt", sweep_args.gt, "Ground-truth scenes file")->required();
  sweep_cmd->add_option("--seeds", sweep_args.seeds, "Noise seeds per level")->capture_default_str();
  sweep_cmd->add_flag("--grid", sweep_args.grid, "Sweep the full ctrl-sigma x drop-prob grid");
  sweep_cmd->add_option("--ctrl-sigmas", sweep_args.ctrl_sigmas)->delimiter(',');
  sweep_cmd->add_option("--drop-probs", sweep_args.drop_probs)->delimiter(',');
  sweep_cmd->add_option("--box-sigma", sweep_args.base.box_sigma);
  sweep_cmd->add_option("--spurious-rate", sweep_args.base.spurious_rate);
  sweep_cmd->add_option("--confusion-prob", sweep_args.base.confusion_prob);
  sweep_cmd->add_option("--conf-noise", sweep_args.base.conf_noise);
  add_match_options(sweep_cmd, sweep_args.match);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Traffic category histogram");
  stats->add_option("--input", stats_args.input, "Scenes file")->required();

  ResampleArgs resample_args;
  auto* resample = app.add_subcommand("resample", "Rare-category frame duplication plan");
  resample->add_option("--input", resample_args.input, "Scenes file")->required();
  resample->add_option("--emit", resample_args.emit, "Also write the resampled scenes here");
  resample->add_option("--freq-threshold", resample_args.cfg.freq_threshold);
  resample->add_option("--min-factor", resample_args.cfg.min_factor);
  resample->add_option("--max-factor", resample_args.cfg.max_factor);

  TtaArgs tta_args;
  auto* tta = app.add_subcommand("tta-merge", "Fuse multi-scale traffic detections");
  tta->add_option("--inputs", tta_args.inputs, "Detection files, one per scale")->delimiter(',')->required();
  tta->add_option("--scales", tta_args.cfg.scales, "Scale of each input")->delimiter(',');
  tta->add_option("--merge-iou", tta_args.cfg.merge_iou);
  tta->add_option("--output", tta_args.output, "Merged detections file");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      const auto extra = config_tokens(config_path, args);
      args.insert(args.end(), extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*generate) return cmd_generate(app, g, gen);
    if (*corrupt) return cmd_corrupt(app, g, corrupt_args);
    if (*train) return cmd_train(app, g, train_args);
    if (*predict) return cmd_predict(g, predict_args);
    if (*evaluate) return cmd_evaluate(g, eval_args);
    if (*sweep_cmd) return cmd_sweep(g, sweep_args);
    if (*stats) return cmd_stats(g, stats_args);
    if (*resample) return cmd_resample(g, resample_args);
    if (*tta) return cmd_tta_merge(g, tta_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid value: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TrainingError& e) {
    std::cerr << "training failed: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
