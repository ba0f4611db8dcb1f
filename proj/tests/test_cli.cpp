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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "lanetopo/dataio.hpp"
#include "lanetopo/topoheads.hpp"

namespace fs = std::filesystem;
using namespace lanetopo;

namespace {

std::string cli() {
  const char* path = std::getenv("LANETOPO_CLI");
  return path ? path : "lanetopo";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lanetopo_cli_" + std::to_string(getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("generate is deterministic and splits 8/1/1") {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  REQUIRE(run("generate --seed 3 --scenes 20 --out " + q(a)) == 0);
  REQUIRE(run("generate --seed 3 --scenes 20 --out " + q(b)) == 0);
  for (const char* f : {"train.scenes.jsonl", "val.scenes.jsonl", "test.scenes.jsonl", "train.dets.jsonl",
                        "test.dets.jsonl"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(line_count(a / "train.scenes.jsonl") == 16);
  CHECK(line_count(a / "val.scenes.jsonl") == 2);
  CHECK(line_count(a / "test.scenes.jsonl") == 2);
}

TEST_CASE("argument errors exit with status 2") {
  const auto d = scratch("args");
  CHECK(run("generate --seed 1 --scenes 10 --split 0.5,0.6 --out " + q(d)) == 2);
  CHECK(run("generate --scenes 10 --out " + q(d)) == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("evaluate --predictions " + q(d / "missing.jsonl") + " --gt " + q(d / "missing.jsonl")) == 1);
}

TEST_CASE("train, predict, evaluate") {
  const auto d = scratch("pipeline");
  REQUIRE(run("generate --seed 5 --scenes 20 --out " + q(d)) == 0);

  REQUIRE(run("train --seed 5 --epochs 1 --lr 0 --weight-decay 0 --feature-width 8 --out " + q(d)) == 0);
  topoheads::HeadConfig cfg;
  cfg.feature_width = 8;
  cfg.epochs = 1;
  cfg.lr = 0.0;
  cfg.weight_decay = 0.0;
  cfg.seed = 5;
  const auto params = topoheads::load_params((d / "params.json").string());
  CHECK(params.coord_embedder == topoheads::init_params(cfg).coord_embedder);
  CHECK(params.ll_head == topoheads::init_params(cfg).ll_head);

  REQUIRE(run("train --seed 5 --epochs 2 --feature-width 8 --out " + q(d)) == 0);
  const std::string first = slurp(d / "params.json");
  const auto stats = nlohmann::json::parse(slurp(d / "stats.json"));
  CHECK(stats["epochs"].size() == 2);
  REQUIRE(run("train --seed 5 --epochs 2 --feature-width 8 --out " + q(d)) == 0);
  CHECK(slurp(d / "params.json") == first);

  REQUIRE(run("predict --params " + q(d / "params.json") + " --detections " + q(d / "test.dets.jsonl") +
              " --out " + q(d)) == 0);
  const auto preds = dataio::load_predictions((d / "predictions.jsonl").string());
  const auto dets = dataio::load_detections((d / "test.dets.jsonl").string());
  const auto trained = topoheads::load_params((d / "params.json").string());
  REQUIRE(preds.size() == dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto want = topoheads::predict_record(dets[i], trained);
    CHECK(preds[i].detections == want.detections);
    REQUIRE(preds[i].ll_prob.data.size() == want.ll_prob.data.size());
    for (std::size_t k = 0; k < want.ll_prob.data.size(); ++k) {
      CHECK(preds[i].ll_prob.data[k] == doctest::Approx(want.ll_prob.data[k]).epsilon(1e-12));
    }
  }

  REQUIRE(run("evaluate --predictions " + q(d / "predictions.jsonl") + " --gt " + q(d / "test.scenes.jsonl") +
              " --out " + q(d)) == 0);
  const auto report = dataio::read_report((d / "report.json").string());
  CHECK(report.det_l == 1.0);
  CHECK(report.det_t == 1.0);
  CHECK(report.scene_count == 2);

  // Scene sets that do not line up.
  CHECK(run("evaluate --predictions " + q(d / "predictions.jsonl") + " --gt " + q(d / "val.scenes.jsonl") +
            " --out " + q(d)) == 2);
}

TEST_CASE("empty detections give empty predictions") {
  const auto d = scratch("empty");
  REQUIRE(run("generate --seed 2 --scenes 10 --out " + q(d)) == 0);
  REQUIRE(run("train --seed 2 --epochs 1 --feature-width 4 --out " + q(d)) == 0);
  std::ofstream(d / "none.jsonl").close();
  REQUIRE(run("predict --params " + q(d / "params.json") + " --detections " + q(d / "none.jsonl") +
              " --output " + q(d / "p.jsonl")) == 0);
  CHECK(line_count(d / "p.jsonl") == 0);
}

TEST_CASE("perfect predictions score 100") {
  const auto d = scratch("perfect");
  REQUIRE(run("generate --seed 9 --scenes 10 --out " + q(d)) == 0);
  const auto scenes = dataio::load_scenes((d / "test.scenes.jsonl").string());
  std::vector<dataio::PredictionRecord> preds;
  for (const auto& s : scenes) {
    dataio::PredictionRecord p;
    p.detections.scene_id = s.scene_id;
    for (const auto& l : s.lanes) p.detections.lanes.push_back({l.ctrl, 1.0, std::nullopt});
    p.detections.traffic = s.traffic;
    const std::size_t n = s.lanes.size(), t = s.traffic.size();
    p.ll_prob = Matrix(n, n);
    p.lt_prob = Matrix(n, t);
    auto lane_index = [&](int id) {
      for (std::size_t i = 0; i < n; ++i) {
        if (s.lanes[i].id == id) return i;
      }
      return n;
    };
    auto traffic_index = [&](int id) {
      for (std::size_t k = 0; k < t; ++k) {
        if (s.traffic[k].id == id) return k;
      }
      return t;
    };
    for (const auto& [a, b] : s.topo_ll) p.ll_prob(lane_index(a), lane_index(b)) = 1.0;
    for (const auto& [a, b] : s.topo_lt) p.lt_prob(lane_index(a), traffic_index(b)) = 1.0;
    preds.push_back(p);
  }
  dataio::save_predictions((d / "perfect.jsonl").string(), preds);
  REQUIRE(run("evaluate --predictions " + q(d / "perfect.jsonl") + " --gt " + q(d / "test.scenes.jsonl") +
              " --output " + q(d / "r.json")) == 0);
  const auto r = dataio::read_report((d / "r.json").string());
  CHECK(r.ols == 1.0);
  CHECK(r.top_ll == 1.0);
  CHECK(r.top_lt == 1.0);
}

TEST_CASE("stats and resample") {
  const auto d = scratch("stats");
  REQUIRE(run("generate --seed 4 --scenes 30 --out " + q(d)) == 0);
  REQUIRE(run("stats --input " + q(d / "train.scenes.jsonl") + " --out " + q(d)) == 0);
  const auto hist = nlohmann::json::parse(slurp(d / "histogram.json"));
  CHECK(!hist.empty());
  REQUIRE(run("resample --input " + q(d / "train.scenes.jsonl") + " --emit " + q(d / "big.jsonl") +
              " --out " + q(d)) == 0);
  const auto plan = nlohmann::json::parse(slurp(d / "resample_plan.json"));
  CHECK(plan["plan"].size() == line_count(d / "big.jsonl"));
  CHECK(plan["plan"].size() >= 24);
}

TEST_CASE("config file values yield to command-line flags") {
  const auto d = scratch("config");
  std::ofstream(d / "cfg.json") << R"({"seed": 11, "scenes": 10, "split": [0.6, 0.2, 0.2]})";
  REQUIRE(run("--config " + q(d / "cfg.json") + " generate --out " + q(d)) == 0);
  CHECK(line_count(d / "train.scenes.jsonl") == 6);
  REQUIRE(run("--config " + q(d / "cfg.json") + " generate --scenes 20 --out " + q(d)) == 0);
  CHECK(line_count(d / "train.scenes.jsonl") == 12);
}

TEST_CASE("tta-merge over a single unit scale keeps distinct boxes") {
  const auto d = scratch("tta");
  REQUIRE(run("generate --seed 6 --scenes 10 --out " + q(d)) == 0);
  REQUIRE(run("tta-merge --inputs " + q(d / "test.dets.jsonl") + " --scales 1.0 --output " + q(d / "m.jsonl")) == 0);
  const auto merged = dataio::load_detections((d / "m.jsonl").string());
  const auto orig = dataio::load_detections((d / "test.dets.jsonl").string());
  REQUIRE(merged.size() == orig.size());
  for (std::size_t i = 0; i < orig.size(); ++i) CHECK(merged[i].lanes == orig[i].lanes);
  CHECK(run("tta-merge --inputs " + q(d / "test.dets.jsonl") + " --scales 2.0 --output " + q(d / "m.jsonl")) == 2);
}
