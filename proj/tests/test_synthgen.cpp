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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <unistd.h>

#include "lanetopo/dataio.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/metrics.hpp"
#include "lanetopo/synthgen.hpp"

using namespace lanetopo;
using namespace lanetopo::synthgen;
namespace fs = std::filesystem;

namespace {

GeneratorConfig config(std::size_t scenes, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.scenes = scenes;
  cfg.seed = seed;
  return cfg;
}

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("lanetopo_synth_" + std::to_string(::getpid())) / name;
  fs::create_directories(d);
  return d;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("single lane without branching") {
  auto cfg = config(1, 3);
  cfg.lanes_min = cfg.lanes_max = 1;
  cfg.branch_prob = 0.0;
  const auto s = generate_scene(cfg, 0);
  CHECK(s.lanes.size() == 1);
  CHECK(s.topo_ll.empty());
}

TEST_CASE("generation is deterministic per (seed, index)") {
  const auto cfg = config(5, 99);
  CHECK(dataio::to_json_line(generate_scene(cfg, 3)) == dataio::to_json_line(generate_scene(cfg, 3)));
  CHECK(generate_scene(cfg, 3) != generate_scene(cfg, 4));
  auto other = cfg;
  other.seed = 100;
  CHECK(generate_scene(cfg, 3) != generate_scene(other, 3));
}

TEST_CASE("forks: every non-terminal lane has at least two successors") {
  auto cfg = config(20, 5);
  cfg.branch_prob = 1.0;
  cfg.max_depth = 2;
  for (std::size_t i = 0; i < cfg.scenes; ++i) {
    const auto s = generate_scene(cfg, i);
    std::map<int, int> out_degree;
    for (const auto& [a, b] : s.topo_ll) ++out_degree[a];
    for (const auto& [lane, deg] : out_degree) CHECK(deg >= 2);
  }
}

TEST_CASE("generated scenes are valid and topologically sound") {
  const auto cfg = config(50, 6);
  for (const auto& s : generate_scenes(cfg)) {
    CHECK_NOTHROW(dataio::validate(s));
    CHECK(static_cast<int>(s.lanes.size()) >= cfg.lanes_min);
    CHECK(static_cast<int>(s.lanes.size()) <= cfg.lanes_max);
    CHECK(static_cast<int>(s.traffic.size()) >= cfg.traffic_min);
    CHECK(static_cast<int>(s.traffic.size()) <= cfg.traffic_max);
    std::set<dataio::Edge> edges(s.topo_ll.begin(), s.topo_ll.end());
    for (const auto& [a, b] : s.topo_ll) {
      CHECK(geometry::distance(s.lanes[a].ctrl.back(), s.lanes[b].ctrl.front()) == 0.0);
    }
    // Edges are exactly the construction-time shared endpoints.
    for (std::size_t i = 0; i < s.lanes.size(); ++i) {
      for (std::size_t j = 0; j < s.lanes.size(); ++j) {
        if (i == j) continue;
        if (s.lanes[i].ctrl.back() == s.lanes[j].ctrl.front()) {
          CHECK(edges.count({static_cast<int>(i), static_cast<int>(j)}) == 1);
        }
      }
    }
    // Every traffic element governs at least the lane it was spawned beside.
    std::set<int> governed;
    for (const auto& [lane, k] : s.topo_lt) governed.insert(k);
    CHECK(governed.size() == s.traffic.size());
  }
}

TEST_CASE("zero noise is the identity channel") {
  const auto scenes = generate_scenes(config(10, 7));
  const auto dets = corrupt_scenes(scenes, NoiseModel{}, 123);
  REQUIRE(dets.size() == scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    CHECK(dets[i].scene_id == scenes[i].scene_id);
    REQUIRE(dets[i].lanes.size() == scenes[i].lanes.size());
    for (std::size_t k = 0; k < scenes[i].lanes.size(); ++k) {
      CHECK(dets[i].lanes[k].ctrl == scenes[i].lanes[k].ctrl);
      CHECK(dets[i].lanes[k].class_score == 1.0);
    }
    CHECK(dets[i].traffic == scenes[i].traffic);
  }
}

TEST_CASE("drop_prob 1 empties the detections") {
  NoiseModel noise;
  noise.drop_prob = 1.0;
  for (const auto& d : corrupt_scenes(generate_scenes(config(5, 8)), noise, 1)) {
    CHECK(d.lanes.empty());
    CHECK(d.traffic.empty());
  }
}

TEST_CASE("control-point jitter has the half-normal mean") {
  auto cfg = config(80, 9);
  NoiseModel noise;
  noise.ctrl_sigma = 0.5;
  const auto scenes = generate_scenes(cfg);
  const auto dets = corrupt_scenes(scenes, noise, 10);
  double sum = 0.0;
  std::size_t n = 0, lanes = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    for (std::size_t k = 0; k < scenes[i].lanes.size(); ++k) {
      const auto& g = scenes[i].lanes[k].ctrl.points;
      const auto& p = dets[i].lanes[k].ctrl.points;
      for (std::size_t c = 0; c < g.size(); ++c) {
        sum += std::abs(p[c].x - g[c].x) + std::abs(p[c].y - g[c].y) + std::abs(p[c].z - g[c].z);
        n += 3;
      }
      ++lanes;
    }
  }
  REQUIRE(lanes >= 1000);
  const double expected = 0.5 * std::sqrt(2.0 / M_PI);
  CHECK(std::abs(sum / static_cast<double>(n) - expected) <= 0.05 * expected);
}

TEST_CASE("corruption is deterministic and confidences stay in range") {
  NoiseModel noise;
  noise.ctrl_sigma = 0.4;
  noise.box_sigma = 8.0;
  noise.drop_prob = 0.2;
  noise.spurious_rate = 3.0;
  noise.confusion_prob = 0.5;
  noise.conf_noise = 1.5;
  const auto scenes = generate_scenes(config(10, 11));
  const auto a = corrupt_scenes(scenes, noise, 5);
  CHECK(a == corrupt_scenes(scenes, noise, 5));
  CHECK(a != corrupt_scenes(scenes, noise, 6));
  for (const auto& d : a) CHECK_NOTHROW(dataio::validate(d));
}

TEST_CASE("expected DET_l does not increase along componentwise-ordered noise") {
  auto cfg = config(6, 12);
  const auto scenes = generate_scenes(cfg);
  const std::vector<std::pair<double, double>> chain = {{0.0, 0.0}, {0.2, 0.05}, {0.5, 0.2}, {1.0, 0.4}};
  std::vector<double> means;
  for (const auto& [sigma, drop] : chain) {
    NoiseModel noise;
    noise.ctrl_sigma = sigma;
    noise.drop_prob = drop;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      total += metrics::det_l(corrupt_scenes(scenes, noise, seed), scenes).score;
    }
    means.push_back(total / 20.0);
  }
  for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] <= means[i - 1]);
}

TEST_CASE("split sizes and configuration errors") {
  CHECK(split_sizes(10, {0.8, 0.1, 0.1}) == std::array<std::size_t, 3>{8, 1, 1});
  CHECK(split_sizes(200, {0.8, 0.1, 0.1}) == std::array<std::size_t, 3>{160, 20, 20});
  CHECK_THROWS_AS(split_sizes(10, {0.5, 0.6}), ConfigError);
  CHECK_THROWS_AS(split_sizes(10, {0.5, 0.6, 0.1}), ConfigError);
  CHECK_THROWS_AS(split_sizes(10, {1.0, 0.0, 0.0}), ConfigError);

  auto bad = config(1, 1);
  bad.branch_prob = 1.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = config(1, 1);
  bad.lanes_min = 5;
  bad.lanes_max = 4;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = config(1, 1);
  bad.map_extent = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  NoiseModel noise;
  noise.ctrl_sigma = -1.0;
  CHECK_THROWS_AS(validate(noise), ConfigError);
  noise = {};
  noise.drop_prob = 2.0;
  CHECK_THROWS_AS(validate(noise), ConfigError);
}

TEST_CASE("generate_dataset writes disjoint deterministic splits") {
  const auto cfg = config(10, 13);
  const auto a = generate_dataset(cfg, NoiseModel{}, {0.8, 0.1, 0.1}, temp_dir("a").string());
  const auto b = generate_dataset(cfg, NoiseModel{}, {0.8, 0.1, 0.1}, temp_dir("b").string());
  REQUIRE(a.size() == 3);
  CHECK(a[0].count == 8);
  CHECK(a[1].count == 1);
  CHECK(a[2].count == 1);
  std::set<std::string> ids;
  std::size_t total = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(read_all(a[s].scenes_path) == read_all(b[s].scenes_path));
    CHECK(read_all(a[s].detections_path) == read_all(b[s].detections_path));
    for (const auto& scene : dataio::load_scenes(a[s].scenes_path)) {
      ids.insert(scene.scene_id);
      ++total;
    }
  }
  CHECK(total == 10);
  CHECK(ids.size() == 10);
  std::set<std::string> generated;
  for (const auto& s : generate_scenes(cfg)) generated.insert(s.scene_id);
  CHECK(ids == generated);
  CHECK_THROWS_AS(generate_dataset(cfg, NoiseModel{}, {0.5, 0.6}, temp_dir("c").string()), ConfigError);
}
