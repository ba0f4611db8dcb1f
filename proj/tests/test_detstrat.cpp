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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "lanetopo/detstrat.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/synthgen.hpp"

using namespace lanetopo;
using namespace lanetopo::detstrat;
using dataio::TrafficElement;

namespace {

TrafficElement te(int id, int category, double confidence = 1.0, geometry::Box2 box = {0, 0, 10, 10}) {
  return {id, box, category, confidence};
}

SceneRecord frame_with(const std::vector<int>& categories) {
  SceneRecord s;
  s.scene_id = "f";
  for (std::size_t k = 0; k < categories.size(); ++k) s.traffic.push_back(te(static_cast<int>(k), categories[k]));
  return s;
}

std::map<std::size_t, std::size_t> multiplicity(const std::vector<std::size_t>& plan) {
  std::map<std::size_t, std::size_t> m;
  for (std::size_t i : plan) ++m[i];
  return m;
}

std::vector<TrafficElement> random_boxes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(0.0, 200.0), size(10.0, 60.0), conf(0.0, 1.0);
  std::uniform_int_distribution<int> cat(0, 3);
  std::vector<TrafficElement> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = pos(rng), y = pos(rng);
    out.push_back(te(static_cast<int>(k), cat(rng), conf(rng), {x, y, x + size(rng), y + size(rng)}));
  }
  return out;
}

}  // namespace

TEST_CASE("category_histogram") {
  const auto none = category_histogram(std::vector<SceneRecord>{});
  CHECK(none.total == 0);
  for (std::size_t c = 0; c < kCategories; ++c) {
    CHECK(none.counts[c] == 0);
    CHECK(none.frequency[c] == 0.0);
  }

  const auto one = category_histogram(std::vector<SceneRecord>{frame_with({1})});
  CHECK(one.counts[1] == 1);
  CHECK(one.frequency[1] == 1.0);

  std::vector<int> cats;
  cats.insert(cats.end(), 5, 0);
  cats.insert(cats.end(), 2, 1);
  cats.insert(cats.end(), 2, 2);
  cats.insert(cats.end(), 1, 3);
  const auto skew = category_histogram(std::vector<SceneRecord>{frame_with(cats)});
  CHECK(skew.frequency[0] == doctest::Approx(0.5));
  CHECK(skew.frequency[1] == doctest::Approx(0.2));
  CHECK(skew.frequency[2] == doctest::Approx(0.2));
  CHECK(skew.frequency[3] == doctest::Approx(0.1));
  double sum = 0.0;
  for (double f : skew.frequency) sum += f;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("resample_plan examples") {
  // Four equally frequent categories: nothing is rare.
  const std::vector<SceneRecord> even = {frame_with({0, 1}), frame_with({2, 3})};
  CHECK(resample_plan(even, category_histogram(even), {}) == std::vector<std::size_t>{0, 1});

  // Category 3 is 1 of 200 annotations (0.005): round(0.10 / 0.005) = 20.
  std::vector<SceneRecord> rare;
  rare.push_back(frame_with({3, 0}));
  for (int i = 0; i < 99; ++i) rare.push_back(frame_with({0, 0}));
  auto stats = category_histogram(rare);
  REQUIRE(stats.total == 200);
  CHECK(frame_factor(rare[0], stats, {}) == 20);
  CHECK(multiplicity(resample_plan(rare, stats, {}))[0] == 20);

  // Category 5 at 0.05: round(2) clamped up to the minimum of 5.
  std::vector<SceneRecord> mild;
  for (int i = 0; i < 10; ++i) mild.push_back(frame_with({5, 0}));
  for (int i = 0; i < 90; ++i) mild.push_back(frame_with({0, 1}));
  stats = category_histogram(mild);
  REQUIRE(stats.frequency[5] == doctest::Approx(0.05));
  CHECK(frame_factor(mild[0], stats, {}) == 5);
  CHECK(frame_factor(mild[50], stats, {}) == 1);
}

TEST_CASE("several rare categories take the largest factor") {
  std::vector<SceneRecord> frames;
  frames.push_back(frame_with({3, 5}));
  for (int i = 0; i < 9; ++i) frames.push_back(frame_with({5, 0, 0, 0, 0, 1, 1, 2, 2, 2}));
  const auto stats = category_histogram(frames);
  ResampleConfig cfg;
  const int f3 = std::clamp(static_cast<int>(std::lround(0.1 / stats.frequency[3])), 5, 20);
  const int f5 = std::clamp(static_cast<int>(std::lround(0.1 / stats.frequency[5])), 5, 20);
  CHECK(frame_factor(frames[0], stats, cfg) == std::max(f3, f5));
}

TEST_CASE("resample_plan properties on generated data") {
  synthgen::GeneratorConfig gen;
  gen.scenes = 60;
  gen.seed = 4;
  auto frames = synthgen::generate_scenes(gen);
  const auto stats = category_histogram(frames);
  const auto plan = resample_plan(frames, stats, {});
  CHECK(plan.size() >= frames.size());
  CHECK(std::is_sorted(plan.begin(), plan.end()));
  const auto mult = multiplicity(plan);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    REQUIRE(mult.count(i) == 1);
    const std::size_t f = mult.at(i);
    CHECK((f == 1 || (f >= 5 && f <= 20)));
  }

  std::vector<std::size_t> perm(frames.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(2);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<SceneRecord> shuffled;
  for (std::size_t i : perm) shuffled.push_back(frames[i]);
  const auto mult2 = multiplicity(resample_plan(shuffled, category_histogram(shuffled), {}));
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(mult2.at(k) == mult.at(perm[k]));
}

TEST_CASE("resample config validation") {
  ResampleConfig cfg;
  cfg.min_factor = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.max_factor = 4;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("class_weight_map") {
  for (double w : class_weight_map({}, 2.0)) CHECK(w == 1.0);
  const auto left = class_weight_map({5, 7, 11}, 2.0);
  for (std::size_t c = 0; c < kCategories; ++c) CHECK(left[c] == ((c == 5 || c == 7 || c == 11) ? 2.0 : 1.0));
  for (double w : class_weight_map({1, 2, 3}, 1.0)) CHECK(w == 1.0);
  CHECK_THROWS_AS(class_weight_map({1}, 0.0), DomainError);
}

TEST_CASE("select_pseudo_labels") {
  const std::vector<TrafficElement> preds = {te(0, 1, 0.9), te(1, 2, 0.4), te(2, 3, 0.6), te(3, 4, 1.0)};
  PseudoConfig cfg;
  const auto half = select_pseudo_labels(preds, cfg);
  REQUIRE(half.size() == 3);
  CHECK(half[0].element == preds[0]);
  CHECK(half[1].element == preds[2]);
  CHECK(half[2].element == preds[3]);
  for (const auto& a : half) CHECK(a.loss_weight == 1.0);

  cfg.confidence_threshold = 1.0;
  const auto top = select_pseudo_labels(preds, cfg);
  REQUIRE(top.size() == 1);
  CHECK(top[0].element.id == 3);
  CHECK(select_pseudo_labels(std::vector<TrafficElement>{}, {}).empty());

  cfg.confidence_threshold = 1.5;
  CHECK_THROWS_AS(select_pseudo_labels(preds, cfg), ConfigError);
}

TEST_CASE("tta_merge examples") {
  const std::vector<TrafficElement> apart = {te(0, 1, 0.9, {0, 0, 10, 10}), te(1, 1, 0.8, {50, 50, 60, 60})};
  const auto same = tta_merge(std::vector<ScaledBoxes>{{1.0, apart}}, {});
  CHECK(same == apart);

  const std::vector<ScaledBoxes> doubled = {{1.0, {te(0, 2, 0.7, {10, 10, 30, 30})}},
                                            {2.0, {te(0, 2, 0.9, {20, 20, 60, 60})}}};
  const auto one = tta_merge(doubled, {});
  REQUIRE(one.size() == 1);
  CHECK(one[0].box == geometry::Box2{10, 10, 30, 30});
  CHECK(one[0].confidence == 0.9);

  // IoU of these two is 0.3.
  const std::vector<TrafficElement> low = {te(0, 1, 0.9, {0, 0, 13, 10}), te(1, 1, 0.8, {7, 0, 20, 10})};
  REQUIRE(geometry::box_iou(low[0].box, low[1].box) == doctest::Approx(0.3));
  CHECK(tta_merge(std::vector<ScaledBoxes>{{1.0, low}}, {}).size() == 2);

  // Different categories never suppress each other.
  const std::vector<TrafficElement> cross = {te(0, 1, 0.9), te(1, 2, 0.8)};
  CHECK(tta_merge(std::vector<ScaledBoxes>{{1.0, cross}}, {}).size() == 2);

  CHECK_THROWS_AS(tta_merge(std::vector<ScaledBoxes>{{0.0, cross}}, {}), DomainError);
}

TEST_CASE("tta_merge is idempotent and leaves no overlapping same-category pairs") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 4);
  const std::vector<double> scales = {0.7, 0.85, 1.0, 1.2, 1.4};
  TtaConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScaledBoxes> groups;
    for (int g = 0; g < 3; ++g) groups.push_back({scales[pick(rng)], random_boxes(rng, 12)});
    const auto merged = tta_merge(groups, cfg);
    for (std::size_t a = 0; a < merged.size(); ++a) {
      for (std::size_t b = a + 1; b < merged.size(); ++b) {
        if (merged[a].category == merged[b].category) {
          CHECK(geometry::box_iou(merged[a].box, merged[b].box) < cfg.merge_iou);
        }
      }
    }
    CHECK(tta_merge(std::vector<ScaledBoxes>{{1.0, merged}}, cfg) == merged);
  }
}

TEST_CASE("tta config validation") {
  TtaConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.scales = {0.5, 1.0};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.scales = {1.5};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.scales = {};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}
