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
#ifndef LANETOPO_TESTS_PIPELINE_HPP_
#define LANETOPO_TESTS_PIPELINE_HPP_

#include <cstdint>
#include <vector>

#include "lanetopo/metrics.hpp"
#include "lanetopo/synthgen.hpp"
#include "lanetopo/topoheads.hpp"

namespace pipeline {

using namespace lanetopo;

struct IdentityChannel {
  dataio::MetricReport fresh;
  dataio::MetricReport trained;
  topoheads::TrainResult result;
};

// Noiseless scenes split 8/1/1; heads trained on the first split and scored
// on the last, next to the untrained heads built from the same config.
inline IdentityChannel identity_channel(std::size_t scenes, std::uint64_t seed,
                                        topoheads::HeadConfig cfg) {
  synthgen::GeneratorConfig gen;
  gen.scenes = scenes;
  gen.seed = seed;
  const auto all = synthgen::generate_scenes(gen);
  const auto dets = synthgen::corrupt_scenes(all, {}, seed);
  const auto sizes = synthgen::split_sizes(scenes, {0.8, 0.1, 0.1});
  const std::span<const dataio::SceneRecord> train_s(all.data(), sizes[0]);
  const std::span<const dataio::DetectionRecord> train_d(dets.data(), sizes[0]);
  const std::size_t test_begin = sizes[0] + sizes[1];
  const std::vector<dataio::SceneRecord> test_s(all.begin() + static_cast<long>(test_begin), all.end());
  const std::vector<dataio::DetectionRecord> test_d(dets.begin() + static_cast<long>(test_begin), dets.end());

  cfg.seed = seed;
  IdentityChannel out;
  out.result = topoheads::train(train_s, train_d, {}, {}, cfg);
  const auto fresh = topoheads::init_params(cfg);
  std::vector<dataio::PredictionRecord> before, after;
  for (const auto& d : test_d) {
    before.push_back(topoheads::predict_record(d, fresh));
    after.push_back(topoheads::predict_record(d, out.result.params));
  }
  out.fresh = metrics::evaluate(before, test_s);
  out.trained = metrics::evaluate(after, test_s);
  return out;
}

}  // namespace pipeline

#endif  // LANETOPO_TESTS_PIPELINE_HPP_
