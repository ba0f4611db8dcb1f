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
#ifndef LANETOPO_SWEEP_HPP_
#define LANETOPO_SWEEP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lanetopo/metrics.hpp"
#include "lanetopo/synthgen.hpp"
#include "lanetopo/topoheads.hpp"

namespace lanetopo::sweep {

struct NoiseLevel {
  std::string name;
  synthgen::NoiseModel noise;
};

// ctrl_sigma {0, 0.25, 0.5, 1.0} m paired with drop_prob {0, 0.1, 0.3, 0.3}:
// a chain that is non-decreasing in every component.
std::vector<NoiseLevel> default_levels(const synthgen::NoiseModel& base = {});

// The full ctrl_sigma x drop_prob grid, ordered by ctrl_sigma then drop_prob.
std::vector<NoiseLevel> grid_levels(const std::vector<double>& ctrl_sigmas,
                                    const std::vector<double>& drop_probs,
                                    const synthgen::NoiseModel& base = {});

struct SweepRow {
  NoiseLevel level;
  std::vector<dataio::MetricReport> per_seed;
  dataio::MetricReport mean;  // component-wise mean; ols recomputed
};

// For every level and every noise seed: corrupt -> predict -> evaluate.
// Noise seed k of a run is derive_seed(seed, {k}).
std::vector<SweepRow> run_sweep(const std::vector<dataio::SceneRecord>& scenes,
                                const topoheads::TopoHeadParams& params,
                                const std::vector<NoiseLevel>& levels, std::size_t seeds,
                                std::uint64_t seed, const metrics::DetMatchConfig& cfg = {});

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

std::string sweep_to_json(const std::vector<SweepRow>& rows);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string format_sweep_table(const std::vector<SweepRow>& rows);

}  // namespace lanetopo::sweep

#endif  // LANETOPO_SWEEP_HPP_
