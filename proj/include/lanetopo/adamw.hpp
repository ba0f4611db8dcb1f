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
#ifndef LANETOPO_ADAMW_HPP_
#define LANETOPO_ADAMW_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lanetopo::topoheads {

struct AdamWConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// First and second moments, one buffer per parameter tensor.
struct AdamWState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// One AdamW update with decoupled weight decay and bias correction.
// `step` is 1-based. Moment buffers are allocated on first use; any shape
// disagreement throws DomainError.
void adamw_step(std::span<const std::span<double>> params,
                std::span<const std::span<const double>> grads, AdamWState& state,
                std::int64_t step, const AdamWConfig& cfg);

}  // namespace lanetopo::topoheads

#endif  // LANETOPO_ADAMW_HPP_
