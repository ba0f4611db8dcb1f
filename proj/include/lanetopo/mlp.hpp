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
#ifndef LANETOPO_MLP_HPP_
#define LANETOPO_MLP_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "lanetopo/rng.hpp"

namespace lanetopo::topoheads {

// y = W x + b with W stored row-major as out x in.
struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  bool operator==(const Linear&) const = default;
};

// Affine layers with a rectifier after every layer except the last.
struct MlpParams {
  std::vector<Linear> layers;

  std::size_t input_width() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t output_width() const { return layers.empty() ? 0 : layers.back().out; }
  bool operator==(const MlpParams&) const = default;
};

// Per-layer inputs and pre-activations recorded by a forward pass.
struct MlpCache {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
};

struct MlpForward {
  std::vector<double> output;
  MlpCache cache;
};

struct MlpGradients {
  MlpParams params;
  std::vector<double> input;
};

// widths = {in, hidden..., out}; Glorot-uniform weights, zero biases.
MlpParams make_mlp(std::span<const std::size_t> widths, Rng& rng);
MlpParams zeros_like(const MlpParams& params);

// Throw DomainError when x does not match the first layer.
MlpForward mlp_forward(const MlpParams& params, std::span<const double> x);
MlpGradients mlp_backward(const MlpParams& params, const MlpCache& cache,
                          std::span<const double> output_grad);

// Lower-level forms over a run of layers. The run is treated as a whole MLP
// (identity on its last layer). Backward accumulates into `grads`, which must
// have the same shapes, and returns the input gradient.
std::vector<double> mlp_apply(std::span<const Linear> layers, std::span<const double> x,
                              MlpCache* cache);
std::vector<double> mlp_backward_into(std::span<const Linear> layers, const MlpCache& cache,
                                      std::span<const double> output_grad,
                                      std::span<Linear> grads);

// Dimension chaining and finiteness; throws ValidationError naming `what`.
void check_mlp(const MlpParams& params, std::size_t in, std::size_t out, const char* what);

}  // namespace lanetopo::topoheads

#endif  // LANETOPO_MLP_HPP_
