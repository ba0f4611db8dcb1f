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
#include "lanetopo/mlp.hpp"

#include <cmath>
#include <string>

#include "lanetopo/errors.hpp"

namespace lanetopo::topoheads {

MlpParams make_mlp(std::span<const std::size_t> widths, Rng& rng) {
  MlpParams params;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Linear layer;
    layer.in = widths[l];
    layer.out = widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    layer.weight.resize(layer.in * layer.out);
    for (double& w : layer.weight) w = dist(rng);
    layer.bias.assign(layer.out, 0.0);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MlpParams zeros_like(const MlpParams& params) {
  MlpParams out = params;
  for (auto& layer : out.layers) {
    std::fill(layer.weight.begin(), layer.weight.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  return out;
}

std::vector<double> mlp_apply(std::span<const Linear> layers, std::span<const double> x,
                              MlpCache* cache) {
  if (!layers.empty() && x.size() != layers.front().in) {
    throw DomainError("mlp: input width " + std::to_string(x.size()) + ", expected " +
                      std::to_string(layers.front().in));
  }
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  std::vector<double> act(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Linear& layer = layers[l];
    std::vector<double> pre(layer.bias);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = layer.weight.data() + o * layer.in;
      double s = 0.0;
      for (std::size_t i = 0; i < layer.in; ++i) s += row[i] * act[i];
      pre[o] += s;
    }
    std::vector<double> next = pre;
    if (l + 1 < layers.size()) {
      for (double& v : next) v = v < 0.0 ? 0.0 : v;  // NaN passes through
    }
    if (cache) {
      cache->inputs.push_back(std::move(act));
      cache->pre.push_back(std::move(pre));
    }
    act = std::move(next);
  }
  return act;
}

std::vector<double> mlp_backward_into(std::span<const Linear> layers, const MlpCache& cache,
                                      std::span<const double> output_grad,
                                      std::span<Linear> grads) {
  if (cache.inputs.size() != layers.size() || grads.size() != layers.size()) {
    throw DomainError("mlp_backward: cache or gradient layout does not match the layers");
  }
  if (layers.empty()) return {output_grad.begin(), output_grad.end()};
  if (output_grad.size() != layers.back().out) {
    throw DomainError("mlp_backward: output gradient width mismatch");
  }
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Linear& layer = layers[l];
    Linear& g = grads[l];
    if (l + 1 < layers.size()) {
      for (std::size_t o = 0; o < layer.out; ++o) {
        if (!(cache.pre[l][o] > 0.0)) delta[o] = 0.0;
      }
    }
    const std::vector<double>& input = cache.inputs[l];
    std::vector<double> below(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      g.bias[o] += d;
      const double* row = layer.weight.data() + o * layer.in;
      double* grow = g.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        grow[i] += d * input[i];
        below[i] += row[i] * d;
      }
    }
    delta = std::move(below);
  }
  return delta;
}

MlpForward mlp_forward(const MlpParams& params, std::span<const double> x) {
  MlpForward out;
  out.output = mlp_apply(params.layers, x, &out.cache);
  return out;
}

MlpGradients mlp_backward(const MlpParams& params, const MlpCache& cache,
                          std::span<const double> output_grad) {
  MlpGradients out;
  out.params = zeros_like(params);
  out.input = mlp_backward_into(params.layers, cache, output_grad, out.params.layers);
  return out;
}

void check_mlp(const MlpParams& params, std::size_t in, std::size_t out, const char* what) {
  const std::string name(what);
  if (params.layers.empty()) throw ValidationError(name + ": no layers");
  if (params.input_width() != in) {
    throw ValidationError(name + ": input width " + std::to_string(params.input_width()) +
                          ", expected " + std::to_string(in));
  }
  if (params.output_width() != out) {
    throw ValidationError(name + ": output width " + std::to_string(params.output_width()) +
                          ", expected " + std::to_string(out));
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Linear& layer = params.layers[l];
    if (l > 0 && layer.in != params.layers[l - 1].out) {
      throw ValidationError(name + ": layer " + std::to_string(l) + " does not chain");
    }
    if (layer.weight.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
      throw ValidationError(name + ": layer " + std::to_string(l) + " has wrong array sizes");
    }
    for (double v : layer.weight) {
      if (!std::isfinite(v)) throw ValidationError(name + ": non-finite weight");
    }
    for (double v : layer.bias) {
      if (!std::isfinite(v)) throw ValidationError(name + ": non-finite bias");
    }
  }
}

}  // namespace lanetopo::topoheads
