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
#include "lanetopo/adamw.hpp"

#include <cmath>

#include "lanetopo/errors.hpp"

namespace lanetopo::topoheads {

void adamw_step(std::span<const std::span<double>> params,
                std::span<const std::span<const double>> grads, AdamWState& state,
                std::int64_t step, const AdamWConfig& cfg) {
  if (params.size() != grads.size()) throw DomainError("adamw_step: tensor count mismatch");
  if (step < 1) throw DomainError("adamw_step: step index is 1-based");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw DomainError("adamw_step: state tensor count mismatch");

  const double t = static_cast<double>(step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  const double decay = 1.0 - cfg.lr * cfg.weight_decay;
  for (std::size_t k = 0; k < params.size(); ++k) {
    std::span<double> p = params[k];
    std::span<const double> g = grads[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (g.size() != p.size() || m.size() != p.size()) {
      throw DomainError("adamw_step: shape mismatch in tensor " + std::to_string(k));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] *= decay;
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

}  // namespace lanetopo::topoheads
