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
#include "lanetopo/focal.hpp"

#include <algorithm>
#include <cmath>

namespace lanetopo::topoheads {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

FocalValue focal_loss_logit(double logit, int target, double alpha, double gamma) {
  const double p = sigmoid(logit);
  FocalValue out;
  if (target == 1) {
    const double nlog_p = softplus(-logit);  // -log p
    const double mod = std::pow(1.0 - p, gamma);
    out.loss = alpha * mod * nlog_p;
    out.grad_logit = alpha * mod * (-gamma * p * nlog_p - (1.0 - p));
  } else {
    const double nlog_q = softplus(logit);  // -log(1 - p)
    const double mod = std::pow(p, gamma);
    out.loss = (1.0 - alpha) * mod * nlog_q;
    out.grad_logit = (1.0 - alpha) * mod * (gamma * (1.0 - p) * nlog_q + p);
  }
  return out;
}

FocalValue focal_loss(double prob, int target, double alpha, double gamma) {
  const double p = std::clamp(prob, 0.0, 1.0);
  const double pt = target == 1 ? p : 1.0 - p;
  const double at = target == 1 ? alpha : 1.0 - alpha;
  FocalValue out;
  const double mod = std::pow(1.0 - pt, gamma);
  out.loss = pt >= 1.0 ? 0.0 : -at * mod * std::log(pt);
  // Chain rule through d p / d logit = p (1 - p), written in p_t terms.
  const double log_pt = pt > 0.0 ? std::log(pt) : 0.0;
  const double g = at * mod * (gamma * pt * log_pt - (1.0 - pt));
  out.grad_logit = target == 1 ? g : -g;
  return out;
}

double focal_positive_term(double score, double alpha, double gamma) {
  const double p = std::clamp(score, 1e-12, 1.0);
  return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
}

}  // namespace lanetopo::topoheads
