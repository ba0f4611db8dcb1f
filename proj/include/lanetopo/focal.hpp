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
#ifndef LANETOPO_FOCAL_HPP_
#define LANETOPO_FOCAL_HPP_

namespace lanetopo::topoheads {

struct FocalValue {
  double loss = 0.0;
  double grad_logit = 0.0;  // d loss / d pre-sigmoid logit
};

// Binary focal loss -alpha_t (1 - p_t)^gamma log(p_t), where p_t = p and
// alpha_t = alpha for target 1, p_t = 1 - p and alpha_t = 1 - alpha for 0.
FocalValue focal_loss(double prob, int target, double alpha, double gamma);

// Same loss parameterized by the logit; uses log-sigmoid forms so extreme
// logits never produce log(0).
FocalValue focal_loss_logit(double logit, int target, double alpha, double gamma);

// Positive-class focal term of a detector score, used as a matching cost.
// Scores are floored at 1e-12.
double focal_positive_term(double score, double alpha, double gamma);

double sigmoid(double x);

}  // namespace lanetopo::topoheads

#endif  // LANETOPO_FOCAL_HPP_
