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
// Brute-force reference implementations shared by the test binaries. They
// favor obviousness over speed and share no code with the library.

#ifndef LANETOPO_TESTS_ORACLES_HPP_
#define LANETOPO_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

struct P3 {
  double x, y, z;
};

inline double dist(const P3& a, const P3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

// Enumerates every monotone coupling path from (0,0) to (n-1,m-1) and returns
// the minimum over paths of the longest leash along the path.
inline void frechet_walk(const std::vector<P3>& a, const std::vector<P3>& b, std::size_t i, std::size_t j,
                         double leash, double& best) {
  leash = std::max(leash, dist(a[i], b[j]));
  if (leash >= best) return;
  if (i + 1 == a.size() && j + 1 == b.size()) {
    best = leash;
    return;
  }
  if (i + 1 < a.size()) frechet_walk(a, b, i + 1, j, leash, best);
  if (j + 1 < b.size()) frechet_walk(a, b, i, j + 1, leash, best);
  if (i + 1 < a.size() && j + 1 < b.size()) frechet_walk(a, b, i + 1, j + 1, leash, best);
}

inline double frechet(const std::vector<P3>& a, const std::vector<P3>& b) {
  double best = std::numeric_limits<double>::infinity();
  frechet_walk(a, b, 0, 0, 0.0, best);
  return best;
}

// Minimum total cost over all injective assignments of min(R, C) pairs.
inline double min_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t r = cost.size();
  const std::size_t c = r == 0 ? 0 : cost[0].size();
  if (r == 0 || c == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  if (r <= c) {
    std::vector<std::size_t> cols(c);
    std::iota(cols.begin(), cols.end(), 0);
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < r; ++i) s += cost[i][cols[i]];
      best = std::min(best, s);
    } while (std::next_permutation(cols.begin(), cols.end()));
  } else {
    std::vector<std::size_t> rows(r);
    std::iota(rows.begin(), rows.end(), 0);
    do {
      double s = 0.0;
      for (std::size_t j = 0; j < c; ++j) s += cost[rows[j]][j];
      best = std::min(best, s);
    } while (std::next_permutation(rows.begin(), rows.end()));
  }
  return best;
}

// Precision at every TP rank, recounted from scratch, summed and divided by
// num_gt; capped at 1, with the num_gt == 0 conventions of the library.
inline double average_precision(const std::vector<bool>& flags, std::size_t num_gt) {
  if (num_gt == 0) return flags.empty() ? 1.0 : 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (!flags[k]) continue;
    const auto hits = std::count(flags.begin(), flags.begin() + static_cast<long>(k) + 1, true);
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return std::min(1.0, sum / static_cast<double>(num_gt));
}

// Plain matrix arithmetic: y = W x + b, W row-major out x in.
inline std::vector<double> affine(const std::vector<double>& w, const std::vector<double>& b,
                                  const std::vector<double>& x) {
  std::vector<double> y(b);
  for (std::size_t o = 0; o < b.size(); ++o) {
    for (std::size_t i = 0; i < x.size(); ++i) y[o] += w[o * x.size() + i] * x[i];
  }
  return y;
}

inline std::vector<double> relu(std::vector<double> v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
  return v;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace oracle

#endif  // LANETOPO_TESTS_ORACLES_HPP_
