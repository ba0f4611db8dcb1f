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
#include "lanetopo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanetopo/errors.hpp"

namespace lanetopo::geometry {

double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool Box2::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x1 < x2 && y1 < y2;
}

Point3 bezier_point(const ControlPolygon& ctrl, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("bezier_point: t=" + std::to_string(t) + " outside [0,1]");
  }
  const std::size_t m = ctrl.size();
  if (m < 2) throw DomainError("bezier_point: need at least 2 control points");
  const std::size_t degree = m - 1;
  // Endpoints are returned verbatim so that shared lane endpoints stay exact.
  if (t == 0.0) return ctrl.front();
  if (t == 1.0) return ctrl.back();

  Point3 out;
  const double s = 1.0 - t;
  double binom = 1.0;
  for (std::size_t k = 0; k <= degree; ++k) {
    const double w = binom * std::pow(t, static_cast<double>(k)) *
                     std::pow(s, static_cast<double>(degree - k));
    out.x += w * ctrl.points[k].x;
    out.y += w * ctrl.points[k].y;
    out.z += w * ctrl.points[k].z;
    binom = binom * static_cast<double>(degree - k) / static_cast<double>(k + 1);
  }
  return out;
}

Polyline3 sample_lane(const ControlPolygon& ctrl, std::size_t count) {
  if (count < 2) throw DomainError("sample_lane: need at least 2 samples");
  Polyline3 line;
  line.points.reserve(count);
  const double denom = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    line.points.push_back(bezier_point(ctrl, static_cast<double>(k) / denom));
  }
  return line;
}

double frechet_distance(const Polyline3& a, const Polyline3& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) throw DomainError("frechet_distance: empty polyline");

  // Rolling row of the coupling lattice: cell (i, j) holds the smallest leash
  // over monotone couplings of a[0..i] and b[0..j].
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(a.points[i], b.points[j]);
      double reach;
      if (i == 0 && j == 0) {
        reach = d;
      } else if (i == 0) {
        reach = std::max(cur[j - 1], d);
      } else if (j == 0) {
        reach = std::max(prev[j], d);
      } else {
        reach = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
      }
      cur[j] = reach;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double box_iou(const Box2& a, const Box2& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double control_point_l1(const ControlPolygon& a, const ControlPolygon& b) {
  if (a.size() != b.size()) {
    throw DomainError("control_point_l1: control point counts differ (" +
                      std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += std::abs(a.points[k].x - b.points[k].x) + std::abs(a.points[k].y - b.points[k].y) +
           std::abs(a.points[k].z - b.points[k].z);
  }
  return sum / static_cast<double>(3 * a.size());
}

}  // namespace lanetopo::geometry
