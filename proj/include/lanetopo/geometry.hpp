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
#ifndef LANETOPO_GEOMETRY_HPP_
#define LANETOPO_GEOMETRY_HPP_

#include <cstddef>
#include <vector>

namespace lanetopo::geometry {

inline constexpr std::size_t kDefaultControlPoints = 4;
inline constexpr std::size_t kDefaultSamples = 11;

// Ego-centric ground frame, meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Point3&) const = default;
};

double distance(const Point3& a, const Point3& b);

// Bezier control points of one lane, first to last.
struct ControlPolygon {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  const Point3& front() const { return points.front(); }
  const Point3& back() const { return points.back(); }
  bool operator==(const ControlPolygon&) const = default;
};

struct Polyline3 {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  bool operator==(const Polyline3&) const = default;
};

// Axis-aligned image box in pixels, x1 < x2 and y1 < y2.
struct Box2 {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const;
  bool operator==(const Box2&) const = default;
};

// Bernstein-form evaluation of the degree size()-1 curve. Throws DomainError
// when t is outside [0, 1] or the polygon has fewer than two points.
Point3 bezier_point(const ControlPolygon& ctrl, double t);

// `count` points at uniform parameters k / (count - 1).
Polyline3 sample_lane(const ControlPolygon& ctrl, std::size_t count = kDefaultSamples);

// Discrete Frechet distance between two point sequences.
double frechet_distance(const Polyline3& a, const Polyline3& b);

double box_iou(const Box2& a, const Box2& b);

// Mean absolute coordinate difference over all 3M entries.
double control_point_l1(const ControlPolygon& a, const ControlPolygon& b);

}  // namespace lanetopo::geometry

#endif  // LANETOPO_GEOMETRY_HPP_
