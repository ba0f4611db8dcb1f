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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lanetopo/errors.hpp"
#include "lanetopo/geometry.hpp"
#include "oracles.hpp"

using namespace lanetopo;
using namespace lanetopo::geometry;

namespace {

ControlPolygon poly(std::initializer_list<Point3> pts) { return ControlPolygon{pts}; }

void check_point(const Point3& p, double x, double y, double z, double tol = 1e-12) {
  CHECK(p.x == doctest::Approx(x).epsilon(tol));
  CHECK(p.y == doctest::Approx(y).epsilon(tol));
  CHECK(p.z == doctest::Approx(z).epsilon(tol));
}

Point3 random_point(std::mt19937_64& rng, double extent = 5.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  return {u(rng), u(rng), u(rng)};
}

std::vector<oracle::P3> to_oracle(const Polyline3& p) {
  std::vector<oracle::P3> out;
  for (const auto& q : p.points) out.push_back({q.x, q.y, q.z});
  return out;
}

}  // namespace

TEST_CASE("bezier_point evaluates the Bernstein form") {
  check_point(bezier_point(poly({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}}), 0.5), 1.5, 0, 0);
  check_point(bezier_point(poly({{0, 0, 0}, {1, 1, 0}}), 0.0), 0, 0, 0);
  // (P0 + 3 P1 + 3 P2 + P3) / 8
  check_point(bezier_point(poly({{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}}), 0.5), 0.5, 0.75, 0);
}

TEST_CASE("bezier_point rejects parameters outside [0,1]") {
  const auto c = poly({{0, 0, 0}, {1, 1, 0}});
  CHECK_THROWS_AS(bezier_point(c, -0.01), DomainError);
  CHECK_THROWS_AS(bezier_point(c, 1.01), DomainError);
  CHECK_THROWS_AS(bezier_point(poly({{0, 0, 0}}), 0.5), DomainError);
}

TEST_CASE("sample_lane") {
  const auto line = sample_lane(poly({{0, 0, 0}, {3, 0, 0}}), 4);
  REQUIRE(line.size() == 4);
  for (int k = 0; k < 4; ++k) check_point(line.points[k], k, 0, 0);

  const auto arc = poly({{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}});
  const auto two = sample_lane(arc, 2);
  REQUIRE(two.size() == 2);
  CHECK(two.points[0] == arc.front());
  CHECK(two.points[1] == arc.back());

  const auto three = sample_lane(arc, 3);
  check_point(three.points[0], 0, 0, 0);
  check_point(three.points[1], 0.5, 0.75, 0);
  check_point(three.points[2], 1, 0, 0);

  CHECK_THROWS_AS(sample_lane(arc, 1), DomainError);
  CHECK(sample_lane(arc).size() == kDefaultSamples);
}

TEST_CASE("bezier endpoints are exact for random control polygons") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    ControlPolygon c;
    const int m = 2 + trial % 5;
    for (int i = 0; i < m; ++i) c.points.push_back(random_point(rng, 50.0));
    const Point3 a = bezier_point(c, 0.0);
    const Point3 b = bezier_point(c, 1.0);
    CHECK(distance(a, c.front()) <= 1e-12);
    CHECK(distance(b, c.back()) <= 1e-12);
  }
}

TEST_CASE("sampled points stay inside the control bounding box") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    ControlPolygon c;
    for (int i = 0; i < 4; ++i) c.points.push_back(random_point(rng));
    Point3 lo = c.front(), hi = c.front();
    for (const auto& p : c.points) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    const std::size_t count = 2 + static_cast<std::size_t>(trial % 63);
    for (const auto& p : sample_lane(c, count).points) {
      CHECK(p.x >= lo.x - 1e-12);
      CHECK(p.x <= hi.x + 1e-12);
      CHECK(p.y >= lo.y - 1e-12);
      CHECK(p.y <= hi.y + 1e-12);
      CHECK(p.z >= lo.z - 1e-12);
      CHECK(p.z <= hi.z + 1e-12);
    }
  }
}

TEST_CASE("frechet_distance examples") {
  const Polyline3 a{{{0, 0, 0}, {1, 0, 0}}};
  const Polyline3 b{{{0, 1, 0}, {1, 2, 0}}};
  CHECK(frechet_distance(a, a) == 0.0);
  CHECK(frechet_distance(a, b) == doctest::Approx(2.0));

  Polyline3 up = a;
  for (auto& p : up.points) p.z += 1.0;
  CHECK(frechet_distance(a, up) == doctest::Approx(1.0));

  CHECK_THROWS_AS(frechet_distance(Polyline3{}, a), DomainError);
}

TEST_CASE("frechet_distance matches the coupling enumeration oracle") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> len(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    Polyline3 a, b;
    const int n = len(rng), m = len(rng);
    for (int i = 0; i < n; ++i) a.points.push_back(random_point(rng));
    for (int i = 0; i < m; ++i) b.points.push_back(random_point(rng));
    const double d = frechet_distance(a, b);
    CHECK(d == doctest::Approx(oracle::frechet(to_oracle(a), to_oracle(b))).epsilon(1e-9));
    CHECK(d == frechet_distance(b, a));
    CHECK(frechet_distance(a, a) == 0.0);
    CHECK(d >= distance(a.points.front(), b.points.front()) - 1e-12);
    CHECK(d >= distance(a.points.back(), b.points.back()) - 1e-12);
  }
}

TEST_CASE("degenerate zero-length lanes are legal") {
  const auto c = poly({{2, 2, 0}, {2, 2, 0}, {2, 2, 0}, {2, 2, 0}});
  const auto s = sample_lane(c);
  for (const auto& p : s.points) {
    CHECK(p.x == doctest::Approx(2.0));
    CHECK(p.y == doctest::Approx(2.0));
    CHECK(p.z == 0.0);
  }
  CHECK(frechet_distance(s, s) == 0.0);
  CHECK(control_point_l1(c, c) == 0.0);
}

TEST_CASE("box_iou") {
  const Box2 a{0, 0, 2, 2};
  CHECK(box_iou(a, a) == 1.0);
  CHECK(box_iou(a, Box2{5, 5, 6, 6}) == 0.0);
  CHECK(box_iou(a, Box2{1, 1, 3, 3}) == doctest::Approx(1.0 / 7.0));

  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = u(rng), y = u(rng), x2 = u(rng), y2 = u(rng);
    const Box2 p{x, y, x + 0.1 + u(rng), y + 0.1 + u(rng)};
    const Box2 q{x2, y2, x2 + 0.1 + u(rng), y2 + 0.1 + u(rng)};
    const double iou = box_iou(p, q);
    CHECK(iou >= 0.0);
    CHECK(iou <= 1.0);
    CHECK(iou == box_iou(q, p));
  }
}

TEST_CASE("control_point_l1") {
  const auto a = poly({{0, 0, 0}, {0, 0, 0}});
  CHECK(control_point_l1(a, a) == 0.0);
  CHECK(control_point_l1(a, poly({{1, 2, 3}, {0, 0, 0}})) == doctest::Approx(1.0));

  std::mt19937_64 rng(15);
  ControlPolygon r, shifted;
  for (int i = 0; i < 4; ++i) {
    const Point3 p = random_point(rng);
    r.points.push_back(p);
    shifted.points.push_back({p.x + 1, p.y + 1, p.z + 1});
  }
  CHECK(control_point_l1(r, shifted) == doctest::Approx(1.0));
  CHECK(control_point_l1(r, shifted) == control_point_l1(shifted, r));
  CHECK_THROWS_AS(control_point_l1(a, r), DomainError);
}
