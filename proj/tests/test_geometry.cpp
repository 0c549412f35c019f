#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "vorocrust/geometry.hpp"

using namespace vorocrust;

namespace {

Point3 random_point(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

// Smallest sphere through 2, 3 or 4 of the points that contains all of them.
Sphere brute_force_mes(const std::vector<Point3>& p) {
  Sphere best{{}, 1e300};
  auto consider = [&](const Sphere& s) {
    if (!(s.radius >= 0.0) || s.radius >= best.radius) return;
    for (const auto& q : p)
      if (distance(q, s.center) > s.radius * (1.0 + 1e-9) + 1e-12) return;
    best = s;
  };
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      consider({(p[i] + p[j]) * 0.5, distance(p[i], p[j]) * 0.5});
      for (std::size_t k = j + 1; k < n; ++k) {
        consider(circumsphere(p[i], p[j], p[k]));
        for (std::size_t l = k + 1; l < n; ++l) consider(circumsphere(p[i], p[j], p[k], p[l]));
      }
    }
  return best;
}

}  // namespace

TEST_CASE("vector basics") {
  const Vec3 a{1, 2, 3}, b{-2, 0, 5};
  CHECK(dot(a, b) == doctest::Approx(13.0));
  CHECK(cross(a, b) == Vec3{10, -11, 4});
  CHECK(norm(Vec3{3, 4, 12}) == doctest::Approx(13.0));
  CHECK(angle_between({1, 0, 0}, {0, 1, 0}) == doctest::Approx(std::numbers::pi / 2));
  CHECK(angle_between({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(std::numbers::pi));
  CHECK(line_angle({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(0.0));
  CHECK(line_angle({1, 0, 0}, {-1, 1, 0}) == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("bisector puts the first point on the negative side") {
  const Plane p = Plane::bisector({0, 0, 0}, {2, 0, 0});
  CHECK(p.signed_distance({0, 0, 0}) == doctest::Approx(-1.0));
  CHECK(p.signed_distance({1, 5, -3}) == doctest::Approx(0.0));
}

TEST_CASE("aabb") {
  std::vector<Point3> pts{{0, 0, 0}, {2, 1, 4}, {1, -1, 2}};
  const Aabb b = bounding_box(pts);
  CHECK(b.lo == Vec3{0, -1, 0});
  CHECK(b.hi == Vec3{2, 1, 4});
  CHECK(b.volume() == doctest::Approx(16.0));
  const Aabb s = b.scaled(3.0);
  CHECK(s.extent().x == doctest::Approx(6.0));
  CHECK(s.center() == b.center());
}

TEST_CASE("triangle quality and angles") {
  const double h = std::sqrt(3.0) / 2.0;
  CHECK(triangle_quality({0, 0, 0}, {1, 0, 0}, {0.5, h, 0}) == doctest::Approx(1.0));
  // right isosceles, legs 1: S = 1/2, h = sqrt 2, P = 1 + sqrt(2)/2
  const double expect = 6.0 * 0.5 / (std::sqrt(3.0) * std::sqrt(2.0) * (1.0 + std::sqrt(2.0) / 2.0));
  CHECK(triangle_quality({0, 0, 0}, {1, 0, 0}, {0, 1, 0}) == doctest::Approx(expect));
  CHECK(triangle_quality({0, 0, 0}, {1, 0, 0}, {2, 0, 0}) == doctest::Approx(0.0));

  const auto a = triangle_angles({0, 0, 0}, {4, 0, 0}, {0, 3, 0});
  CHECK(a[0] == doctest::Approx(std::numbers::pi / 2));
  CHECK(a[1] == doctest::Approx(std::atan2(3.0, 4.0)));
  CHECK(a[2] == doctest::Approx(std::atan2(4.0, 3.0)));
  CHECK(triangle_area({0, 0, 0}, {4, 0, 0}, {0, 3, 0}) == doctest::Approx(6.0));
}

TEST_CASE("closest point on a triangle matches a dense barycentric scan") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Point3 a = random_point(rng), b = random_point(rng), c = random_point(rng), p = random_point(rng, -2, 2);
    const ClosestPoint cp = closest_point_triangle(p, a, b, c);
    const int n = 200;
    double best = 1e300;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) {
        const double u = double(i) / n, v = double(j) / n;
        best = std::min(best, distance(p, a + (b - a) * u + (c - a) * v));
      }
    CHECK(cp.distance <= best + 1e-12);
    // grid spacing bounds the scan error
    const double step = std::max({distance(a, b), distance(a, c)}) / n;
    CHECK(cp.distance >= best - 2.0 * step);
    CHECK(distance(cp.point, p) == doctest::Approx(cp.distance));
  }
}

TEST_CASE("closest point on a segment") {
  const auto cp = closest_point_segment({0.5, 2, 0}, {0, 0, 0}, {1, 0, 0});
  CHECK(cp.distance == doctest::Approx(2.0));
  CHECK(cp.region == ClosestPoint::Region::edge);
  const auto end = closest_point_segment({-1, 0, 0}, {0, 0, 0}, {1, 0, 0});
  CHECK(end.region == ClosestPoint::Region::vertex);
  CHECK(end.distance == doctest::Approx(1.0));
}

TEST_CASE("sphere triplet of unit spheres on an equilateral triangle") {
  const double h = std::sqrt(3.0) / 2.0;
  const auto g = sphere_triplet_points({{0, 0, 0}, 1}, {{1, 0, 0}, 1}, {{0.5, h, 0}, 1});
  REQUIRE(g.size() == 2);
  CHECK(g[0].x == doctest::Approx(0.5));
  CHECK(g[0].y == doctest::Approx(std::sqrt(3.0) / 6.0));
  CHECK(g[0].z == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(g[1].z == doctest::Approx(-std::sqrt(2.0 / 3.0)));
}

TEST_CASE("sphere triplet points lie on all three spheres") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Sphere s[3];
    for (auto& x : s) x = {random_point(rng), std::uniform_real_distribution<double>(0.5, 1.5)(rng)};
    std::vector<Point3> g;
    try {
      g = sphere_triplet_points(s[0], s[1], s[2]);
    } catch (const Error&) {
      continue;
    }
    if (g.size() != 2) continue;
    ++checked;
    for (const auto& p : g)
      for (const auto& x : s) CHECK(std::abs(distance(p, x.center) - x.radius) < 1e-9);
    const Vec3 n = cross(s[1].center - s[0].center, s[2].center - s[0].center);
    CHECK(dot(g[0] - s[0].center, n) > dot(g[1] - s[0].center, n));
  }
  CHECK(checked > 20);
}

TEST_CASE("collinear triplet is degenerate") {
  CHECK_THROWS_WITH_AS(sphere_triplet_points({{0, 0, 0}, 1}, {{1, 0, 0}, 1}, {{2, 0, 0}, 1}), "degenerate triplet",
                       Error);
}

TEST_CASE("minimum enclosing sphere equals the best 2/3/4-point support sphere") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Point3> p(3 + trial % 6);
    for (auto& x : p) x = random_point(rng);
    const Sphere s = min_enclosing_sphere(p);
    const Sphere o = brute_force_mes(p);
    CHECK(s.radius == doctest::Approx(o.radius).epsilon(1e-9));
    CHECK(distance(s.center, o.center) < 1e-7);
  }
}

TEST_CASE("circumspheres") {
  const Sphere t = circumsphere({0, 0, 0}, {2, 0, 0}, {0, 2, 0});
  CHECK(t.center.x == doctest::Approx(1.0));
  CHECK(t.center.y == doctest::Approx(1.0));
  CHECK(t.radius == doctest::Approx(std::sqrt(2.0)));
  CHECK(circumsphere({0, 0, 0}, {1, 0, 0}, {2, 0, 0}).radius < 0.0);
  const Sphere q = circumsphere({1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1});
  CHECK(q.radius == doctest::Approx(std::sqrt(3.0)));
  CHECK(norm(q.center) < 1e-12);
}

TEST_CASE("chebyshev ball of a cube and of a regular tetrahedron") {
  std::vector<Plane> cube;
  for (int d = 0; d < 3; ++d) {
    Vec3 n;
    n[d] = 1.0;
    cube.push_back({n, 1.0});
    cube.push_back({-n, 0.0});
  }
  const Sphere c = chebyshev_ball(cube, {0.2, 0.3, 0.7});
  CHECK(c.radius == doctest::Approx(0.5));
  CHECK(distance(c.center, {0.5, 0.5, 0.5}) < 1e-9);

  const Point3 v[4] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  std::vector<Plane> tet;
  for (int i = 0; i < 4; ++i) {
    const Point3 &a = v[(i + 1) % 4], &b = v[(i + 2) % 4], &cc = v[(i + 3) % 4];
    Vec3 n = normalized(cross(b - a, cc - a));
    if (dot(n, v[i] - a) > 0) n = -n;
    tet.push_back(Plane::through(n, a));
  }
  const double edge = 2.0 * std::sqrt(2.0);
  CHECK(chebyshev_ball(tet, {0, 0, 0}).radius == doctest::Approx(edge / (2.0 * std::sqrt(6.0))));
}
