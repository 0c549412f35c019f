#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vorocrust {

/// Error raised by any stage of the pipeline. The message is the
/// machine-readable reason (e.g. "degenerate triplet", "not watertight").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  Vec3& operator/=(double s) { x /= s; y /= s; z /= s; return *this; }
  constexpr bool operator==(const Vec3&) const = default;
};

using Point3 = Vec3;

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
constexpr double distance2(const Vec3& a, const Vec3& b) { return norm2(a - b); }
inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : Vec3{};
}
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Angle in [0, pi] between two nonzero vectors.
double angle_between(const Vec3& a, const Vec3& b);
/// Angle in [0, pi/2] between the lines spanned by two nonzero vectors.
double line_angle(const Vec3& a, const Vec3& b);

struct Sphere {
  Point3 center;
  double radius = 0.0;

  bool contains(const Point3& p) const { return distance2(p, center) <= radius * radius; }
  /// Strict interior test.
  bool contains_strictly(const Point3& p) const { return distance2(p, center) < radius * radius; }
};

/// Half-space boundary n.x = d with unit normal n.
struct Plane {
  Vec3 normal;
  double offset = 0.0;

  double signed_distance(const Point3& p) const { return dot(normal, p) - offset; }

  /// Perpendicular bisector of (a, b) oriented so that `a` lies on the negative side.
  static Plane bisector(const Point3& a, const Point3& b);
  static Plane through(const Vec3& unit_normal, const Point3& p) { return {unit_normal, dot(unit_normal, p)}; }
};

struct Aabb {
  Vec3 lo{1e300, 1e300, 1e300};
  Vec3 hi{-1e300, -1e300, -1e300};

  void expand(const Vec3& p);
  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return norm(hi - lo); }
  double volume() const;
  /// Same center, every side multiplied by `factor`.
  Aabb scaled(double factor) const;
  bool contains(const Vec3& p) const;
};

Aabb bounding_box(std::span<const Vec3> points);

double triangle_area(const Point3& a, const Point3& b, const Point3& c);
Vec3 triangle_normal(const Point3& a, const Point3& b, const Point3& c);

/// 6S / (sqrt(3) h P) with S the area, h the longest edge and P the half
/// perimeter. 1 for equilateral triangles, 0 for degenerate ones.
double triangle_quality(const Point3& a, const Point3& b, const Point3& c);

/// The three interior angles (radians) at a, b, c.
std::array<double, 3> triangle_angles(const Point3& a, const Point3& b, const Point3& c);

struct ClosestPoint {
  enum class Region { vertex, edge, interior };
  double distance = 0.0;
  Point3 point;
  Region region = Region::interior;
};

ClosestPoint closest_point_segment(const Point3& p, const Point3& a, const Point3& b);
ClosestPoint closest_point_triangle(const Point3& p, const Point3& a, const Point3& b,
                                    const Point3& c);

/// Intersection of three sphere boundaries. Two points are ordered so that the
/// first lies on the side of (c2-c1)x(c3-c1). Throws Error("degenerate triplet")
/// when the centers are (nearly) collinear or coincide.
std::vector<Point3> sphere_triplet_points(const Sphere& s1, const Sphere& s2, const Sphere& s3);

/// Smallest sphere enclosing all points (randomized incremental, Welzl).
Sphere min_enclosing_sphere(std::span<const Point3> points);

/// Circumsphere of a triangle in 3D (center in the triangle's plane).
/// Returns radius < 0 for collinear input.
Sphere circumsphere(const Point3& a, const Point3& b, const Point3& c);
/// Circumsphere of a tetrahedron. Returns radius < 0 for coplanar input.
Sphere circumsphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// Largest ball inside the intersection of half-spaces n_i.x <= d_i, given a
/// point known to be strictly inside. Returns radius 0 when the region is flat.
Sphere chebyshev_ball(std::span<const Plane> halfspaces, const Point3& interior_point);

}  // namespace vorocrust
