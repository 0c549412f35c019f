#pragma once

#include <array>
#include <vector>

#include "vorocrust/geometry.hpp"

namespace vorocrust {

/// Bounding-volume hierarchy over a triangle soup: closest-point queries and
/// ray-parity inside tests.
class TriangleBvh {
 public:
  TriangleBvh() = default;
  TriangleBvh(std::vector<Point3> vertices, std::vector<std::array<int, 3>> triangles);

  struct Hit {
    ClosestPoint cp;
    int triangle = -1;
  };

  bool empty() const { return tris_.empty(); }
  Hit closest(const Point3& p) const;
  /// Ray parity along three fixed directions, majority vote. Meaningful for
  /// closed meshes only.
  bool inside(const Point3& p) const;
  /// Number of crossings of the ray p + t d, t > 0.
  int crossings(const Point3& p, const Vec3& d) const;

 private:
  struct Node {
    Aabb box;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };
  int build(int begin, int end);
  void closest_rec(int node, const Point3& p, Hit& best) const;

  std::vector<Point3> v_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace vorocrust
