#pragma once

#include <vector>

#include "vorocrust/geometry.hpp"

namespace vorocrust {

/// Closed convex polyhedron stored as a vertex list plus polygonal faces.
/// Faces are counter-clockwise seen from outside. Each face carries a tag:
/// the id of whatever generated it (a neighbor seed, or a negative id for
/// bounding-box sides).
class ConvexPolyhedron {
 public:
  struct Face {
    std::vector<int> vertices;
    int tag = -1;
  };

  ConvexPolyhedron() = default;
  ConvexPolyhedron(std::vector<Point3> vertices, std::vector<Face> faces)
      : vertices_(std::move(vertices)), faces_(std::move(faces)) {}

  /// Axis-aligned box; the six faces are tagged -1 (x-lo), -2 (x-hi), -3, -4, -5, -6.
  static ConvexPolyhedron box(const Aabb& box);

  bool empty() const { return faces_.empty(); }
  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }

  /// Intersection with {x : n.x <= d}. Vertices within `eps` of the plane count
  /// as on it. The new face (if any) gets `tag`.
  ConvexPolyhedron clipped(const Plane& plane, int tag, double eps) const;

  /// Outward plane of face f (Newell normal through the face centroid).
  Plane face_plane(std::size_t f) const;
  Point3 face_centroid(std::size_t f) const;
  double face_area(std::size_t f) const;

  double volume() const;
  Point3 centroid() const;
  double max_distance_from(const Point3& p) const;
  double diameter_bound() const;

  /// Every vertex on the non-positive side of every face plane within tol.
  /// Faces narrower than tol are skipped.
  bool is_convex(double tol) const;
  /// Every edge shared by exactly two faces with opposite orientation.
  bool is_closed() const;

 private:
  std::vector<Point3> vertices_;
  std::vector<Face> faces_;
};

/// Ratio of the minimum enclosing sphere radius to the largest inscribed
/// sphere radius. Throws Error("degenerate cell") for flat cells.
double aspect_ratio(const ConvexPolyhedron& cell);

}  // namespace vorocrust
