#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "vorocrust/seeding.hpp"

namespace vorocrust {

/// Planar straight-line graph.
struct Pslg {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 2>> segments;

  /// Every vertex has even degree (a union of closed loops).
  bool encloses_region() const;
  /// Ray-parity inside test against all segments.
  bool inside(double x, double y) const;
};

/// "#" comments, vertex count, "x y" lines, segment count, "i j" lines.
Pslg load_pslg(const std::filesystem::path& path);

/// The PSLG as an input complex at z = 0 (segments only).
InputComplex embed(const Pslg& g);

/// Convex polygon in the z = 0 plane; edge i runs from v[i] to v[i+1] and
/// carries tag[i] (neighbor seed id, or negative for the rectangle).
struct ConvexPolygon {
  std::vector<std::array<double, 2>> v;
  std::vector<int> tag;

  static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);
  /// Keeps {p : n.p <= d}; new edges get `new_tag`.
  ConvexPolygon clipped(double nx, double ny, double d, int new_tag, double eps) const;
  double area() const;
  double max_distance_from(double x, double y) const;
  bool is_convex(double tol) const;
  bool empty() const { return v.size() < 3; }
};

struct Cell2d {
  int seed = -1;
  ConvexPolygon poly;
};

std::vector<Cell2d> compute_cells_2d(const std::vector<Point3>& seeds, const Aabb& box);

/// Ordered ball ids along each crease, corner balls at open ends.
std::vector<std::vector<int>> crease_ball_chains(const BallIndex& balls, const InputComplex& mesh,
                                                 const Strata& strata);

/// Overlaps between balls that are not neighbors in a chain.
std::size_t consecutive_overlap_violations(const BallIndex& balls, const std::vector<std::vector<int>>& chains);

struct Report2d {
  std::size_t cells = 0;
  std::size_t non_convex = 0;
  double area_error = 0.0;
  double hausdorff = 0.0;
  double edge_ratio = 0.0;
  std::size_t boundary_edges = 0;
  std::size_t consecutive_violations = 0;
  std::size_t boundary_seeds = 0;
  std::size_t interior_seeds = 0;
};

struct Mesh2dResult {
  InputComplex mesh;
  std::vector<Ball> balls;
  SeedSet seeds;
  std::vector<Cell2d> cells;
  /// Recovered boundary: cell edges between seeds of opposite labels.
  std::vector<std::array<Point3, 2>> boundary;
  Aabb box;
  Report2d report;
};

Mesh2dResult mesh_2d(const Pslg& g, const Parameters& params, const InteriorMode& interior = {});

/// Symmetric Hausdorff distance between two segment sets, sampled.
double segment_hausdorff(const std::vector<std::array<Point3, 2>>& a, const std::vector<std::array<Point3, 2>>& b,
                         std::size_t samples_per_unit);

void write_svg(const std::filesystem::path& path, const Mesh2dResult& r);

}  // namespace vorocrust
