#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "vorocrust/geometry.hpp"

namespace vorocrust {

/// An edge of the input complex with every facet incident to it. Edges with
/// no facets are wire segments (PSLG input).
struct MeshEdge {
  int a = -1;
  int b = -1;
  std::vector<int> facets;
};

/// Triangle mesh (plus optional wire segments) with edge adjacency.
class InputComplex {
 public:
  InputComplex() = default;
  /// Builds adjacency. Throws Error on out-of-range indices or non-finite
  /// coordinates; drops facets with repeated vertices.
  InputComplex(std::vector<Point3> vertices, std::vector<std::array<int, 3>> triangles,
               std::vector<std::array<int, 2>> segments = {});

  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<MeshEdge>& edges() const { return edges_; }
  const std::array<int, 3>& facet_edges(int f) const { return facet_edges_[f]; }
  const std::vector<int>& vertex_edges(int v) const { return vertex_edges_[v]; }
  const std::vector<int>& vertex_facets(int v) const { return vertex_facets_[v]; }

  /// Edge id for the unordered pair (a, b), or -1.
  int edge_id(int a, int b) const;
  /// The vertex of facet f opposite to edge e.
  int opposite_vertex(int f, int e) const;
  /// True when facet f traverses edge e as (edge.a -> edge.b).
  bool facet_uses_edge_forward(int f, int e) const;

  Vec3 facet_normal(int f) const;
  double facet_area(int f) const;
  Point3 facet_point(int f, int k) const { return vertices_[triangles_[f][k]]; }

  const Aabb& bbox() const { return bbox_; }
  /// Diagonal of the bounding box; every relative tolerance multiplies this.
  double scale() const { return scale_; }

  /// Every edge has exactly two incident facets.
  bool is_watertight() const;
  bool has_facets() const { return !triangles_.empty(); }

 private:
  std::vector<Point3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<MeshEdge> edges_;
  std::vector<std::array<int, 3>> facet_edges_;
  std::vector<std::vector<int>> vertex_edges_;
  std::vector<std::vector<int>> vertex_facets_;
  std::unordered_map<std::uint64_t, int> edge_lookup_;
  Aabb bbox_;
  double scale_ = 0.0;
};

enum class MeshFormat { off, obj, stl };

MeshFormat mesh_format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  bool require_watertight = true;
  /// Relative (to the bounding-box diagonal) welding distance.
  double weld_tolerance = 1e-9;
};

/// Reads OFF, OBJ (v/f) or STL (ASCII or binary). Polygons are fan
/// triangulated, duplicate vertices welded and degenerate facets dropped.
InputComplex load_mesh(const std::filesystem::path& path, MeshFormat format, const LoadOptions& options = {});

/// Welds vertices within tol (absolute) and remaps triangle indices.
void weld_vertices(std::vector<Point3>& vertices, std::vector<std::array<int, 3>>& triangles, double tol);

}  // namespace vorocrust
