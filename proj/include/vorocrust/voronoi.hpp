#pragma once

#include <filesystem>
#include <vector>

#include "vorocrust/convex_polyhedron.hpp"
#include "vorocrust/mesh.hpp"
#include "vorocrust/seeding.hpp"

namespace vorocrust {

/// Unclipped Voronoi cell of one seed inside a bounding box. Face tags are
/// neighbor seed ids, or negative for box sides.
struct VoronoiCell {
  int seed = -1;
  ConvexPolyhedron poly;
};

/// Cells by bisector clipping of the box, visiting neighbors by increasing
/// distance until the next one lies beyond twice the farthest cell vertex.
/// Throws Error("duplicate seeds") for coincident seeds.
std::vector<VoronoiCell> compute_cells(const std::vector<Point3>& seeds, const Aabb& box, int threads = 1);

/// Same cells clipped against every other seed (reference construction).
VoronoiCell brute_force_cell(const std::vector<Point3>& seeds, int i, const Aabb& box);

struct SurfaceMesh {
  std::vector<Point3> vertices;
  std::vector<std::vector<int>> facets;
  /// (interior seed, exterior seed) of each facet.
  std::vector<std::array<int, 2>> provenance;

  int euler_characteristic() const;
  /// Every edge shared by exactly two facets.
  bool is_closed_manifold() const;
  /// Fan triangulation anchored at the facet vertex nearest the centroid.
  std::vector<std::array<int, 3>> triangulate() const;
};

/// Facets between cells of opposite labels, oriented outward from the
/// interior side.
SurfaceMesh extract_surface(const std::vector<VoronoiCell>& cells, const SeedSet& seeds, double scale);

/// Number of cells with a vertex outside one of their face planes.
std::size_t verify_convexity(const std::vector<VoronoiCell>& cells, double tol);

struct QualityReport {
  double frac_below_30 = 0.0;
  double frac_above_90 = 0.0;
  double q_min = 0.0;
  double rho_max = 0.0;
  double hausdorff = 0.0;
  std::size_t surface_seeds = 0;
  std::size_t volume_seeds = 0;
  double t_surface = 0.0;
  double t_volume = 0.0;
  std::size_t non_convex = 0;
  int euler = 0;
  std::size_t surface_facets = 0;
  std::size_t surface_triangles = 0;
  std::size_t cells = 0;
};

struct Timings {
  double surface = 0.0;
  double volume = 0.0;
};

/// Symmetric sampled Hausdorff distance between two triangle sets.
double sampled_hausdorff(const std::vector<Point3>& va, const std::vector<std::array<int, 3>>& ta,
                         const std::vector<Point3>& vb, const std::vector<std::array<int, 3>>& tb, std::size_t n,
                         Rng& rng);

QualityReport quality_report(const SurfaceMesh& surface, const std::vector<VoronoiCell>& cells, const SeedSet& seeds,
                             const InputComplex& input, const Timings& timings, std::size_t hausdorff_samples,
                             Rng& rng);

void write_off(const std::filesystem::path& path, const SurfaceMesh& s);
void write_obj(const std::filesystem::path& path, const SurfaceMesh& s);
/// Legacy VTK unstructured grid of polyhedron cells (type 42).
void write_vtk(const std::filesystem::path& path, const std::vector<VoronoiCell>& cells);
/// "cell <seed> <nv> <nf>", nv vertex lines, nf face lines "k i0 ... ik-1".
void write_cells_text(const std::filesystem::path& path, const std::vector<VoronoiCell>& cells);

}  // namespace vorocrust
