#pragma once

#include <vector>

#include "vorocrust/mesh.hpp"

namespace vorocrust {

enum class StratumKind { corner = 0, crease = 1, patch = 2 };

const char* to_string(StratumKind kind);

/// A maximal chain of sharp edges. Edges are listed in walk order and every
/// edge direction follows the walk.
struct Crease {
  std::vector<int> edges;
  /// Walk-ordered vertices; for a cycle the first vertex is not repeated.
  std::vector<int> vertices;
  bool closed = false;
  /// Corner indices (into Strata::corners) at either end, -1 for cycles.
  int start_corner = -1;
  int end_corner = -1;
  double length = 0.0;
};

struct Patch {
  std::vector<int> facets;
  double area = 0.0;
};

struct Strata {
  std::vector<int> corners;  // vertex ids
  std::vector<Crease> creases;
  std::vector<Patch> patches;

  std::vector<char> sharp_edge;
  std::vector<int> edge_crease;      // -1 for non-sharp edges
  std::vector<Vec3> edge_direction;  // unit, oriented along the crease
  std::vector<int> facet_patch;
  std::vector<Vec3> facet_normal;  // unit, oriented consistently per patch
  std::vector<int> vertex_corner;  // index into corners or -1

  std::vector<std::vector<int>> corner_creases;
  std::vector<std::vector<int>> corner_patches;
  std::vector<std::vector<int>> crease_patches;

  /// True when the lower-dimensional stratum lies in the closure of the
  /// higher-dimensional one (corner on crease, corner or crease on patch).
  bool incident(StratumKind low_kind, int low, StratumKind high_kind, int high) const;
  std::size_t sharp_edge_count() const;
};

/// Sharp edges, corners, creases and patches for threshold theta_sharp.
Strata detect_features(const InputComplex& mesh, double theta_sharp);

/// Largest angle between oriented normals of adjacent facets in the same
/// patch (the effective flatness bound), radians.
double max_patch_normal_deviation(const InputComplex& mesh, const Strata& strata);

struct SmoothingResult {
  InputComplex mesh;
  Strata strata;
  int rounds = 0;
  double effective_theta_flat = 0.0;
};

/// Adaptive, crease-aware Loop subdivision. Facets whose intra-patch
/// dihedral angles all exceed `dihedral_threshold` are left alone; crease
/// edges split at their midpoint and corners stay fixed.
SmoothingResult smooth_patches(const InputComplex& mesh, const Strata& strata, double theta_sharp,
                               double dihedral_threshold, int max_iterations);

}  // namespace vorocrust
