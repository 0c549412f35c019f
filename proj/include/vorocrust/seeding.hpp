#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "vorocrust/bvh.hpp"
#include "vorocrust/sliver.hpp"

namespace vorocrust {

enum class SeedLabel { interior = 0, exterior = 1 };
enum class SeedKind { surface = 0, volume = 1 };

const char* to_string(SeedLabel l);
const char* to_string(SeedKind k);

struct Seed {
  Point3 p;
  /// Guidance radius.
  double radius = 0.0;
  SeedLabel label = SeedLabel::interior;
  SeedKind kind = SeedKind::surface;
  std::array<int, 3> triplet{-1, -1, -1};
};

struct SeedSet {
  std::vector<Seed> seeds;
  /// Surface seed pairs (index on the exterior side, index on the interior
  /// side) after merging duplicates.
  std::vector<std::array<int, 2>> pairs;
  /// Duplicates merged with a seed of the other label.
  std::size_t label_conflicts = 0;

  std::size_t count(SeedKind k) const;
};

/// Outward normal attached to a ball: its facet normal, or the mean normal
/// around its crease edge or corner vertex.
Vec3 ball_normal(const Ball& b, const InputComplex& mesh, const Strata& strata);

/// Seed pairs at the intersection points of every overlapping triplet whose
/// points are not strictly inside a fourth ball. Throws
/// Error("sliver escaped elimination") on a half-covered pair.
SeedSet surface_seeds(const BallIndex& balls, const InputComplex& mesh, const Strata& strata,
                      const TriangleBvh& locator, int threads = 1);

struct InteriorOptions {
  int miss_limit = 100;
  /// Keep volume seeds labeled exterior.
  bool keep_exterior = false;
  /// Spokes stay in the z = 0 plane.
  bool planar = false;
};

struct InteriorMode {
  enum class Kind { random, lattice, none } kind = Kind::random;
  double spacing = 0.0;
};

/// "random", "none" or "lattice:SPACING".
InteriorMode parse_interior_mode(const std::string& s);

/// Dart throwing in the 3x box followed by spoke darts, then a Lipschitz
/// fixpoint on the volume radii. Appends volume seeds.
void interior_seeds_random(SeedSet& seeds, const BallIndex& balls, const InputComplex& mesh, const Parameters& params,
                           Rng& rng, const InteriorOptions& opt = {});

/// Cubic lattice over the input bounding box with the given spacing, kept
/// where strictly outside every ball and every surface guidance ball and
/// inside the domain.
void interior_seeds_lattice(SeedSet& seeds, const BallIndex& balls, const InputComplex& mesh,
                            const TriangleBvh& locator, double spacing);

/// Lattice points lo + spacing * (i, j, k) covering the box.
std::vector<Point3> lattice_points(const Aabb& box, double spacing);

std::vector<Point3> seed_positions(const SeedSet& seeds);

/// "x,y,z,r,label,kind" with 17 significant digits.
void write_seeds_csv(const std::filesystem::path& path, const SeedSet& seeds);

}  // namespace vorocrust
