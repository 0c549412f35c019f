#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "vorocrust/geometry.hpp"

namespace vorocrust {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double degrees(double deg) { return deg * kPi / 180.0; }

struct Parameters {
  /// Sharp-feature angle threshold, radians, in (0, pi/2).
  double theta_sharp = degrees(60.0);
  /// Lipschitz constant for ball radii, in (0, 1).
  double lipschitz = 0.25;
  /// Constant upper bound on ball radii; infinity means unbounded.
  double sizing = std::numeric_limits<double>::infinity();
  /// Optional spatially varying sizing; overrides `sizing` when set.
  std::function<double(const Point3&)> sizing_field;
  /// Deep-coverage constant.
  double alpha = 1.0 - std::sqrt(3.0) / 2.0;
  std::uint64_t rng_seed = 0;
  double smoothing_dihedral_threshold = degrees(175.0);
  int smoothing_iterations = 6;
  int miss_limit = 100;
  double density_rejection_prob = 0.1;
  int max_sliver_iterations = 100;
  /// Boundary supersampling counts for the crease and surface trees.
  std::size_t crease_supersamples = 100000;
  std::size_t surface_supersamples = 1000000;

  double sizing_at(const Point3& p) const { return sizing_field ? sizing_field(p) : sizing; }

  /// Throws Error naming the offending field.
  void validate() const;

  /// Reduced supersampling for quick runs (10^4 crease, 10^5 surface).
  static Parameters desk_profile();
};

}  // namespace vorocrust
