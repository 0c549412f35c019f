#pragma once

#include <array>
#include <map>
#include <ostream>
#include <vector>

#include "vorocrust/refinement.hpp"

namespace vorocrust {

/// x lies in the open ball, with a relative margin so that points computed
/// to lie on the sphere do not count.
inline bool strictly_inside(const Point3& x, const Ball& b) {
  return distance(b.center, x) < b.radius * (1.0 - 1e-12);
}

/// The two intersection points of a triplet of spheres. g_up is on the side of
/// (c1 - c0) x (c2 - c0) for the triplet sorted by id.
struct SeedPairCandidate {
  std::array<int, 3> triplet{-1, -1, -1};
  Point3 g_up, g_down;
  bool up_covered = false;
  bool down_covered = false;
  std::vector<int> covering;
};

struct HalfCovered {
  std::array<int, 4> quartet{-1, -1, -1, -1};
  SeedPairCandidate pair;
};

/// Intersection points of an overlapping triplet (ids in any order).
/// Empty when the spheres do not meet in two points or the centers are collinear.
std::optional<SeedPairCandidate> triplet_points(const BallIndex& balls, std::array<int, 3> t);

/// Every quartet (triplet plus a fourth ball) covering exactly one of the
/// triplet's two points, deduplicated by sorted ids.
std::vector<HalfCovered> find_half_covered(const BallIndex& balls, int threads = 1);

struct ShrinkageRatio {
  double delta = 0.0;
  double bound = 0.0;
};

/// Delta = (r_q - |q - g_down|) / r_q and the bound |q - g_up| / |q - g_down| - 1.
/// Throws Error("not half-covered") unless |q - g_down| <= r_q <= |q - g_up|.
ShrinkageRatio shrinkage_ratio(const Ball& q, const Point3& g_up, const Point3& g_down);

/// Smallest radius assigned to each ball over all quartets.
struct ShrinkPlan {
  std::map<int, double> radius;
  int iteration = 0;
  double max_delta = 0.0;
  /// Applied shrinks whose Delta exceeds alpha / (2 - alpha).
  std::size_t beyond_alpha_half = 0;
};

ShrinkPlan plan_shrinks(const BallIndex& balls, const std::vector<HalfCovered>& candidates, double alpha);

struct CoverageDistribution {
  std::array<std::size_t, 100> bins{};
  std::size_t samples = 0;
  std::size_t uncovered = 0;

  std::size_t binned() const;
  /// Empirical F(a) = Pr[f(x) <= a] at the bin edges.
  std::array<double, 100> cdf() const;
};

/// Histogram of f(x) = max over covering balls of 1 - |x - p| / r_p for n
/// uniform boundary samples (surface if present, creases otherwise).
CoverageDistribution coverage_distribution(const BallIndex& balls, const InputComplex& mesh, std::size_t n, Rng& rng);

/// Total variation distance between the normalized histograms.
double tv_distance(const CoverageDistribution& a, const CoverageDistribution& b);

struct SliverIteration {
  int iteration = 0;
  std::size_t candidates = 0;
  double max_delta = 0.0;
  double tv_distance = 0.0;
  std::size_t balls_shrunk = 0;
  std::size_t balls_added = 0;
  double sliver_percent = 0.0;
  bool safe_mode = false;
  std::size_t beyond_alpha_half = 0;
};

struct SliverResult {
  std::vector<SliverIteration> log;
  /// Post-RMPS coverage distributions, the first taken before any shrink.
  std::vector<CoverageDistribution> distributions;
  int iterations = 0;
  bool safe_mode = false;
};

struct SliverOptions {
  int max_iterations = 100;
  bool start_in_safe_mode = false;
  std::size_t coverage_samples = 100000;
  int threads = 1;
};

/// find -> plan -> shrink -> RMPS until no half-covered pair is left. After
/// max_iterations the loop restarts once with alpha/2-deep coverage.
SliverResult eliminate_slivers(Refiner& refiner, const InputComplex& mesh, const Parameters& params, Rng& rng,
                               const SliverOptions& opt = {});

void write_sliver_log(std::ostream& out, const SliverResult& r);

}  // namespace vorocrust
