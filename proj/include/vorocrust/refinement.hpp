#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "vorocrust/spatial_index.hpp"

namespace vorocrust {

/// A piece of a crease edge (n = 2) or of a patch facet (n = 3).
struct Subface {
  std::array<Point3, 3> v;
  int n = 3;
  StratumKind kind = StratumKind::patch;
  int stratum = -1;
  int element = -1;

  double measure() const;
  Point3 centroid() const;
  ClosestPoint closest(const Point3& p) const;
  Point3 sample(Rng& rng) const;
  /// Halves a segment, or splits a triangle 4-way at its edge midpoints.
  std::vector<Subface> subdivide() const;
  /// Vertices, centroid and edge midpoints.
  std::vector<Point3> probe_points() const;
};

Locus locus_on(const Strata& strata, const Subface& s, const Point3& p);

/// ||p - x|| <= (1 - alpha) r_p.
inline bool is_deep_covered(const Point3& x, const Ball& b, double alpha) {
  return distance(b.center, x) <= (1.0 - alpha) * b.radius;
}

/// Relaxed co-smoothness of sigma with the point p (on its own face):
/// q* is the closest point of sigma to p.
bool cosmooth_test(const Strata& strata, const Subface& sigma, const Locus& p, double theta, double tiny);

/// Largest radii r'_i <= r_i with r'_i <= r'_j + L ||c_i - c_j|| for all
/// pairs (Dijkstra-style propagation from the smallest radius).
std::vector<double> lipschitz_fixpoint(const std::vector<Point3>& centers, std::vector<double> radii, double L);

struct RefinementStats {
  std::size_t samples = 0;
  std::size_t accepted = 0;
  std::size_t misses = 0;
  std::size_t subdivisions = 0;
  std::size_t density_rejections = 0;
  std::size_t density_shrinks = 0;
  std::size_t violation_shrinks = 0;
  std::size_t lipschitz_shrinks = 0;
  std::size_t external_shrinks = 0;
  std::size_t stratum_runs = 0;
};

struct ShrinkEvent {
  int ball = -1;
  double from = 0.0;
  double to = 0.0;
  const char* reason = "";
};

/// The RMPS engine: owns the ball set and runs corner, crease and patch
/// phases, re-running strata whose balls (or whose neighbors' balls) shrink.
class Refiner {
 public:
  Refiner(const InputComplex& mesh, const Strata& strata, const BoundaryIndex& boundary, const Parameters& params,
          Rng& rng);

  /// Runs (or resumes) refinement until every stratum is clean.
  void run();
  /// Shrinks a ball from outside the engine (sliver elimination) and marks
  /// the affected strata for another pass.
  void shrink(int ball, double radius, const char* reason = "external");
  /// Deep-coverage constant used by coverage tests (alpha or alpha/2 in safe mode).
  void set_coverage_alpha(double a) { alpha_cov_ = a; }
  double coverage_alpha() const { return alpha_cov_; }

  double initial_radius(const Locus& p) const;
  /// Shrinks balls not co-smooth with sigma to 0.49 ||p - q*||.
  int detect_violations(const Subface& sigma);
  int enforce_lipschitz(StratumKind type);
  /// One MPS pass over a stratum.
  void mps_stratum(StratumKind kind, int stratum);

  const BallIndex& balls() const { return balls_; }
  const RefinementStats& stats() const { return stats_; }
  const std::vector<ShrinkEvent>& shrink_log() const { return shrink_log_; }

 private:
  std::vector<Subface> initial_pool(StratumKind kind, int stratum) const;
  /// 0 keep, 1 excluded (inside a lower-dimensional ball), 2 deep covered.
  int classify(const Subface& s);
  void mark_dirty(StratumKind kind, int stratum);
  void add_corner_balls();

  const InputComplex& mesh_;
  const Strata& strata_;
  const BoundaryIndex& boundary_;
  const Parameters& params_;
  Rng& rng_;
  BallIndex balls_;
  double alpha_cov_;
  double tiny_;
  std::array<std::vector<char>, 3> dirty_;
  bool corners_added_ = false;
  RefinementStats stats_;
  std::vector<ShrinkEvent> shrink_log_;
};

struct ConditionReport {
  std::size_t samples = 0;
  std::size_t c1 = 0;
  std::size_t c2 = 0;
  std::size_t c3 = 0;
  std::size_t c4_coverage = 0;
  std::size_t c4_separation = 0;
  std::size_t exclusivity = 0;
  /// Samples inside no ball at all (also counted in c4_coverage).
  std::size_t uncovered = 0;
  bool all_clear() const { return c1 + c2 + c3 + c4_coverage + exclusivity == 0; }
};

/// Monte-Carlo C1/C4 scan over n boundary samples plus exhaustive C2, C3,
/// separation and protection-exclusivity scans.
ConditionReport check_conditions(const BallIndex& balls, const InputComplex& mesh, const Strata& strata,
                                 const Parameters& params, double coverage_alpha, std::size_t n_samples,
                                 std::uint64_t seed, int threads = 1);

/// "type stratum x y z r" per line.
void write_ball_dump(const std::filesystem::path& path, const BallIndex& balls);
std::vector<Ball> read_ball_dump(const std::filesystem::path& path);

}  // namespace vorocrust
