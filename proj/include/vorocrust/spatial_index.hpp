#pragma once

#include <array>
#include <optional>
#include <vector>

#include "vorocrust/features.hpp"
#include "vorocrust/kdtree.hpp"
#include "vorocrust/parameters.hpp"
#include "vorocrust/random.hpp"

namespace vorocrust {

/// A point on the boundary together with the face it was taken from.
/// `element` is a vertex id (corner), edge id (crease) or facet id (patch);
/// `orientation` is the crease direction or the patch normal (zero for corners).
struct Locus {
  Point3 point;
  StratumKind kind = StratumKind::patch;
  int stratum = -1;
  int element = -1;
  Vec3 orientation;
};

Locus corner_locus(const InputComplex& mesh, const Strata& strata, int corner);
Locus crease_locus(const Strata& strata, int edge, const Point3& p);
Locus patch_locus(const Strata& strata, int facet, const Point3& p);

/// Relaxed co-smoothness test between a ball center `center` and a boundary
/// point `other` (the closest point of the other face to the center).
///
/// Same stratum: (1) orientation angle <= theta and (2) the displacement lies
/// within theta of a crease line, or at least pi/2 - theta away from a patch
/// normal. A higher-dimensional `other` on a stratum incident to the
/// center's stratum only needs (2). Everything else is not co-smooth; in
/// particular lower-dimensional points never are. `tiny` waives (2) for
/// coincident points.
bool cosmooth(const Strata& strata, const Locus& center, const Locus& other, double theta, double tiny);

/// Symmetric form used for pairs of ball centers: the lower-dimensional
/// center plays the role of `center`; equal dimensions test both ways.
bool cosmooth_pair(const Strata& strata, const Locus& a, const Locus& b, double theta, double tiny);

/// Supersampled boundary: corner tree (exact corners), crease tree and
/// surface tree. Every sample stores its face and orientation.
class BoundaryIndex {
 public:
  BoundaryIndex(const InputComplex& mesh, const Strata& strata, std::size_t crease_samples,
                std::size_t surface_samples, Rng& rng);

  struct Nearest {
    Point3 point;
    double distance = 0.0;
    int sample = -1;
  };

  /// Nearest supersample that is not co-smooth with `p`, over all trees.
  std::optional<Nearest> nearest_non_cosmooth(const Locus& p, double theta) const;

  const std::vector<Locus>& samples() const { return samples_; }
  const KdTree& tree(StratumKind kind) const { return trees_[static_cast<int>(kind)]; }
  const InputComplex& mesh() const { return *mesh_; }
  const Strata& strata() const { return *strata_; }

 private:
  const InputComplex* mesh_;
  const Strata* strata_;
  std::vector<Locus> samples_;
  std::array<KdTree, 3> trees_;
  double tiny_;
};

/// Number of samples per element: proportional to measure, at least one
/// each, stochastic rounding of the remainder.
std::vector<std::size_t> allocate_samples(const std::vector<double>& measures, std::size_t total, Rng& rng);

struct Ball {
  Point3 center;
  double radius = 0.0;
  StratumKind type = StratumKind::patch;
  int stratum = -1;
  int element = -1;
  Vec3 orientation;

  Sphere sphere() const { return {center, radius}; }
  Locus locus() const { return {center, type, stratum, element, orientation}; }
};

/// Query radius of the overlap search for a ball of radius r (A.3).
inline double overlap_query_radius(double r, double L) { return 2.0 * r / (1.0 - L); }
/// Query radius of the covering search around x given the nearest center q (A.4).
inline double covering_query_radius(double r_q, double dist_xq, double L) { return (r_q + L * dist_xq) / (1.0 - L); }

/// Balls indexed by center in one k-d tree per type. Radii only shrink.
/// The Lipschitz bounds of A.3/A.4 are used for a type only while C3 is
/// known to hold within it; otherwise queries fall back to the largest
/// radius of the type, which is always complete.
class BallIndex {
 public:
  explicit BallIndex(double lipschitz) : L_(lipschitz) {}

  int add(const Ball& b);
  void set_radius(int id, double r);
  const Ball& ball(int id) const { return balls_[id]; }
  const std::vector<Ball>& balls() const { return balls_; }
  std::size_t size() const { return balls_.size(); }
  double lipschitz() const { return L_; }

  void set_lipschitz_valid(StratumKind type, bool valid) { lipschitz_valid_[static_cast<int>(type)] = valid; }
  bool lipschitz_valid(StratumKind type) const { return lipschitz_valid_[static_cast<int>(type)]; }
  double max_radius(StratumKind type) const { return rmax_[static_cast<int>(type)]; }

  /// Balls b_q with ||p - q|| < r_p + r_q. `self` is excluded. When `own_type`
  /// is a type whose C3 holds and `member` is set (the query ball is part of
  /// that type), the A.3 radius bounds the search in that tree.
  std::vector<int> balls_overlapping(const Sphere& s, int self = -1, std::optional<StratumKind> own_type = {},
                                     bool member = false) const;
  /// Balls containing x (closed).
  std::vector<int> balls_covering(const Point3& x) const;
  /// Balls whose center lies within r of x.
  std::vector<int> centers_within(const Point3& x, double r) const;
  /// Nearest center of the given type.
  KdTree::Hit nearest(const Point3& x, StratumKind type) const { return trees_[static_cast<int>(type)].nearest(x); }
  const KdTree& tree(StratumKind type) const { return trees_[static_cast<int>(type)]; }

 private:
  double L_;
  std::vector<Ball> balls_;
  std::array<KdTree, 3> trees_;
  std::array<double, 3> rmax_{0.0, 0.0, 0.0};
  std::array<bool, 3> lipschitz_valid_{false, false, false};
};

}  // namespace vorocrust
