#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "vorocrust/refinement.hpp"

using namespace vorocrust;

namespace {

const std::filesystem::path kData = VOROCRUST_DATA_DIR;

Point3 rand_point(Rng& rng, double s = 1.0) { return {s * uniform01(rng), s * uniform01(rng), s * uniform01(rng)}; }

}  // namespace

TEST_CASE("kd-tree queries equal brute force") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10 + trial * 37;
    std::vector<Point3> pts(n);
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) pts[i] = rand_point(rng), ids[i] = i;
    KdTree t;
    // half bulk, half incremental
    t.build({pts.begin(), pts.begin() + n / 2}, {ids.begin(), ids.begin() + n / 2});
    for (int i = n / 2; i < n; ++i) t.insert(pts[i], i);
    std::vector<char> alive(n, 1);
    for (int i = 0; i < n; i += 5) {
      CHECK(t.remove(i));
      alive[i] = 0;
    }
    CHECK(t.size() == static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1)));
    for (int q = 0; q < 30; ++q) {
      const Point3 p = rand_point(rng, 1.2);
      double best = 1e300;
      int best_id = -1;
      for (int i = 0; i < n; ++i)
        if (alive[i] && distance(p, pts[i]) < best) best = distance(p, pts[i]), best_id = i;
      const auto h = t.nearest(p);
      CHECK(h.id == best_id);
      CHECK(h.distance == doctest::Approx(best));

      // filtered nearest: odd ids only
      double best_odd = 1e300;
      for (int i = 1; i < n; i += 2)
        if (alive[i]) best_odd = std::min(best_odd, distance(p, pts[i]));
      const auto ho = t.nearest(p, [](int id) { return id % 2 == 1; });
      CHECK(ho.distance == doctest::Approx(best_odd));

      const double r = 0.3 * uniform01(rng);
      std::vector<int> got;
      t.within(p, r, got);
      std::sort(got.begin(), got.end());
      std::vector<int> want;
      for (int i = 0; i < n; ++i)
        if (alive[i] && distance(p, pts[i]) <= r) want.push_back(i);
      CHECK(got == want);

      const auto kn = t.k_nearest(p, 5);
      std::vector<double> d;
      for (int i = 0; i < n; ++i)
        if (alive[i]) d.push_back(distance(p, pts[i]));
      std::sort(d.begin(), d.end());
      REQUIRE(kn.size() == std::min<std::size_t>(5, d.size()));
      for (std::size_t k = 0; k < kn.size(); ++k) CHECK(kn[k].distance == doctest::Approx(d[k]));
    }
  }
}

TEST_CASE("ball index queries equal exhaustive scans") {
  Rng rng(2);
  const StratumKind kinds[3] = {StratumKind::corner, StratumKind::crease, StratumKind::patch};
  std::size_t mismatches = 0;
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const double L = 0.05 + 0.9 * uniform01(rng);
    const bool lipschitz = fixture % 2 == 0;
    const int n = 5 + static_cast<int>(uniform01(rng) * 40);
    std::vector<Point3> centers(n);
    std::vector<double> radii(n);
    for (int i = 0; i < n; ++i) centers[i] = rand_point(rng), radii[i] = 0.02 + 0.3 * uniform01(rng);
    std::vector<StratumKind> type(n);
    for (int i = 0; i < n; ++i) type[i] = kinds[static_cast<int>(uniform01(rng) * 3) % 3];
    if (lipschitz) {
      // make every type L-Lipschitz with the O(n^2) oracle below
      for (auto k : kinds) {
        bool changed = true;
        while (changed) {
          changed = false;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              if (type[i] == k && type[j] == k && radii[i] > radii[j] + L * distance(centers[i], centers[j])) {
                radii[i] = radii[j] + L * distance(centers[i], centers[j]);
                changed = true;
              }
        }
      }
    }
    BallIndex idx(L);
    for (int i = 0; i < n; ++i) idx.add({centers[i], radii[i], type[i], 0, 0, {}});
    if (lipschitz)
      for (auto k : kinds) idx.set_lipschitz_valid(k, true);

    for (int q = 0; q < 3; ++q) {
      // overlap query from a member ball
      const int self = static_cast<int>(uniform01(rng) * n) % n;
      const auto got = idx.balls_overlapping(idx.ball(self).sphere(), self, type[self], true);
      std::vector<int> want;
      for (int j = 0; j < n; ++j)
        if (j != self && distance(centers[j], centers[self]) < radii[j] + radii[self]) want.push_back(j);
      mismatches += got != want;

      const Point3 x = rand_point(rng);
      const auto cov = idx.balls_covering(x);
      std::vector<int> wc;
      for (int j = 0; j < n; ++j)
        if (distance(centers[j], x) <= radii[j]) wc.push_back(j);
      mismatches += cov != wc;

      const double r = 0.4 * uniform01(rng);
      const auto cw = idx.centers_within(x, r);
      std::vector<int> ww;
      for (int j = 0; j < n; ++j)
        if (distance(centers[j], x) <= r) ww.push_back(j);
      mismatches += cw != ww;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("radii only shrink") {
  BallIndex idx(0.25);
  const int id = idx.add({{0, 0, 0}, 1.0, StratumKind::patch, 0, 0, {}});
  idx.set_radius(id, 0.5);
  CHECK(idx.ball(id).radius == 0.5);
  CHECK_THROWS_WITH_AS(idx.set_radius(id, 0.7), "ball radius may only shrink", Error);
}

TEST_CASE("query radius bounds") {
  // A.3: a ball of radius r overlaps q only if |p-q| < r + r_q <= r + r + L|p-q|
  CHECK(overlap_query_radius(1.0, 0.25) == doctest::Approx(2.0 / 0.75));
  CHECK(covering_query_radius(1.0, 2.0, 0.5) == doctest::Approx(4.0));
}

TEST_CASE("sample allocation") {
  Rng rng(9);
  const std::vector<double> m{1.0, 0.0001, 3.0, 0.5};
  const auto c = allocate_samples(m, 1000, rng);
  REQUIRE(c.size() == 4);
  for (auto x : c) CHECK(x >= 1);
  const std::size_t total = std::accumulate(c.begin(), c.end(), std::size_t{0});
  CHECK(total >= 999);
  CHECK(total <= 1004);
  CHECK(c[2] > c[0]);
}

TEST_CASE("co-smoothness on the cube") {
  const InputComplex m = load_mesh(kData / "cube.off", MeshFormat::off);
  const Strata s = detect_features(m, degrees(60));
  int top = -1, side = -1;
  for (int f = 0; f < 12 && (top < 0 || side < 0); ++f) {
    if (s.facet_normal[f].z > 0.9) top = f;
    if (s.facet_normal[f].x > 0.9) side = f;
  }
  const double tiny = 1e-12;
  const Locus a = patch_locus(s, top, {0.5, 0.5, 1.0});
  const Locus b = patch_locus(s, top, {0.6, 0.55, 1.0});
  const Locus c = patch_locus(s, side, {1.0, 0.5, 0.5});
  CHECK(cosmooth(s, a, b, degrees(60), tiny));
  CHECK_FALSE(cosmooth(s, a, c, degrees(60), tiny));
  CHECK(cosmooth_pair(s, a, b, degrees(60), tiny));
  const Locus k = corner_locus(m, s, 0);
  CHECK_FALSE(cosmooth(s, a, k, degrees(60), tiny));
}

TEST_CASE("nearest non-co-smooth supersample equals an exhaustive scan") {
  const InputComplex m = load_mesh(kData / "cube.off", MeshFormat::off);
  const Strata s = detect_features(m, degrees(60));
  Rng rng(4);
  const BoundaryIndex bi(m, s, 2000, 20000, rng);
  const double tiny = 1e-12 * m.scale();
  Rng q(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int f = static_cast<int>(uniform01(q) * 12) % 12;
    const auto& t = m.triangles()[f];
    const Locus p = patch_locus(s, f, sample_triangle(q, m.vertices()[t[0]], m.vertices()[t[1]], m.vertices()[t[2]]));
    double best = 1e300;
    for (const auto& x : bi.samples())
      if (!cosmooth(s, p, x, degrees(60), tiny)) best = std::min(best, distance(p.point, x.point));
    const auto got = bi.nearest_non_cosmooth(p, degrees(60));
    REQUIRE(got.has_value());
    CHECK(got->distance == doctest::Approx(best));
  }
}
