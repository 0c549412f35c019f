#include <set>

#include "doctest.h"
#include "vorocrust/sliver.hpp"

using namespace vorocrust;

namespace {

Ball ball(Point3 c, double r) { return {c, r, StratumKind::patch, 0, 0, {}}; }

// Every (i<j<k) mutually overlapping triplet whose two points are covered
// unequally, with each ball that strictly covers one of them.
std::set<std::array<int, 4>> exhaustive_half_covered(const std::vector<Ball>& b) {
  std::set<std::array<int, 4>> out;
  const int n = static_cast<int>(b.size());
  auto meet = [&](int i, int j) { return distance(b[i].center, b[j].center) < b[i].radius + b[j].radius; };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (!meet(i, j) || !meet(i, k) || !meet(j, k)) continue;
        std::vector<Point3> g;
        try {
          g = sphere_triplet_points(b[i].sphere(), b[j].sphere(), b[k].sphere());
        } catch (const Error&) {
          continue;
        }
        if (g.size() != 2) continue;
        std::vector<int> cu, cd;
        for (int l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          if (distance(g[0], b[l].center) < b[l].radius * (1 - 1e-12)) cu.push_back(l);
          if (distance(g[1], b[l].center) < b[l].radius * (1 - 1e-12)) cd.push_back(l);
        }
        if (cu.empty() == cd.empty()) continue;
        for (int l : cu.empty() ? cd : cu) {
          std::array<int, 4> q{i, j, k, l};
          std::sort(q.begin(), q.end());
          out.insert(q);
        }
      }
  return out;
}

}  // namespace

TEST_CASE("shrinkage ratio") {
  const Ball q = ball({0, 0, 0}, 1.0);
  const auto s = shrinkage_ratio(q, {1.2, 0, 0}, {0, 0.9, 0});
  CHECK(s.delta == doctest::Approx(0.1));
  CHECK(s.bound == doctest::Approx(1.2 / 0.9 - 1.0));
  CHECK(s.delta <= s.bound);
  CHECK_THROWS_WITH_AS(shrinkage_ratio(q, {0.5, 0, 0}, {0, 0.9, 0}), "not half-covered", Error);
  CHECK_THROWS_WITH_AS(shrinkage_ratio(q, {2, 0, 0}, {0, 1.5, 0}), "not half-covered", Error);
}

TEST_CASE("a fourth ball over one intersection point is a sliver") {
  const double h = std::sqrt(3.0) / 2.0;
  BallIndex idx(0.25);
  idx.add(ball({0, 0, 0}, 1));
  idx.add(ball({1, 0, 0}, 1));
  idx.add(ball({0.5, h, 0}, 1));
  const double zg = std::sqrt(2.0 / 3.0);
  idx.add(ball({0.5, std::sqrt(3.0) / 6.0, zg + 0.5}, 0.6));  // covers g_up only

  const auto tp = triplet_points(idx, {2, 0, 1});
  REQUIRE(tp.has_value());
  CHECK(tp->triplet == std::array<int, 3>{0, 1, 2});
  CHECK(tp->g_up.z == doctest::Approx(zg));

  const auto hc = find_half_covered(idx);
  std::set<std::array<int, 4>> got;
  for (const auto& x : hc) got.insert(x.quartet);
  CHECK(got.count({0, 1, 2, 3}) == 1);

  const auto plan = plan_shrinks(idx, hc, 1.0 - std::sqrt(3.0) / 2.0);
  REQUIRE_FALSE(plan.radius.empty());
  for (const auto& [id, r] : plan.radius) idx.set_radius(id, r);
  CHECK(find_half_covered(idx).empty());
}

TEST_CASE("find_half_covered equals an exhaustive quadruple scan") {
  Rng rng(8);
  std::size_t nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Ball> b;
    BallIndex idx(0.25);
    const int n = 6 + trial % 20;
    for (int i = 0; i < n; ++i) {
      b.push_back(ball({uniform01(rng), uniform01(rng), 0.3 * uniform01(rng)}, 0.2 + 0.3 * uniform01(rng)));
      idx.add(b.back());
    }
    const auto want = exhaustive_half_covered(b);
    std::set<std::array<int, 4>> got;
    for (const auto& x : find_half_covered(idx, 1 + trial % 3)) got.insert(x.quartet);
    CHECK(got == want);
    nonempty += !want.empty();
  }
  CHECK(nonempty > 10);
}

TEST_CASE("coverage distribution and total variation") {
  CoverageDistribution a, b;
  a.bins[10] = 50;
  a.bins[20] = 50;
  a.samples = 100;
  b.bins[10] = 50;
  b.bins[30] = 50;
  b.samples = 100;
  CHECK(a.binned() == 100);
  CHECK(tv_distance(a, a) == doctest::Approx(0.0));
  CHECK(tv_distance(a, b) == doctest::Approx(0.5));
  const auto F = a.cdf();
  CHECK(F[99] == doctest::Approx(1.0));
  CHECK(F[10] == doctest::Approx(0.5));
}

TEST_CASE("sliver log is one JSON object per iteration") {
  SliverResult r;
  r.log.push_back({1, 12, 0.05, 0.01, 3, 2, 4.0, false, 0});
  r.log.push_back({2, 0, 0.0, 0.002, 0, 0, 0.0, false, 0});
  std::ostringstream out;
  write_sliver_log(out, r);
  const std::string s = out.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 2);
  CHECK(s.find("\"iteration\":1") != std::string::npos);
  CHECK(s.find("\"candidates\":12") != std::string::npos);
}
