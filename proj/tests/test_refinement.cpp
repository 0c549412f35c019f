#include <algorithm>

#include "doctest.h"
#include "vorocrust/refinement.hpp"

using namespace vorocrust;

namespace {

const std::filesystem::path kData = VOROCRUST_DATA_DIR;

// Bellman-Ford style relaxation until nothing changes.
std::vector<double> relaxation_oracle(const std::vector<Point3>& c, std::vector<double> r, double L) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) {
        const double bound = r[j] + L * distance(c[i], c[j]);
        if (r[i] > bound) {
          r[i] = bound;
          changed = true;
        }
      }
  }
  return r;
}

struct CubeRun {
  InputComplex mesh = load_mesh(kData / "cube.off", MeshFormat::off);
  Parameters params = [] {
    Parameters p = Parameters::desk_profile();
    p.rng_seed = 42;
    return p;
  }();
  Strata strata = detect_features(mesh, params.theta_sharp);
  Rng brng = stage_rng(params.rng_seed, "boundary");
  BoundaryIndex boundary{mesh, strata, params.crease_supersamples, params.surface_supersamples, brng};
  Rng rrng = stage_rng(params.rng_seed, "rmps");
  Refiner refiner{mesh, strata, boundary, params, rrng};
};

}  // namespace

TEST_CASE("lipschitz fixpoint equals the O(n^2) relaxation") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial * 3;
    std::vector<Point3> c(n);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
      c[i] = {uniform01(rng), uniform01(rng), uniform01(rng)};
      r[i] = 0.01 + uniform01(rng);
    }
    const double L = 0.05 + 0.9 * uniform01(rng);
    const auto got = lipschitz_fixpoint(c, r, L);
    const auto want = relaxation_oracle(c, r, L);
    for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("subfaces") {
  Subface t;
  t.v = {Point3{0, 0, 0}, Point3{2, 0, 0}, Point3{0, 2, 0}};
  CHECK(t.measure() == doctest::Approx(2.0));
  const auto kids = t.subdivide();
  REQUIRE(kids.size() == 4);
  double area = 0.0;
  for (const auto& k : kids) area += k.measure();
  CHECK(area == doctest::Approx(2.0));
  CHECK(t.probe_points().size() == 7);

  Subface e;
  e.n = 2;
  e.kind = StratumKind::crease;
  e.v = {Point3{0, 0, 0}, Point3{1, 0, 0}, Point3{}};
  CHECK(e.measure() == doctest::Approx(1.0));
  CHECK(e.subdivide().size() == 2);
  CHECK(e.closest({0.5, 1, 0}).distance == doctest::Approx(1.0));
}

TEST_CASE("deep coverage") {
  const Ball b{{0, 0, 0}, 1.0, StratumKind::patch, 0, 0, {}};
  CHECK(is_deep_covered({0.5, 0, 0}, b, 0.25));
  CHECK_FALSE(is_deep_covered({0.8, 0, 0}, b, 0.25));
}

TEST_CASE("cube refinement satisfies the ball conditions") {
  CubeRun run;
  run.refiner.run();
  const BallIndex& balls = run.refiner.balls();
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& b : balls.balls()) ++counts[static_cast<int>(b.type)];
  CHECK(counts[0] == 8);
  CHECK(counts[1] >= 12);
  CHECK(counts[2] >= 6);
  // corner balls sit exactly on the corners
  for (const auto& b : balls.balls())
    if (b.type == StratumKind::corner) {
      const auto& p = b.center;
      CHECK((p.x == 0.0 || p.x == 1.0));
      CHECK((p.y == 0.0 || p.y == 1.0));
      CHECK((p.z == 0.0 || p.z == 1.0));
    }
  const ConditionReport r =
      check_conditions(balls, run.mesh, run.strata, run.params, run.refiner.coverage_alpha(), 20000, 7, 4);
  CHECK(r.c1 == 0);
  CHECK(r.c2 == 0);
  CHECK(r.c3 == 0);
  CHECK(r.c4_coverage == 0);
  CHECK(r.exclusivity == 0);
  CHECK(r.uncovered == 0);
}

TEST_CASE("enforce_lipschitz equals the relaxation oracle after an external shrink") {
  CubeRun run;
  run.refiner.run();
  const BallIndex& balls = run.refiner.balls();
  int victim = -1;
  for (int id = 0; id < static_cast<int>(balls.size()); ++id)
    if (balls.ball(id).type == StratumKind::patch) {
      victim = id;
      break;
    }
  REQUIRE(victim >= 0);
  run.refiner.shrink(victim, balls.ball(victim).radius * 0.1, "test");
  std::vector<int> ids;
  std::vector<Point3> c;
  std::vector<double> r;
  for (int id = 0; id < static_cast<int>(balls.size()); ++id)
    if (balls.ball(id).type == StratumKind::patch) {
      ids.push_back(id);
      c.push_back(balls.ball(id).center);
      r.push_back(balls.ball(id).radius);
    }
  const auto want = relaxation_oracle(c, r, run.params.lipschitz);
  const int shrunk = run.refiner.enforce_lipschitz(StratumKind::patch);
  CHECK(shrunk > 0);
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(balls.ball(ids[i]).radius == doctest::Approx(want[i]));
  CHECK(balls.lipschitz_valid(StratumKind::patch));
}

TEST_CASE("initial radius follows the sizing rule") {
  CubeRun run;
  run.params.sizing = 0.05;
  Rng rng(1);
  Refiner capped(run.mesh, run.strata, run.boundary, run.params, rng);
  int top = 0;
  while (run.strata.facet_normal[top].z < 0.9) ++top;
  const Locus p = patch_locus(run.strata, top, {0.5, 0.5, 1.0});
  CHECK(capped.initial_radius(p) == doctest::Approx(0.05));
  // unbounded sizing: 0.49 times the distance to the nearest edge (0.5)
  Rng rng2(1);
  run.params.sizing = std::numeric_limits<double>::infinity();
  Refiner free(run.mesh, run.strata, run.boundary, run.params, rng2);
  CHECK(free.initial_radius(p) == doctest::Approx(0.49 * 0.5).epsilon(0.02));
}

TEST_CASE("ball dump round trip") {
  CubeRun run;
  run.refiner.run();
  const auto path = std::filesystem::temp_directory_path() / "vorocrust_test_balls.txt";
  write_ball_dump(path, run.refiner.balls());
  const auto back = read_ball_dump(path);
  REQUIRE(back.size() == run.refiner.balls().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].type == run.refiner.balls().ball(static_cast<int>(i)).type);
    CHECK(back[i].radius == run.refiner.balls().ball(static_cast<int>(i)).radius);
  }
}

TEST_CASE("parameter validation") {
  Parameters p;
  CHECK_NOTHROW(p.validate());
  p.lipschitz = 1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("lipschitz"), Error);
  p = Parameters{};
  p.theta_sharp = degrees(95);
  CHECK_THROWS_AS(p.validate(), Error);
  p = Parameters{};
  p.sizing = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}
