#include <set>

#include "doctest.h"
#include "vorocrust/features.hpp"
#include "vorocrust/parameters.hpp"

using namespace vorocrust;

namespace {

const std::filesystem::path kData = VOROCRUST_DATA_DIR;

InputComplex load(const char* name) { return load_mesh(kData / name, MeshFormat::off); }

}  // namespace

TEST_CASE("cube strata") {
  const InputComplex m = load("cube.off");
  const Strata s = detect_features(m, degrees(60));
  CHECK(s.corners.size() == 8);
  CHECK(s.creases.size() == 12);
  CHECK(s.patches.size() == 6);
  // 12 cube edges are sharp; 6 face diagonals are not
  CHECK(s.sharp_edge_count() == 12);
  for (const auto& c : s.creases) {
    CHECK_FALSE(c.closed);
    CHECK(c.start_corner >= 0);
    CHECK(c.end_corner >= 0);
    CHECK(c.length == doctest::Approx(1.0));
  }
  for (const auto& p : s.patches) CHECK(p.area == doctest::Approx(1.0));
  // oriented normals point outward: (facet centroid - 0.5) . n > 0
  for (std::size_t f = 0; f < m.triangles().size(); ++f) {
    const int fi = static_cast<int>(f);
    const Point3 c = (m.facet_point(fi, 0) + m.facet_point(fi, 1) + m.facet_point(fi, 2)) / 3.0;
    CHECK(dot(c - Point3{0.5, 0.5, 0.5}, s.facet_normal[f]) > 0.0);
  }
  for (std::size_t k = 0; k < s.corners.size(); ++k) CHECK(s.corner_creases[k].size() == 3);
}

TEST_CASE("smooth models have no sharp features") {
  for (const char* name : {"icosphere3.off", "torus.off"}) {
    const Strata s = detect_features(load(name), degrees(60));
    CHECK(s.corners.empty());
    CHECK(s.creases.empty());
    CHECK(s.patches.size() == 1);
  }
}

TEST_CASE("small threshold turns icosahedron edges sharp") {
  const InputComplex m = load("icosahedron.off");
  // dihedral normal angle of the icosahedron is about 41.8 degrees
  CHECK(detect_features(m, degrees(60)).sharp_edge_count() == 0);
  const Strata s = detect_features(m, degrees(30));
  CHECK(s.sharp_edge_count() == 30);
  CHECK(s.corners.size() == 12);
  CHECK(s.patches.size() == 20);
}

TEST_CASE("smoothing flattens patches and keeps features") {
  const InputComplex ico = load("icosahedron.off");
  const Strata s0 = detect_features(ico, degrees(60));
  const double before = max_patch_normal_deviation(ico, s0);
  const SmoothingResult r = smooth_patches(ico, s0, degrees(60), degrees(175), 6);
  CHECK(r.rounds >= 1);
  CHECK(r.effective_theta_flat < before);
  CHECK(r.strata.patches.size() == 1);
  CHECK(r.mesh.is_watertight());

  const InputComplex cube = load("cube.off");
  const Strata c0 = detect_features(cube, degrees(60));
  const SmoothingResult rc = smooth_patches(cube, c0, degrees(60), degrees(175), 6);
  CHECK(rc.strata.corners.size() == 8);
  CHECK(rc.strata.creases.size() == 12);
  // corners stay exactly where they were
  std::set<std::array<double, 3>> orig, kept;
  for (int v : c0.corners) orig.insert({cube.vertices()[v].x, cube.vertices()[v].y, cube.vertices()[v].z});
  for (int v : rc.strata.corners)
    kept.insert({rc.mesh.vertices()[v].x, rc.mesh.vertices()[v].y, rc.mesh.vertices()[v].z});
  CHECK(orig == kept);
}

TEST_CASE("two segments meeting at a sharp angle make a corner") {
  // PSLG-like wire: right angle at vertex 1, straight continuation at vertex 2
  const InputComplex m({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 2, 0}}, {}, {{0, 1}, {1, 2}, {2, 3}});
  const Strata s = detect_features(m, degrees(60));
  std::set<int> corners(s.corners.begin(), s.corners.end());
  CHECK(corners.count(1) == 1);
  CHECK(corners.count(2) == 0);
  CHECK(corners.count(0) == 1);  // dangling end
  CHECK(s.creases.size() == 2);
}
