// One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "vorocrust/log.hpp"
#include "vorocrust/pipeline.hpp"

using namespace vorocrust;

namespace {

const std::filesystem::path kData = VOROCRUST_DATA_DIR;
int failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

template <class... A>
std::string fmt_line(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Parameters base_params() {
  Parameters p = Parameters::desk_profile();
  p.theta_sharp = degrees(60);
  p.lipschitz = 0.25;
  p.sizing = std::numeric_limits<double>::infinity();
  p.rng_seed = 42;
  return p;
}

RunConfig config(const char* model, RunMode mode, std::size_t condition_samples) {
  RunConfig c;
  c.mode = mode;
  c.input = kData / model;
  c.params = base_params();
  c.condition_samples = condition_samples;
  c.threads = 4;
  return c;
}

BallIndex rebuild(const std::vector<Ball>& balls, double L) {
  BallIndex idx(L);
  for (const Ball& b : balls) idx.add(b);
  return idx;
}

// ---- criterion 4 helpers ----------------------------------------------------

double worst_bisector_deviation(const RunResult& r) {
  double worst = 0.0;
  for (std::size_t f = 0; f < r.surface.facets.size(); ++f) {
    const auto [in, out] = r.surface.provenance[f];
    const Plane bis = Plane::bisector(r.seeds.seeds[in].p, r.seeds.seeds[out].p);
    for (int v : r.surface.facets[f]) worst = std::max(worst, std::abs(bis.signed_distance(r.surface.vertices[v])));
  }
  return worst;
}

std::size_t balls_with_few_seeds(const RunResult& r) {
  std::size_t bad = 0;
  for (const Ball& b : r.balls) {
    int on = 0;
    for (const Seed& s : r.seeds.seeds) on += std::abs(distance(s.p, b.center) - b.radius) <= 1e-7 * b.radius;
    bad += on < 4;
  }
  return bad;
}

// ---- criterion 8 oracles ----------------------------------------------------

std::vector<double> relaxation(const std::vector<Point3>& c, std::vector<double> r, double L) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j)
        if (r[i] > r[j] + L * distance(c[i], c[j])) {
          r[i] = r[j] + L * distance(c[i], c[j]);
          changed = true;
        }
  }
  return r;
}

bool same_vertex_sets(const ConvexPolyhedron& a, const ConvexPolyhedron& b, double tol) {
  auto covered = [tol](const ConvexPolyhedron& x, const ConvexPolyhedron& y) {
    for (const auto& p : x.vertices()) {
      bool hit = false;
      for (const auto& q : y.vertices()) hit = hit || distance(p, q) <= tol;
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

std::size_t cell_mismatches(double& vol_err) {
  Rng rng(12);
  std::vector<Point3> seeds(200);
  for (auto& p : seeds) p = {uniform01(rng), uniform01(rng), uniform01(rng)};
  const Aabb box{{-0.5, -0.5, -0.5}, {1.5, 1.5, 1.5}};
  const auto cells = compute_cells(seeds, box, 4);
  std::size_t bad = 0;
  double vol = 0.0;
  for (int i = 0; i < 200; ++i) {
    bad += !same_vertex_sets(cells[i].poly, brute_force_cell(seeds, i, box).poly, 1e-9);
    vol += cells[i].poly.volume();
  }
  vol_err = std::abs(vol - box.volume()) / box.volume();
  return bad;
}

std::size_t index_mismatches() {
  Rng rng(2);
  const StratumKind kinds[3] = {StratumKind::corner, StratumKind::crease, StratumKind::patch};
  std::size_t bad = 0;
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const double L = 0.05 + 0.9 * uniform01(rng);
    const int n = 5 + static_cast<int>(uniform01(rng) * 40);
    std::vector<Point3> c(n);
    std::vector<double> r(n);
    std::vector<StratumKind> type(n);
    for (int i = 0; i < n; ++i) {
      c[i] = {uniform01(rng), uniform01(rng), uniform01(rng)};
      r[i] = 0.02 + 0.3 * uniform01(rng);
      type[i] = kinds[static_cast<int>(uniform01(rng) * 3) % 3];
    }
    const bool lipschitz = fixture % 2 == 0;
    if (lipschitz)
      for (auto k : kinds) {
        std::vector<int> ids;
        std::vector<Point3> ck;
        std::vector<double> rk;
        for (int i = 0; i < n; ++i)
          if (type[i] == k) ids.push_back(i), ck.push_back(c[i]), rk.push_back(r[i]);
        rk = relaxation(ck, rk, L);
        for (std::size_t m = 0; m < ids.size(); ++m) r[ids[m]] = rk[m];
      }
    BallIndex idx(L);
    for (int i = 0; i < n; ++i) idx.add({c[i], r[i], type[i], 0, 0, {}});
    if (lipschitz)
      for (auto k : kinds) idx.set_lipschitz_valid(k, true);
    for (int q = 0; q < 3; ++q) {
      const int self = static_cast<int>(uniform01(rng) * n) % n;
      std::vector<int> want;
      for (int j = 0; j < n; ++j)
        if (j != self && distance(c[j], c[self]) < r[j] + r[self]) want.push_back(j);
      bad += idx.balls_overlapping(idx.ball(self).sphere(), self, type[self], true) != want;
      const Point3 x{uniform01(rng), uniform01(rng), uniform01(rng)};
      std::vector<int> wc;
      for (int j = 0; j < n; ++j)
        if (distance(c[j], x) <= r[j]) wc.push_back(j);
      bad += idx.balls_covering(x) != wc;
    }
  }
  return bad;
}

std::size_t nearest_mismatches() {
  std::size_t bad = 0;
  int fixtures = 0;
  for (const char* model : {"cube.off", "icosahedron.off"}) {
    const InputComplex m = load_mesh(kData / model, MeshFormat::off);
    const double theta = model[0] == 'c' ? degrees(60) : degrees(30);
    const Strata s = detect_features(m, theta);
    Rng rng(4);
    const BoundaryIndex bi(m, s, 2000, 20000, rng);
    const double tiny = 1e-12 * m.scale();
    Rng q(5);
    for (int trial = 0; trial < 500; ++trial, ++fixtures) {
      const int nf = static_cast<int>(m.triangles().size());
      const int f = static_cast<int>(uniform01(q) * nf) % nf;
      const auto& t = m.triangles()[f];
      const Locus p =
          patch_locus(s, f, sample_triangle(q, m.vertices()[t[0]], m.vertices()[t[1]], m.vertices()[t[2]]));
      double best = std::numeric_limits<double>::infinity();
      for (const auto& x : bi.samples())
        if (!cosmooth(s, p, x, theta, tiny)) best = std::min(best, distance(p.point, x.point));
      const auto got = bi.nearest_non_cosmooth(p, theta);
      if (!got) {
        bad += std::isfinite(best);
        continue;
      }
      bad += std::abs(got->distance - best) > 1e-12 * m.scale();
    }
  }
  return fixtures == 1000 ? bad : bad + 1;
}

// Shrinks one patch ball to a tenth on a refined cube, then compares
// enforce_lipschitz with the relaxation fixpoint.
double lipschitz_error() {
  const Parameters P = base_params();
  const InputComplex mesh = load_mesh(kData / "cube.off", MeshFormat::off);
  const Strata strata = detect_features(mesh, P.theta_sharp);
  Rng brng = stage_rng(42, "boundary");
  const BoundaryIndex boundary(mesh, strata, P.crease_supersamples, P.surface_supersamples, brng);
  Rng rrng = stage_rng(42, "rmps");
  Refiner refiner(mesh, strata, boundary, P, rrng);
  refiner.run();
  const BallIndex& balls = refiner.balls();
  std::vector<int> ids;
  for (int id = 0; id < static_cast<int>(balls.size()); ++id)
    if (balls.ball(id).type == StratumKind::patch) ids.push_back(id);
  refiner.shrink(ids.front(), 0.1 * balls.ball(ids.front()).radius, "acceptance");
  std::vector<Point3> c;
  std::vector<double> r;
  for (int id : ids) c.push_back(balls.ball(id).center), r.push_back(balls.ball(id).radius);
  const auto want = relaxation(c, r, P.lipschitz);
  refiner.enforce_lipschitz(StratumKind::patch);
  double err = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    err = std::max(err, std::abs(balls.ball(ids[i]).radius - want[i]) / want[i]);
  return err;
}

// ---- criterion 9 oracles ----------------------------------------------------

bool inside_by_winding(const Pslg& g, double x, double y) {
  double total = 0.0;
  for (const auto& s : g.segments) {
    const double ax = g.vertices[s[0]][0] - x, ay = g.vertices[s[0]][1] - y;
    const double bx = g.vertices[s[1]][0] - x, by = g.vertices[s[1]][1] - y;
    total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
  }
  return std::lround(std::abs(total / (2.0 * kPi))) % 2 == 1;
}

double seg_dist(const Point3& p, const Point3& a, const Point3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp(dot(p - a, ab) / norm2(ab), 0.0, 1.0);
  return distance(p, a + ab * t);
}

double dense_hausdorff(const std::vector<std::array<Point3, 2>>& a, const std::vector<std::array<Point3, 2>>& b) {
  auto side = [](const auto& from, const auto& to) {
    double worst = 0.0;
    for (const auto& s : from)
      for (int k = 0; k <= 200; ++k) {
        const Point3 p = s[0] + (s[1] - s[0]) * (k / 200.0);
        double best = 1e300;
        for (const auto& t : to) best = std::min(best, seg_dist(p, t[0], t[1]));
        worst = std::max(worst, best);
      }
    return worst;
  };
  return std::max(side(a, b), side(b, a));
}

}  // namespace

int main() {
  init_logging();

  // 3D runs shared by several criteria
  RunConfig cube_cfg = config("cube.off", RunMode::mesh3d, 100000);
  cube_cfg.out = std::filesystem::temp_directory_path() / "vorocrust_acceptance_a";
  const RunResult cube = run_pipeline(cube_cfg);
  const RunResult sphere = run_pipeline(config("icosphere3.off", RunMode::report_only, 100000));
  const RunResult torus = run_pipeline(config("torus.off", RunMode::report_only, 0));
  RunConfig lo = config("icosphere3.off", RunMode::report_only, 0), hi = lo;
  lo.params.lipschitz = 0.1;
  hi.params.lipschitz = 0.9;
  const RunResult sphere_lo = run_pipeline(lo);
  const RunResult sphere_hi = run_pipeline(hi);

  // 1
  {
    const ConditionReport& a = *cube.conditions;
    const ConditionReport& b = *sphere.conditions;
    verdict(1, a.all_clear() && b.all_clear() && a.samples >= 100000 && b.samples >= 100000,
            fmt_line("cube c1=%zu c2=%zu c3=%zu c4=%zu excl=%zu; icosphere c1=%zu c2=%zu c3=%zu c4=%zu excl=%zu", a.c1,
                a.c2, a.c3, a.c4_coverage, a.exclusivity, b.c1, b.c2, b.c3, b.c4_coverage, b.exclusivity));
  }
  // 2
  {
    const double L = base_params().lipschitz;
    const std::size_t hc_cube = find_half_covered(rebuild(cube.balls, L)).size();
    const std::size_t hc_sphere = find_half_covered(rebuild(sphere.balls, L)).size();
    const bool ok = hc_cube == 0 && hc_sphere == 0 && cube.sliver->iterations <= 100 &&
                    sphere.sliver->iterations <= 100 && !cube.sliver->safe_mode && !sphere.sliver->safe_mode;
    verdict(2, ok,
            fmt_line("half-covered cube=%zu icosphere=%zu; iterations cube=%d icosphere=%d torus=%d", hc_cube, hc_sphere,
                cube.sliver->iterations, sphere.sliver->iterations, torus.sliver->iterations));
  }
  // 3
  std::optional<Mesh2dResult> planar;
  {
    planar = mesh_2d(load_pslg(kData / "square_hole.poly"), base_params(), {});
    std::size_t nc = 0;
    for (const RunResult* r : {&cube, &sphere, &torus, &sphere_lo, &sphere_hi})
      nc += verify_convexity(r->cells, 1e-9 * 3.0 * std::sqrt(3.0)) + r->quality->non_convex;
    nc += planar->report.non_convex;
    verdict(3, nc == 0, fmt_line("non-convex cells over 6 runs: %zu", nc));
  }
  // 4
  {
    const double sc_cube = load_mesh(kData / "cube.off", MeshFormat::off).scale();
    const double sc_sphere = load_mesh(kData / "icosphere3.off", MeshFormat::off).scale();
    const double sc_torus = load_mesh(kData / "torus.off", MeshFormat::off).scale();
    const double d1 = worst_bisector_deviation(cube) / sc_cube;
    const double d2 = worst_bisector_deviation(sphere) / sc_sphere;
    const double d3 = worst_bisector_deviation(torus) / sc_torus;
    const std::size_t few = balls_with_few_seeds(cube) + balls_with_few_seeds(sphere) + balls_with_few_seeds(torus);
    const int e1 = cube.quality->euler, e2 = sphere.quality->euler, e3 = torus.quality->euler;
    const bool ok = std::max({d1, d2, d3}) <= 1e-9 && few == 0 && e1 == 2 && e2 == 2 && e3 == 0;
    verdict(4, ok,
            fmt_line("bisector dev/scale cube=%.2e icosphere=%.2e torus=%.2e; balls with <4 seeds=%zu; euler %d %d %d", d1,
                d2, d3, few, e1, e2, e3));
  }
  // 5
  {
    const InputComplex input = load_mesh(kData / "cube.off", MeshFormat::off);
    std::size_t exact = 0;
    for (const Point3& corner : input.vertices()) {
      bool hit = false;
      for (const Point3& v : cube.surface.vertices) hit = hit || distance(v, corner) <= 1e-9 * input.scale();
      exact += hit;
    }
    const double dh = sphere.quality->hausdorff;
    verdict(5, dh <= 1e-2 && exact == 8, fmt_line("icosphere normalized d_H=%.4e (<= 1e-2); cube corners exact %zu/8", dh, exact));
  }
  // 6
  {
    const QualityReport& q = *sphere.quality;
    const double qlo = sphere_lo.quality->q_min, qhi = sphere_hi.quality->q_min;
    verdict(6, q.q_min >= 0.25 && q.frac_below_30 <= 0.10 && qlo >= qhi,
            fmt_line("icosphere Q_min=%.4f theta<30=%.2f%%; Q_min L=0.1 %.4f >= L=0.9 %.4f", q.q_min,
                100.0 * q.frac_below_30, qlo, qhi));
  }
  // 7
  {
    const auto& d = torus.sliver->distributions;
    const double tv = d.size() >= 2 ? tv_distance(d[d.size() - 2], d.back()) : 1.0;
    const std::size_t n = d.empty() ? 0 : d.back().samples;
    verdict(7, d.size() >= 2 && tv <= 0.05 && n >= 100000,
            fmt_line("torus TV(last two of %zu distributions)=%.4f at %zu samples", d.size(), tv, n));
  }
  // 8
  {
    double vol_err = 0.0;
    const std::size_t cells = cell_mismatches(vol_err);
    const std::size_t index = index_mismatches();
    const std::size_t nearest = nearest_mismatches();
    const double lip = lipschitz_error();
    verdict(8, cells == 0 && vol_err <= 1e-6 && index == 0 && nearest == 0 && lip <= 1e-12,
            fmt_line("cell mismatches=%zu volume err=%.1e; index mismatches=%zu; nearest mismatches=%zu; "
                "lipschitz rel err=%.1e",
                cells, vol_err, index, nearest, lip));
  }
  // 9
  {
    const Pslg g = load_pslg(kData / "square_hole.poly");
    const Mesh2dResult& r = *planar;
    std::size_t nonconvex = 0, labels = 0;
    for (const auto& c : r.cells) nonconvex += !c.poly.is_convex(1e-12);
    for (const auto& s : r.seeds.seeds) labels += (s.label == SeedLabel::interior) != inside_by_winding(g, s.p.x, s.p.y);
    std::vector<std::array<Point3, 2>> input;
    for (const auto& s : g.segments)
      input.push_back({Point3{g.vertices[s[0]][0], g.vertices[s[0]][1], 0}, Point3{g.vertices[s[1]][0], g.vertices[s[1]][1], 0}});
    const double dh = dense_hausdorff(r.boundary, input) / r.mesh.bbox().diagonal();
    // every overlapping pair of circles must be neighbors along one input loop
    BallIndex idx = rebuild(r.balls, base_params().lipschitz);
    const auto chains = crease_ball_chains(idx, r.mesh, detect_features(r.mesh, base_params().theta_sharp));
    std::set<std::pair<int, int>> adjacent;
    for (const auto& ch : chains)
      for (std::size_t k = 0; k + 1 < ch.size(); ++k) adjacent.insert(std::minmax(ch[k], ch[k + 1]));
    std::size_t overlaps = 0;
    for (int i = 0; i < static_cast<int>(r.balls.size()); ++i)
      for (int j = i + 1; j < static_cast<int>(r.balls.size()); ++j)
        overlaps += distance(r.balls[i].center, r.balls[j].center) < r.balls[i].radius + r.balls[j].radius &&
                    !adjacent.count({i, j});
    const bool ok = nonconvex == 0 && r.report.area_error <= 1e-6 && dh <= 1e-2 && overlaps == 0 && labels == 0;
    verdict(9, ok,
            fmt_line("cells=%zu non-convex=%zu area err=%.1e d_H/diag=%.2e non-consecutive overlaps=%zu label errors=%zu",
                r.cells.size(), nonconvex, r.report.area_error, dh, overlaps, labels));
  }
  // 10
  {
    RunConfig again = cube_cfg;
    again.out = std::filesystem::temp_directory_path() / "vorocrust_acceptance_b";
    run_pipeline(again);
    const bool csv = slurp(cube_cfg.out / "seeds.csv") == slurp(again.out / "seeds.csv");
    auto a = nlohmann::json::parse(slurp(cube_cfg.out / "report.json"));
    auto b = nlohmann::json::parse(slurp(again.out / "report.json"));
    a.erase("timings");
    b.erase("timings");
    verdict(10, csv && a == b, fmt_line("seeds.csv identical=%d report.json identical modulo timings=%d", csv, a == b));
  }
  return failures == 0 ? 0 : 1;
}
