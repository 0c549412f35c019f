#include "vorocrust/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

#include "vorocrust/log.hpp"

namespace vorocrust {

double Subface::measure() const {
  return n == 2 ? distance(v[0], v[1]) : triangle_area(v[0], v[1], v[2]);
}

Point3 Subface::centroid() const { return n == 2 ? (v[0] + v[1]) * 0.5 : (v[0] + v[1] + v[2]) / 3.0; }

ClosestPoint Subface::closest(const Point3& p) const {
  return n == 2 ? closest_point_segment(p, v[0], v[1]) : closest_point_triangle(p, v[0], v[1], v[2]);
}

Point3 Subface::sample(Rng& rng) const {
  if (n == 2) return v[0] + (v[1] - v[0]) * uniform01(rng);
  return sample_triangle(rng, v[0], v[1], v[2]);
}

std::vector<Subface> Subface::subdivide() const {
  std::vector<Subface> out;
  Subface child = *this;
  if (n == 2) {
    const Point3 m = (v[0] + v[1]) * 0.5;
    child.v = {v[0], m, Point3{}};
    out.push_back(child);
    child.v = {m, v[1], Point3{}};
    out.push_back(child);
    return out;
  }
  const Point3 m01 = (v[0] + v[1]) * 0.5, m12 = (v[1] + v[2]) * 0.5, m20 = (v[2] + v[0]) * 0.5;
  for (const auto& t : {std::array<Point3, 3>{v[0], m01, m20}, std::array<Point3, 3>{m01, v[1], m12},
                        std::array<Point3, 3>{m20, m12, v[2]}, std::array<Point3, 3>{m01, m12, m20}}) {
    child.v = t;
    out.push_back(child);
  }
  return out;
}

std::vector<Point3> Subface::probe_points() const {
  if (n == 2) return {v[0], v[1], (v[0] + v[1]) * 0.5};
  return {v[0], v[1], v[2], centroid(), (v[0] + v[1]) * 0.5, (v[1] + v[2]) * 0.5, (v[2] + v[0]) * 0.5};
}

Locus locus_on(const Strata& strata, const Subface& s, const Point3& p) {
  return s.kind == StratumKind::crease ? crease_locus(strata, s.element, p) : patch_locus(strata, s.element, p);
}

bool cosmooth_test(const Strata& strata, const Subface& sigma, const Locus& p, double theta, double tiny) {
  const auto q = sigma.closest(p.point);
  return cosmooth(strata, p, locus_on(strata, sigma, q.point), theta, tiny);
}

std::vector<double> lipschitz_fixpoint(const std::vector<Point3>& centers, std::vector<double> radii, double L) {
  const std::size_t n = centers.size();
  if (n < 2) return radii;
  KdTree tree;
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i);
  tree.build(centers, ids);
  const double rmax = *std::max_element(radii.begin(), radii.end());
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t i = 0; i < n; ++i) heap.push({radii[i], static_cast<int>(i)});
  std::vector<char> done(n, 0);
  std::vector<int> near;
  while (!heap.empty()) {
    const auto [r, i] = heap.top();
    heap.pop();
    if (done[i] || r != radii[i]) continue;
    done[i] = 1;
    near.clear();
    tree.within(centers[i], (rmax - r) / L, near);
    for (int j : near) {
      if (done[j]) continue;
      const double cand = r + L * distance(centers[i], centers[j]);
      if (cand < radii[j]) {
        radii[j] = cand;
        heap.push({cand, j});
      }
    }
  }
  return radii;
}

Refiner::Refiner(const InputComplex& mesh, const Strata& strata, const BoundaryIndex& boundary,
                 const Parameters& params, Rng& rng)
    : mesh_(mesh),
      strata_(strata),
      boundary_(boundary),
      params_(params),
      rng_(rng),
      balls_(params.lipschitz),
      alpha_cov_(params.alpha),
      tiny_(1e-12 * mesh.scale()) {
  dirty_[0].assign(strata.corners.size(), 0);
  dirty_[1].assign(strata.creases.size(), 1);
  dirty_[2].assign(strata.patches.size(), 1);
}

double Refiner::initial_radius(const Locus& p) const {
  double r = params_.sizing_at(p.point);
  if (const auto q = boundary_.nearest_non_cosmooth(p, params_.theta_sharp)) r = std::min(r, 0.49 * q->distance);
  const auto hit = balls_.nearest(p.point, p.kind);
  if (hit.id >= 0) r = std::min(r, balls_.ball(hit.id).radius + params_.lipschitz * hit.distance);
  if (!std::isfinite(r)) r = mesh_.scale();
  return r;
}

void Refiner::mark_dirty(StratumKind kind, int stratum) {
  dirty_[static_cast<int>(kind)][stratum] = 1;
  if (kind == StratumKind::corner) {
    for (int c : strata_.corner_creases[stratum]) dirty_[1][c] = 1;
    for (int p : strata_.corner_patches[stratum]) dirty_[2][p] = 1;
  } else if (kind == StratumKind::crease) {
    for (int p : strata_.crease_patches[stratum]) dirty_[2][p] = 1;
  }
}

void Refiner::shrink(int id, double radius, const char* reason) {
  const Ball& b = balls_.ball(id);
  if (!(radius < b.radius)) return;
  shrink_log_.push_back({id, b.radius, radius, reason});
  balls_.set_radius(id, radius);
  mark_dirty(b.type, b.stratum);
  if (std::string_view(reason) == "external") ++stats_.external_shrinks;
}

void Refiner::add_corner_balls() {
  for (int c = 0; c < static_cast<int>(strata_.corners.size()); ++c) {
    const Locus loc = corner_locus(mesh_, strata_, c);
    const double r = initial_radius(loc);
    if (!(r > tiny_)) throw Error("degenerate corner");
    balls_.add({loc.point, r, StratumKind::corner, c, loc.element, Vec3{}});
  }
}

int Refiner::detect_violations(const Subface& sigma) {
  const Point3 c = sigma.centroid();
  double rho = 0.0;
  for (int k = 0; k < sigma.n; ++k) rho = std::max(rho, distance(c, sigma.v[k]));
  double rmax = 0.0;
  for (auto t : {StratumKind::corner, StratumKind::crease, StratumKind::patch})
    rmax = std::max(rmax, balls_.max_radius(t));
  const auto cand = balls_.centers_within(c, rho + rmax / 0.49);
  int count = 0;
  for (int id : cand) {
    const Ball& b = balls_.ball(id);
    const auto cp = sigma.closest(b.center);
    if (b.radius <= 0.49 * cp.distance || cp.distance <= tiny_) continue;
    if (cosmooth(strata_, b.locus(), locus_on(strata_, sigma, cp.point), params_.theta_sharp, tiny_)) continue;
    shrink(id, 0.49 * cp.distance, "violation");
    ++stats_.violation_shrinks;
    ++count;
  }
  return count;
}

int Refiner::enforce_lipschitz(StratumKind type) {
  std::vector<int> ids;
  std::vector<Point3> centers;
  std::vector<double> radii;
  for (int id = 0; id < static_cast<int>(balls_.size()); ++id)
    if (balls_.ball(id).type == type) {
      ids.push_back(id);
      centers.push_back(balls_.ball(id).center);
      radii.push_back(balls_.ball(id).radius);
    }
  const auto fixed = lipschitz_fixpoint(centers, radii, params_.lipschitz);
  int count = 0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (fixed[i] < radii[i]) {
      shrink(ids[i], fixed[i], "lipschitz");
      ++stats_.lipschitz_shrinks;
      ++count;
    }
  balls_.set_lipschitz_valid(type, true);
  return count;
}

std::vector<Subface> Refiner::initial_pool(StratumKind kind, int stratum) const {
  std::vector<Subface> pool;
  const auto& V = mesh_.vertices();
  if (kind == StratumKind::crease) {
    for (int e : strata_.creases[stratum].edges) {
      Subface s;
      s.n = 2;
      s.kind = kind;
      s.stratum = stratum;
      s.element = e;
      s.v = {V[mesh_.edges()[e].a], V[mesh_.edges()[e].b], Point3{}};
      pool.push_back(s);
    }
  } else {
    for (int f : strata_.patches[stratum].facets) {
      const auto& t = mesh_.triangles()[f];
      Subface s;
      s.n = 3;
      s.kind = kind;
      s.stratum = stratum;
      s.element = f;
      s.v = {V[t[0]], V[t[1]], V[t[2]]};
      pool.push_back(s);
    }
  }
  return pool;
}

int Refiner::classify(const Subface& s) {
  const auto cand = balls_.balls_covering(s.v[0]);
  const auto probes = s.probe_points();
  auto inside = [&](const Ball& b) {
    for (int k = 0; k < s.n; ++k)
      if (distance(b.center, s.v[k]) > b.radius) return false;
    return true;
  };
  auto deep = [&](const Ball& b) {
    const double R = (1.0 - alpha_cov_) * b.radius;
    for (const auto& p : probes)
      if (distance(b.center, p) > R) return false;
    const auto cp = s.closest(b.center);
    return cosmooth(strata_, b.locus(), locus_on(strata_, s, cp.point), params_.theta_sharp, tiny_);
  };
  for (int pass = 0; pass < 2; ++pass) {
    int verdict = 0;
    int by = -1;
    for (int id : cand) {
      const Ball& b = balls_.ball(id);
      if (static_cast<int>(b.type) < static_cast<int>(s.kind) && inside(b)) {
        verdict = 1;
        by = id;
        break;
      }
    }
    if (!verdict)
      for (int id : cand)
        if (deep(balls_.ball(id))) {
          verdict = 2;
          by = id;
          break;
        }
    if (!verdict) return 0;
    if (pass == 1) return verdict;
    const double before = balls_.ball(by).radius;
    detect_violations(s);
    if (balls_.ball(by).radius == before) return verdict;
  }
  return 0;
}

void Refiner::mps_stratum(StratumKind kind, int stratum) {
  ++stats_.stratum_runs;
  const double alpha = params_.alpha;
  std::vector<Subface> pool;
  for (const auto& s : initial_pool(kind, stratum))
    if (classify(s) == 0) pool.push_back(s);
  std::vector<double> cum;
  auto rebuild = [&] {
    cum.resize(pool.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      acc += pool[i].measure();
      cum[i] = acc;
    }
  };
  rebuild();
  int misses = 0;
  int depth = 0;
  while (!pool.empty()) {
    if (misses >= params_.miss_limit) {
      std::vector<Subface> next;
      for (const auto& s : pool)
        for (const auto& c : s.subdivide())
          if (classify(c) == 0) next.push_back(c);
      pool = std::move(next);
      rebuild();
      misses = 0;
      ++stats_.subdivisions;
      spdlog::debug("{} {}: subdivision depth {}, pool {}", to_string(kind), stratum, depth + 1, pool.size());
      if (++depth > 64) throw Error("refinement not converging");
      continue;
    }
    const double u = uniform01(rng_) * cum.back();
    const std::size_t k =
        std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(), pool.size() - 1);
    const Subface& s = pool[k];
    const Point3 x = s.sample(rng_);
    const Locus loc = locus_on(strata_, s, x);
    ++stats_.samples;

    bool miss = false;
    bool violation = false;
    for (int id : balls_.balls_covering(x)) {
      const Ball& b = balls_.ball(id);
      const double d = distance(b.center, x);
      if (static_cast<int>(b.type) < static_cast<int>(kind) && d < b.radius) {
        miss = true;
        break;
      }
      if (d <= (1.0 - alpha_cov_) * b.radius) {
        if (cosmooth(strata_, b.locus(), loc, params_.theta_sharp, tiny_)) {
          miss = true;
          break;
        }
        violation = true;
      }
    }
    if (!miss && violation) {
      detect_violations(s);
      for (int id : balls_.balls_covering(x))
        if (is_deep_covered(x, balls_.ball(id), alpha_cov_)) miss = true;
    }
    double r = miss ? 0.0 : initial_radius(loc);
    if (!miss && r > tiny_) {
      double dmin = std::numeric_limits<double>::infinity();
      double dhigher = std::numeric_limits<double>::infinity();
      for (int id : balls_.centers_within(x, r)) {
        const Ball& b = balls_.ball(id);
        const double d = distance(b.center, x);
        if (d < (1.0 - alpha) * r) dmin = std::min(dmin, d);
        if (static_cast<int>(b.type) > static_cast<int>(kind)) dhigher = std::min(dhigher, d);
      }
      if (dmin < std::numeric_limits<double>::infinity()) {
        if (uniform01(rng_) < params_.density_rejection_prob) {
          ++stats_.density_rejections;
          miss = true;
        } else {
          r = dmin / (1.0 - alpha);
          ++stats_.density_shrinks;
        }
      }
      // a protecting ball may not swallow centers of higher-dimensional balls
      if (dhigher < r) r = dhigher * (1.0 - 1e-9);
    }
    if (miss || !(r > tiny_)) {
      ++misses;
      ++stats_.misses;
      continue;
    }
    balls_.add({x, r, kind, stratum, s.element, loc.orientation});
    ++stats_.accepted;
    misses = 0;
  }
}

void Refiner::run() {
  if (!corners_added_) {
    add_corner_balls();
    corners_added_ = true;
  }
  auto first_dirty = [&](int k) {
    const auto it = std::find(dirty_[k].begin(), dirty_[k].end(), 1);
    return it == dirty_[k].end() ? -1 : static_cast<int>(it - dirty_[k].begin());
  };
  const std::size_t limit = 200000 + 50 * (strata_.creases.size() + strata_.patches.size());
  for (std::size_t guard = 0;; ++guard) {
    if (guard > limit) throw Error("refinement not converging");
    if (first_dirty(0) >= 0 || !balls_.lipschitz_valid(StratumKind::corner)) {
      std::fill(dirty_[0].begin(), dirty_[0].end(), 0);
      enforce_lipschitz(StratumKind::corner);
      continue;
    }
    if (const int c = first_dirty(1); c >= 0) {
      dirty_[1][c] = 0;
      mps_stratum(StratumKind::crease, c);
      continue;
    }
    if (!balls_.lipschitz_valid(StratumKind::crease)) {
      enforce_lipschitz(StratumKind::crease);
      continue;
    }
    if (const int p = first_dirty(2); p >= 0) {
      dirty_[2][p] = 0;
      mps_stratum(StratumKind::patch, p);
      continue;
    }
    if (!balls_.lipschitz_valid(StratumKind::patch)) {
      enforce_lipschitz(StratumKind::patch);
      continue;
    }
    break;
  }
  spdlog::info("rmps: {} balls, {} samples, {} stratum runs, {} shrinks", balls_.size(), stats_.samples,
               stats_.stratum_runs, shrink_log_.size());
}

namespace {

std::vector<Locus> boundary_samples(const InputComplex& mesh, const Strata& strata, std::size_t n, Rng& rng) {
  std::vector<Locus> out;
  const auto& V = mesh.vertices();
  for (int c = 0; c < static_cast<int>(strata.corners.size()); ++c) out.push_back(corner_locus(mesh, strata, c));
  std::vector<int> edges;
  std::vector<double> lengths;
  for (const auto& cr : strata.creases)
    for (int e : cr.edges) {
      edges.push_back(e);
      lengths.push_back(distance(V[mesh.edges()[e].a], V[mesh.edges()[e].b]));
    }
  const std::size_t n_crease = mesh.has_facets() ? n / 10 : n;
  if (!edges.empty()) {
    std::vector<double> cum(lengths.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) cum[i] = acc += lengths[i];
    for (std::size_t i = 0; i < n_crease; ++i) {
      const std::size_t k = std::min<std::size_t>(
          std::upper_bound(cum.begin(), cum.end(), uniform01(rng) * acc) - cum.begin(), edges.size() - 1);
      const auto& ed = mesh.edges()[edges[k]];
      out.push_back(crease_locus(strata, edges[k], V[ed.a] + (V[ed.b] - V[ed.a]) * uniform01(rng)));
    }
  }
  if (mesh.has_facets()) {
    const std::size_t nf = mesh.triangles().size();
    std::vector<double> cum(nf);
    double acc = 0.0;
    for (std::size_t f = 0; f < nf; ++f) cum[f] = acc += mesh.facet_area(static_cast<int>(f));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t f =
          std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), uniform01(rng) * acc) - cum.begin(), nf - 1);
      const auto& t = mesh.triangles()[f];
      out.push_back(patch_locus(strata, static_cast<int>(f), sample_triangle(rng, V[t[0]], V[t[1]], V[t[2]])));
    }
  }
  return out;
}

}  // namespace

ConditionReport check_conditions(const BallIndex& balls, const InputComplex& mesh, const Strata& strata,
                                 const Parameters& params, double coverage_alpha, std::size_t n_samples,
                                 std::uint64_t seed, int threads) {
  ConditionReport rep;
  const double theta = params.theta_sharp;
  const double tiny = 1e-12 * mesh.scale();
  const double rel = 1e-9;
  Rng rng = stage_rng(seed, "check_conditions");
  const auto samples = boundary_samples(mesh, strata, n_samples, rng);
  rep.samples = samples.size();

  const int nthreads = std::max(1, threads);
  std::vector<ConditionReport> partial(nthreads);
  auto work = [&](int t) {
    ConditionReport& pr = partial[t];
    for (std::size_t i = t; i < samples.size(); i += nthreads) {
      const Locus& x = samples[i];
      const auto cover = balls.balls_covering(x.point);
      bool c1 = false, covered = false;
      for (int id : cover) {
        const Ball& b = balls.ball(id);
        const double d = distance(b.center, x.point);
        const bool smooth = cosmooth(strata, b.locus(), x, theta, tiny);
        if (d < b.radius * (1.0 - rel) && !smooth) c1 = true;
        if (d <= (1.0 - coverage_alpha) * b.radius * (1.0 + rel) && smooth) covered = true;
        // protected neighborhood of a lower-dimensional feature
        if (static_cast<int>(b.type) < static_cast<int>(x.kind) && smooth) covered = true;
      }
      if (c1) ++pr.c1;
      if (!covered) ++pr.c4_coverage;
      if (cover.empty()) ++pr.uncovered;
    }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& pr : partial) {
    rep.c1 += pr.c1;
    rep.c4_coverage += pr.c4_coverage;
    rep.uncovered += pr.uncovered;
  }

  const auto& all = balls.balls();
  const double L = params.lipschitz;
  for (int i = 0; i < static_cast<int>(all.size()); ++i) {
    const Ball& a = all[i];
    for (int j : balls.balls_overlapping(a.sphere(), i, a.type, true)) {
      if (j <= i) continue;
      if (!cosmooth_pair(strata, a.locus(), all[j].locus(), theta, tiny)) ++rep.c2;
    }
    const auto& tree = balls.tree(a.type);
    std::vector<int> near;
    tree.within(a.center, std::max(0.0, (balls.max_radius(a.type) - a.radius)) / L + tiny, near);
    for (int j : near) {
      const Ball& b = all[j];
      if (j != i && b.radius > (a.radius + L * distance(a.center, b.center)) * (1.0 + rel) + tiny) ++rep.c3;
    }
    double rmax = 0.0;
    for (auto t : {StratumKind::corner, StratumKind::crease, StratumKind::patch})
      rmax = std::max(rmax, balls.max_radius(t));
    for (int j : balls.centers_within(a.center, (1.0 - params.alpha) * std::max(rmax, a.radius))) {
      if (j <= i) continue;
      const Ball& b = all[j];
      const double d = distance(a.center, b.center);
      if (d < (1.0 - params.alpha) * std::max(a.radius, b.radius) * (1.0 - rel)) ++rep.c4_separation;
    }
    if (a.type != StratumKind::corner)
      for (int j : balls.balls_covering(a.center)) {
        const Ball& b = all[j];
        if (static_cast<int>(b.type) < static_cast<int>(a.type) &&
            distance(a.center, b.center) < b.radius * (1.0 - rel))
          ++rep.exclusivity;
      }
  }
  return rep;
}

void write_ball_dump(const std::filesystem::path& path, const BallIndex& balls) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  for (const auto& b : balls.balls())
    out << to_string(b.type) << ' ' << b.stratum << ' ' << b.center.x << ' ' << b.center.y << ' ' << b.center.z << ' '
        << b.radius << '\n';
}

std::vector<Ball> read_ball_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable file: " + path.string());
  std::vector<Ball> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string type;
    Ball b;
    if (!(ss >> type >> b.stratum >> b.center.x >> b.center.y >> b.center.z >> b.radius))
      throw Error("malformed ball line: " + line);
    if (type == "corner") b.type = StratumKind::corner;
    else if (type == "crease") b.type = StratumKind::crease;
    else if (type == "patch") b.type = StratumKind::patch;
    else throw Error("unknown ball type: " + type);
    out.push_back(b);
  }
  return out;
}

}  // namespace vorocrust
