#include "vorocrust/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <thread>

#include "vorocrust/log.hpp"

namespace vorocrust {

const char* to_string(SeedLabel l) { return l == SeedLabel::interior ? "interior" : "exterior"; }
const char* to_string(SeedKind k) { return k == SeedKind::surface ? "surface" : "volume"; }

std::size_t SeedSet::count(SeedKind k) const {
  return static_cast<std::size_t>(
      std::count_if(seeds.begin(), seeds.end(), [k](const Seed& s) { return s.kind == k; }));
}

Vec3 ball_normal(const Ball& b, const InputComplex& mesh, const Strata& strata) {
  Vec3 n;
  switch (b.type) {
    case StratumKind::patch:
      return strata.facet_normal[b.element];
    case StratumKind::crease:
      for (int f : mesh.edges()[b.element].facets) n = n + strata.facet_normal[f] * mesh.facet_area(f);
      break;
    case StratumKind::corner:
      for (int f : mesh.vertex_facets(b.element)) n = n + strata.facet_normal[f] * mesh.facet_area(f);
      break;
  }
  return norm(n) > 0.0 ? normalized(n) : n;
}

namespace {

struct RawPair {
  std::array<int, 3> triplet;
  Point3 up, down;
  bool up_exterior;
  double radius;
};

}  // namespace

SeedSet surface_seeds(const BallIndex& balls, const InputComplex& mesh, const Strata& strata,
                      const TriangleBvh& locator, int threads) {
  const int nt = std::max(1, threads);
  const double tol = 1e-9 * mesh.scale();
  std::vector<std::vector<RawPair>> per_ball(balls.size());
  std::vector<std::string> errors(nt);
  auto work = [&](int t) {
    try {
      for (std::size_t i = t; i < balls.size(); i += nt) {
        const int p = static_cast<int>(i);
        std::vector<int> nb;
        for (int q : balls.balls_overlapping(balls.ball(p).sphere(), p))
          if (q > p) nb.push_back(q);
        for (std::size_t a = 0; a < nb.size(); ++a)
          for (std::size_t b = a + 1; b < nb.size(); ++b) {
            const Ball& ba = balls.ball(nb[a]);
            const Ball& bb = balls.ball(nb[b]);
            if (distance(ba.center, bb.center) >= ba.radius + bb.radius) continue;
            const auto sp = triplet_points(balls, {p, nb[a], nb[b]});
            if (!sp) continue;
            bool up_cov = false, down_cov = false;
            auto covered = [&](const Point3& g) {
              for (int id : balls.balls_covering(g))
                if (id != p && id != nb[a] && id != nb[b] && strictly_inside(g, balls.ball(id))) return true;
              return false;
            };
            up_cov = covered(sp->g_up);
            down_cov = covered(sp->g_down);
            if (up_cov != down_cov) throw Error("sliver escaped elimination");
            if (up_cov) continue;
            const Ball& b0 = balls.ball(sp->triplet[0]);
            const Ball& b1 = balls.ball(sp->triplet[1]);
            const Ball& b2 = balls.ball(sp->triplet[2]);
            const Vec3 n = ball_normal(b0, mesh, strata) + ball_normal(b1, mesh, strata) +
                           ball_normal(b2, mesh, strata);
            // foot of the seeds on the plane of the centers
            const Point3 c = (sp->g_up + sp->g_down) * 0.5;
            const double side = norm(n) > 0.0 ? dot(sp->g_up - c, normalized(n)) : 0.0;
            bool up_ext;
            if (std::abs(side) >= tol)
              up_ext = side > 0.0;
            else
              up_ext = !locator.inside(sp->g_up);
            per_ball[i].push_back({sp->triplet, sp->g_up, sp->g_down, up_ext,
                                   (b0.radius + b1.radius + b2.radius) / 3.0});
          }
      }
    } catch (const Error& e) {
      errors[t] = e.what();
    }
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);

  SeedSet out;
  KdTree index;
  auto place = [&](const Point3& g, SeedLabel label, double r, const std::array<int, 3>& t) {
    std::vector<int> near;
    index.within(g, tol, near);
    if (!near.empty()) {
      const int k = *std::min_element(near.begin(), near.end());
      if (out.seeds[k].label != label) ++out.label_conflicts;
      return k;
    }
    const int k = static_cast<int>(out.seeds.size());
    out.seeds.push_back({g, r, label, SeedKind::surface, t});
    index.insert(g, k);
    return k;
  };
  for (const auto& v : per_ball)
    for (const auto& rp : v) {
      const int ku = place(rp.up, rp.up_exterior ? SeedLabel::exterior : SeedLabel::interior, rp.radius, rp.triplet);
      const int kd = place(rp.down, rp.up_exterior ? SeedLabel::interior : SeedLabel::exterior, rp.radius, rp.triplet);
      out.pairs.push_back(rp.up_exterior ? std::array<int, 2>{ku, kd} : std::array<int, 2>{kd, ku});
    }
  if (out.label_conflicts > 0) spdlog::warn("{} merged surface seeds disagree on their label", out.label_conflicts);
  return out;
}

namespace {

/// Entry parameter of the ray z + t d (|d| = 1) into the ball (c, r); 0 when z
/// is inside, infinity when the ray misses.
double ray_entry(const Point3& z, const Vec3& d, const Point3& c, double r) {
  const Vec3 m = z - c;
  const double cc = norm2(m) - r * r;
  if (cc < 0.0) return 0.0;
  const double b = dot(m, d);
  if (b > 0.0) return std::numeric_limits<double>::infinity();
  const double disc = b * b - cc;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  return -b - std::sqrt(disc);
}

double ray_box_exit(const Point3& z, const Vec3& d, const Aabb& box) {
  double t = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (d[k] > 0.0) t = std::min(t, (box.hi[k] - z[k]) / d[k]);
    if (d[k] < 0.0) t = std::min(t, (box.lo[k] - z[k]) / d[k]);
  }
  return std::max(0.0, t);
}

class VolumeSampler {
 public:
  VolumeSampler(SeedSet& seeds, const BallIndex& balls, const InputComplex& mesh, const Parameters& params,
                Rng& rng, const InteriorOptions& opt)
      : seeds_(seeds), balls_(balls), params_(params), rng_(rng), opt_(opt), box_(mesh.bbox().scaled(3.0)) {
    std::vector<Point3> pts;
    std::vector<int> ids;
    for (std::size_t i = 0; i < seeds.seeds.size(); ++i)
      if (seeds.seeds[i].kind == SeedKind::surface) {
        pts.push_back(seeds.seeds[i].p);
        ids.push_back(static_cast<int>(i));
        surface_rmax_ = std::max(surface_rmax_, seeds.seeds[i].radius);
      }
    surface_.build(std::move(pts), std::move(ids));
    for (int k = 0; k < 3; ++k) ball_rmax_ = std::max(ball_rmax_, balls.max_radius(static_cast<StratumKind>(k)));
  }

  void run() {
    if (surface_.empty()) return;
    dart_throwing();
    std::deque<int> queue(volume_.begin(), volume_.end());
    for (int round = 0;; ++round) {
      spoke_darts(queue);
      if (!lipschitz_round()) break;
      if (round >= 50) {
        spdlog::warn("volume Lipschitz fixpoint did not settle after {} rounds", round + 1);
        break;
      }
      queue.assign(volume_.begin(), volume_.end());
    }
  }

  const std::vector<int>& volume() const { return volume_; }

 private:
  bool in_union(const Point3& z) const { return !balls_.balls_covering(z).empty(); }

  bool in_surface_guidance(const Point3& z) const {
    std::vector<int> near;
    surface_.within(z, surface_rmax_, near);
    for (int s : near)
      if (distance(seeds_.seeds[s].p, z) < seeds_.seeds[s].radius) return true;
    return false;
  }

  /// Label and radius from the nearest surface seed.
  std::pair<SeedLabel, double> extend(const Point3& z) const {
    const auto h = surface_.nearest(z);
    const Seed& s = seeds_.seeds[h.id];
    return {s.label, s.radius + params_.lipschitz * h.distance};
  }

  int add(const Point3& z) {
    const auto [label, r] = extend(z);
    const int id = static_cast<int>(seeds_.seeds.size());
    seeds_.seeds.push_back({z, r, label, SeedKind::volume, {-1, -1, -1}});
    volume_tree_.insert(z, id);
    volume_.push_back(id);
    volume_rmax_ = std::max(volume_rmax_, r);
    return id;
  }

  void dart_throwing() {
    int misses = 0;
    while (misses < opt_.miss_limit) {
      Point3 z;
      for (int k = 0; k < 3; ++k) z[k] = box_.lo[k] + uniform01(rng_) * (box_.hi[k] - box_.lo[k]);
      const auto hs = surface_.nearest(z);
      bool reject = hs.distance < seeds_.seeds[hs.id].radius || in_surface_guidance(z) || in_union(z);
      if (!reject && !volume_tree_.empty()) {
        const auto hz = volume_tree_.nearest(z);
        reject = hz.distance < seeds_.seeds[hz.id].radius;
      }
      if (reject) {
        ++misses;
        continue;
      }
      add(z);
      misses = 0;
    }
  }

  void spoke_darts(std::deque<int>& queue) {
    std::vector<int> cand;
    while (!queue.empty()) {
      const int zi = queue.front();
      queue.pop_front();
      int misses = 0;
      while (misses < opt_.miss_limit) {
        const Point3 z = seeds_.seeds[zi].p;
        const double rz = seeds_.seeds[zi].radius;
        const Vec3 d = random_direction(rng_, opt_.planar);
        double t_end = std::min(2.0 * rz, ray_box_exit(z, d, box_));
        const Point3 tip = z + d * (2.0 * rz);
        cand.clear();
        balls_.tree(StratumKind::corner).within(tip, 2.0 * rz + ball_rmax_, cand);
        balls_.tree(StratumKind::crease).within(tip, 2.0 * rz + ball_rmax_, cand);
        balls_.tree(StratumKind::patch).within(tip, 2.0 * rz + ball_rmax_, cand);
        for (int b : cand) t_end = std::min(t_end, ray_entry(z, d, balls_.ball(b).center, balls_.ball(b).radius));
        cand.clear();
        surface_.within(tip, 2.0 * rz + surface_rmax_, cand);
        volume_tree_.within(tip, 2.0 * rz + volume_rmax_, cand);
        for (int s : cand) {
          if (s == zi) continue;
          t_end = std::min(t_end, ray_entry(z, d, seeds_.seeds[s].p, seeds_.seeds[s].radius));
        }
        if (t_end <= rz) {
          ++misses;
          continue;
        }
        const double t = rz + uniform01(rng_) * (t_end - rz);
        queue.push_back(add(z + d * t));
        misses = 0;
      }
    }
  }

  bool lipschitz_round() {
    std::vector<Point3> c;
    std::vector<double> r;
    for (int id : volume_) {
      c.push_back(seeds_.seeds[id].p);
      r.push_back(seeds_.seeds[id].radius);
    }
    const auto fixed = lipschitz_fixpoint(c, r, params_.lipschitz);
    bool shrunk = false;
    for (std::size_t i = 0; i < volume_.size(); ++i)
      if (fixed[i] < r[i]) {
        seeds_.seeds[volume_[i]].radius = fixed[i];
        shrunk = true;
      }
    return shrunk;
  }

  SeedSet& seeds_;
  const BallIndex& balls_;
  const Parameters& params_;
  Rng& rng_;
  InteriorOptions opt_;
  Aabb box_;
  KdTree surface_;
  KdTree volume_tree_;
  std::vector<int> volume_;
  double surface_rmax_ = 0.0;
  double volume_rmax_ = 0.0;
  double ball_rmax_ = 0.0;
};

}  // namespace

void interior_seeds_random(SeedSet& seeds, const BallIndex& balls, const InputComplex& mesh, const Parameters& params,
                           Rng& rng, const InteriorOptions& opt) {
  VolumeSampler vs(seeds, balls, mesh, params, rng, opt);
  vs.run();
  if (opt.keep_exterior) return;
  std::vector<Seed> kept;
  kept.reserve(seeds.seeds.size());
  for (const auto& s : seeds.seeds)
    if (s.kind == SeedKind::surface || s.label == SeedLabel::interior) kept.push_back(s);
  seeds.seeds = std::move(kept);
}

std::vector<Point3> seed_positions(const SeedSet& seeds) {
  std::vector<Point3> out;
  out.reserve(seeds.seeds.size());
  for (const auto& s : seeds.seeds) out.push_back(s.p);
  return out;
}

InteriorMode parse_interior_mode(const std::string& s) {
  InteriorMode m;
  if (s == "random") return m;
  if (s == "none") {
    m.kind = InteriorMode::Kind::none;
    return m;
  }
  if (s.rfind("lattice:", 0) == 0) {
    m.kind = InteriorMode::Kind::lattice;
    try {
      m.spacing = std::stod(s.substr(8));
    } catch (const std::exception&) {
      throw Error("invalid interior mode: " + s);
    }
    if (!(m.spacing > 0.0)) throw Error("lattice spacing must be positive");
    return m;
  }
  throw Error("invalid interior mode: " + s);
}

std::vector<Point3> lattice_points(const Aabb& box, double spacing) {
  if (!(spacing > 0.0)) throw Error("lattice spacing must be positive");
  std::array<int, 3> n{};
  for (int k = 0; k < 3; ++k) n[k] = static_cast<int>(std::floor((box.hi[k] - box.lo[k]) / spacing + 1e-9)) + 1;
  std::vector<Point3> out;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) out.push_back(box.lo + Vec3{i * spacing, j * spacing, k * spacing});
  return out;
}

void interior_seeds_lattice(SeedSet& seeds, const BallIndex& balls, const InputComplex& mesh,
                            const TriangleBvh& locator, double spacing) {
  const auto pts = lattice_points(mesh.bbox(), spacing);
  KdTree surface;
  std::vector<Point3> sp;
  std::vector<int> ids;
  double rmax = 0.0;
  for (std::size_t i = 0; i < seeds.seeds.size(); ++i)
    if (seeds.seeds[i].kind == SeedKind::surface) {
      sp.push_back(seeds.seeds[i].p);
      ids.push_back(static_cast<int>(i));
      rmax = std::max(rmax, seeds.seeds[i].radius);
    }
  surface.build(std::move(sp), std::move(ids));
  std::vector<int> near;
  for (const auto& x : pts) {
    if (!balls.balls_covering(x).empty()) continue;
    near.clear();
    surface.within(x, rmax, near);
    bool guided = false;
    for (int s : near) guided |= distance(seeds.seeds[s].p, x) <= seeds.seeds[s].radius;
    if (guided || !locator.inside(x)) continue;
    seeds.seeds.push_back({x, 0.5 * spacing, SeedLabel::interior, SeedKind::volume, {-1, -1, -1}});
  }
}

void write_seeds_csv(const std::filesystem::path& path, const SeedSet& seeds) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "x,y,z,r,label,kind\n";
  char buf[160];
  for (const auto& s : seeds.seeds) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", s.p.x, s.p.y, s.p.z, s.radius);
    out << buf << to_string(s.label) << ',' << to_string(s.kind) << '\n';
  }
}

}  // namespace vorocrust
