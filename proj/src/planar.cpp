#include "vorocrust/planar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vorocrust/log.hpp"

namespace vorocrust {

bool Pslg::encloses_region() const {
  if (segments.empty()) return false;
  std::vector<int> deg(vertices.size(), 0);
  for (const auto& s : segments) {
    ++deg[s[0]];
    ++deg[s[1]];
  }
  for (int d : deg)
    if (d % 2 != 0) return false;
  return true;
}

bool Pslg::inside(double x, double y) const {
  bool in = false;
  for (const auto& s : segments) {
    const auto& a = vertices[s[0]];
    const auto& b = vertices[s[1]];
    if ((a[1] > y) != (b[1] > y)) {
      const double xi = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (xi > x) in = !in;
    }
  }
  return in;
}

Pslg load_pslg(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<double> nums;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    double v;
    while (ss >> v) nums.push_back(v);
  }
  std::size_t pos = 0;
  auto next = [&]() {
    if (pos >= nums.size()) throw Error("truncated PSLG file");
    return nums[pos++];
  };
  Pslg g;
  const auto nv = static_cast<long>(next());
  if (nv <= 0) throw Error("empty mesh");
  for (long i = 0; i < nv; ++i) {
    const double x = next();
    const double y = next();
    g.vertices.push_back({x, y});
  }
  const auto ns = static_cast<long>(next());
  for (long i = 0; i < ns; ++i) {
    const auto a = static_cast<long>(next());
    const auto b = static_cast<long>(next());
    if (a < 0 || b < 0 || a >= nv || b >= nv) throw Error("segment index out of range");
    if (a != b) g.segments.push_back({static_cast<int>(a), static_cast<int>(b)});
  }
  if (g.segments.empty()) throw Error("empty mesh");
  return g;
}

InputComplex embed(const Pslg& g) {
  std::vector<Point3> v;
  v.reserve(g.vertices.size());
  for (const auto& p : g.vertices) v.push_back({p[0], p[1], 0.0});
  return InputComplex(std::move(v), {}, g.segments);
}

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {-1, -2, -3, -4}};
}

ConvexPolygon ConvexPolygon::clipped(double nx, double ny, double d, int new_tag, double eps) const {
  const std::size_t n = v.size();
  std::vector<double> s(n);
  bool any_out = false;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = nx * v[i][0] + ny * v[i][1] - d;
    any_out = any_out || s[i] > eps;
  }
  if (!any_out) return *this;
  ConvexPolygon out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const bool a_in = s[i] <= eps;
    const bool b_in = s[j] <= eps;
    if (a_in) {
      out.v.push_back(v[i]);
      out.tag.push_back(tag[i]);
      if (!b_in) {
        if (s[i] < -eps) {
          const double t = s[i] / (s[i] - s[j]);
          out.v.push_back({v[i][0] + (v[j][0] - v[i][0]) * t, v[i][1] + (v[j][1] - v[i][1]) * t});
          out.tag.push_back(new_tag);
        } else {
          out.tag.back() = new_tag;
        }
      }
    } else if (b_in && s[j] < -eps) {
      const double t = s[i] / (s[i] - s[j]);
      out.v.push_back({v[i][0] + (v[j][0] - v[i][0]) * t, v[i][1] + (v[j][1] - v[i][1]) * t});
      out.tag.push_back(tag[i]);
    }
  }
  if (out.v.size() < 3) return {};
  return out;
}

double ConvexPolygon::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

double ConvexPolygon::max_distance_from(double x, double y) const {
  double d = 0.0;
  for (const auto& p : v) d = std::max(d, std::hypot(p[0] - x, p[1] - y));
  return d;
}

bool ConvexPolygon::is_convex(double tol) const {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % n];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    if (len <= tol) continue;
    // every vertex left of (or on) each counter-clockwise edge
    for (const auto& p : v)
      if ((ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len < -tol) return false;
  }
  return true;
}

std::vector<Cell2d> compute_cells_2d(const std::vector<Point3>& seeds, const Aabb& box) {
  if (seeds.empty()) throw Error("no seeds");
  KdTree tree;
  std::vector<int> ids(seeds.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  tree.build(seeds, ids);
  const double diag = box.diagonal();
  const double eps = 1e-11 * diag;
  std::vector<Cell2d> cells(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Point3& p = seeds[i];
    ConvexPolygon cell = ConvexPolygon::rectangle(box.lo.x, box.lo.y, box.hi.x, box.hi.y);
    std::size_t k = std::min<std::size_t>(seeds.size(), 16);
    std::size_t done = 0;
    bool finished = false;
    while (!finished) {
      const auto hits = tree.k_nearest(p, k);
      for (; done < hits.size(); ++done) {
        const auto& h = hits[done];
        if (h.id == static_cast<int>(i)) continue;
        if (h.distance < 1e-12 * diag) throw Error("duplicate seeds");
        if (h.distance > 2.0 * cell.max_distance_from(p.x, p.y)) {
          finished = true;
          break;
        }
        const Point3& q = seeds[h.id];
        const Plane bis = Plane::bisector(p, q);
        cell = cell.clipped(bis.normal.x, bis.normal.y, bis.offset, h.id, eps);
      }
      if (k >= seeds.size()) break;
      k = std::min(seeds.size(), 2 * k);
    }
    cells[i] = {static_cast<int>(i), std::move(cell)};
  }
  return cells;
}

std::vector<std::vector<int>> crease_ball_chains(const BallIndex& balls, const InputComplex& mesh,
                                                 const Strata& strata) {
  const auto& V = mesh.vertices();
  std::vector<int> corner_ball(strata.corners.size(), -1);
  std::vector<std::vector<std::pair<double, int>>> along(strata.creases.size());
  std::vector<std::map<int, std::pair<int, double>>> edge_pos(strata.creases.size());
  for (std::size_t c = 0; c < strata.creases.size(); ++c) {
    double acc = 0.0;
    const auto& cr = strata.creases[c];
    for (std::size_t k = 0; k < cr.edges.size(); ++k) {
      edge_pos[c][cr.edges[k]] = {static_cast<int>(k), acc};
      const auto& e = mesh.edges()[cr.edges[k]];
      acc += distance(V[e.a], V[e.b]);
    }
  }
  for (std::size_t id = 0; id < balls.size(); ++id) {
    const Ball& b = balls.ball(static_cast<int>(id));
    if (b.type == StratumKind::corner) {
      corner_ball[b.stratum] = static_cast<int>(id);
    } else if (b.type == StratumKind::crease) {
      const auto& [k, acc] = edge_pos[b.stratum].at(b.element);
      const int start = strata.creases[b.stratum].vertices[k];
      along[b.stratum].push_back({acc + distance(V[start], b.center), static_cast<int>(id)});
    }
  }
  std::vector<std::vector<int>> chains;
  for (std::size_t c = 0; c < strata.creases.size(); ++c) {
    const auto& cr = strata.creases[c];
    std::sort(along[c].begin(), along[c].end());
    std::vector<int> chain;
    if (cr.start_corner >= 0 && corner_ball[cr.start_corner] >= 0) chain.push_back(corner_ball[cr.start_corner]);
    for (const auto& [t, id] : along[c]) chain.push_back(id);
    if (cr.end_corner >= 0 && corner_ball[cr.end_corner] >= 0) chain.push_back(corner_ball[cr.end_corner]);
    if (cr.closed && chain.size() > 2) chain.push_back(chain.front());
    chains.push_back(std::move(chain));
  }
  return chains;
}

std::size_t consecutive_overlap_violations(const BallIndex& balls, const std::vector<std::vector<int>>& chains) {
  std::set<std::pair<int, int>> allowed;
  for (const auto& ch : chains)
    for (std::size_t k = 0; k + 1 < ch.size(); ++k) allowed.insert(std::minmax(ch[k], ch[k + 1]));
  std::size_t bad = 0;
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (int j : balls.balls_overlapping(balls.ball(static_cast<int>(i)).sphere(), static_cast<int>(i)))
      if (j > static_cast<int>(i) && !allowed.count({static_cast<int>(i), j})) ++bad;
  return bad;
}

namespace {

double point_segment_distance(const Point3& p, const std::array<Point3, 2>& s) {
  return closest_point_segment(p, s[0], s[1]).distance;
}

double one_sided(const std::vector<std::array<Point3, 2>>& from, const std::vector<std::array<Point3, 2>>& to,
                 double step) {
  double worst = 0.0;
  for (const auto& s : from) {
    const double len = distance(s[0], s[1]);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 0; k <= n; ++k) {
      const Point3 p = s[0] + (s[1] - s[0]) * (static_cast<double>(k) / n);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : to) best = std::min(best, point_segment_distance(p, t));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace

double segment_hausdorff(const std::vector<std::array<Point3, 2>>& a, const std::vector<std::array<Point3, 2>>& b,
                         std::size_t samples_per_unit) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  const double step = 1.0 / static_cast<double>(std::max<std::size_t>(1, samples_per_unit));
  return std::max(one_sided(a, b, step), one_sided(b, a, step));
}

Mesh2dResult mesh_2d(const Pslg& g, const Parameters& params, const InteriorMode& interior) {
  params.validate();
  if (interior.kind != InteriorMode::Kind::none && !g.encloses_region()) throw Error("unbounded interior");
  Mesh2dResult r;
  r.mesh = embed(g);
  const InputComplex& mesh = r.mesh;
  const Strata strata = detect_features(mesh, params.theta_sharp);
  Rng brng = stage_rng(params.rng_seed, "boundary");
  const BoundaryIndex boundary(mesh, strata, params.crease_supersamples, 0, brng);
  Rng rrng = stage_rng(params.rng_seed, "rmps");
  Refiner refiner(mesh, strata, boundary, params, rrng);
  refiner.run();
  const BallIndex& balls = refiner.balls();

  // Circles may only meet their chain neighbors; shrink the larger of any
  // other overlapping pair until the gap opens, then refine again.
  auto chains = crease_ball_chains(balls, mesh, strata);
  for (int round = 0; round < 50; ++round) {
    std::set<std::pair<int, int>> allowed;
    for (const auto& ch : chains)
      for (std::size_t k = 0; k + 1 < ch.size(); ++k) allowed.insert(std::minmax(ch[k], ch[k + 1]));
    std::map<int, double> target;
    for (std::size_t i = 0; i < balls.size(); ++i) {
      const Ball& a = balls.ball(static_cast<int>(i));
      for (int j : balls.balls_overlapping(a.sphere(), static_cast<int>(i))) {
        if (j < static_cast<int>(i) || allowed.count({static_cast<int>(i), j})) continue;
        const Ball& b = balls.ball(j);
        const double d = distance(a.center, b.center);
        const bool a_big = a.radius >= b.radius;
        const int big = a_big ? static_cast<int>(i) : j;
        const double small_r = a_big ? b.radius : a.radius;
        const double want = std::max(d - small_r, 0.49 * d) * (1.0 - 1e-6);
        auto [it, fresh] = target.emplace(big, want);
        if (!fresh) it->second = std::min(it->second, want);
        if (d - small_r < 0.49 * d) {
          const int small = a_big ? j : static_cast<int>(i);
          auto [it2, fresh2] = target.emplace(small, 0.49 * d);
          if (!fresh2) it2->second = std::min(it2->second, 0.49 * d);
        }
      }
    }
    if (target.empty()) break;
    for (const auto& [id, rad] : target)
      if (rad < balls.ball(id).radius) refiner.shrink(id, rad, "2d-consecutive");
    refiner.run();
    chains = crease_ball_chains(balls, mesh, strata);
  }
  r.balls = balls.balls();
  r.report.consecutive_violations = consecutive_overlap_violations(balls, chains);

  // seed pairs at the intersections of consecutive circles
  const double tol = 1e-9 * mesh.scale();
  KdTree index;
  auto place = [&](const Point3& p, double radius, std::array<int, 3> t) {
    std::vector<int> near;
    index.within(p, tol, near);
    if (!near.empty()) return *std::min_element(near.begin(), near.end());
    const int k = static_cast<int>(r.seeds.seeds.size());
    const SeedLabel label = g.inside(p.x, p.y) ? SeedLabel::interior : SeedLabel::exterior;
    r.seeds.seeds.push_back({p, radius, label, SeedKind::surface, t});
    index.insert(p, k);
    return k;
  };
  for (const auto& ch : chains)
    for (std::size_t k = 0; k + 1 < ch.size(); ++k) {
      const Ball& a = balls.ball(ch[k]);
      const Ball& b = balls.ball(ch[k + 1]);
      const Vec3 ab = b.center - a.center;
      const double d = norm(ab);
      if (d <= 0.0 || d >= a.radius + b.radius) continue;
      const double x = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
      const double h2 = a.radius * a.radius - x * x;
      if (h2 <= 0.0) continue;
      const Vec3 u = ab / d;
      const Vec3 perp{-u.y, u.x, 0.0};
      const Point3 m = a.center + u * x;
      const double h = std::sqrt(h2);
      const double rad = 0.5 * (a.radius + b.radius);
      const int s1 = place(m + perp * h, rad, {ch[k], ch[k + 1], -1});
      const int s2 = place(m - perp * h, rad, {ch[k], ch[k + 1], -1});
      if (r.seeds.seeds[s1].label == r.seeds.seeds[s2].label) ++r.seeds.label_conflicts;
      r.seeds.pairs.push_back(r.seeds.seeds[s1].label == SeedLabel::exterior ? std::array<int, 2>{s1, s2}
                                                                            : std::array<int, 2>{s2, s1});
    }
  if (r.seeds.label_conflicts > 0) spdlog::warn("{} boundary seed pairs on one side", r.seeds.label_conflicts);

  if (interior.kind == InteriorMode::Kind::random) {
    Rng irng = stage_rng(params.rng_seed, "interior");
    InteriorOptions opt;
    opt.planar = true;
    opt.miss_limit = params.miss_limit;
    interior_seeds_random(r.seeds, balls, mesh, params, irng, opt);
  } else if (interior.kind == InteriorMode::Kind::lattice) {
    Aabb flat = mesh.bbox();
    for (const auto& p : lattice_points(flat, interior.spacing)) {
      if (!balls.balls_covering(p).empty() || !g.inside(p.x, p.y)) continue;
      bool guided = false;
      for (const auto& s : r.seeds.seeds)
        guided |= s.kind == SeedKind::surface && distance(s.p, p) <= s.radius;
      if (!guided) r.seeds.seeds.push_back({p, 0.5 * interior.spacing, SeedLabel::interior, SeedKind::volume, {-1, -1, -1}});
    }
  }

  r.box = mesh.bbox().scaled(3.0);
  r.cells = compute_cells_2d(seed_positions(r.seeds), r.box);
  double total = 0.0;
  double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
  for (const auto& c : r.cells) {
    total += c.poly.area();
    if (!c.poly.is_convex(1e-9 * mesh.scale())) ++r.report.non_convex;
    if (r.seeds.seeds[c.seed].label != SeedLabel::interior) continue;
    const auto& P = c.poly.v;
    for (std::size_t k = 0; k < P.size(); ++k) {
      const int t = c.poly.tag[k];
      if (t < 0 || r.seeds.seeds[t].label != SeedLabel::exterior) continue;
      const auto& q = P[(k + 1) % P.size()];
      const std::array<Point3, 2> e{Point3{P[k][0], P[k][1], 0.0}, Point3{q[0], q[1], 0.0}};
      const double len = distance(e[0], e[1]);
      if (len <= tol) continue;
      emin = std::min(emin, len);
      emax = std::max(emax, len);
      r.boundary.push_back(e);
    }
  }
  const double box_area = (r.box.hi.x - r.box.lo.x) * (r.box.hi.y - r.box.lo.y);
  r.report.cells = r.cells.size();
  r.report.area_error = std::abs(total - box_area) / box_area;
  r.report.boundary_edges = r.boundary.size();
  r.report.edge_ratio = r.boundary.empty() ? 0.0 : emax / emin;
  std::vector<std::array<Point3, 2>> input;
  for (const auto& e : mesh.edges()) input.push_back({mesh.vertices()[e.a], mesh.vertices()[e.b]});
  r.report.hausdorff = segment_hausdorff(r.boundary, input, static_cast<std::size_t>(2000.0 / mesh.scale())) /
                       mesh.bbox().diagonal();
  r.report.boundary_seeds = r.seeds.count(SeedKind::surface);
  r.report.interior_seeds = r.seeds.count(SeedKind::volume);
  return r;
}

void write_svg(const std::filesystem::path& path, const Mesh2dResult& r) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const Aabb view = r.mesh.bbox().scaled(1.2);
  const double w = view.hi.x - view.lo.x, h = view.hi.y - view.lo.y;
  const double stroke = 0.002 * std::max(w, h);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << view.lo.x << ' ' << -view.hi.y << ' ' << w << ' '
      << h << "\">\n<g transform=\"scale(1,-1)\" stroke-width=\"" << stroke << "\">\n";
  for (const auto& c : r.cells) {
    const bool in = r.seeds.seeds[c.seed].label == SeedLabel::interior;
    out << "<polygon fill=\"" << (in ? "#cfe3f7" : "#eeeeee") << "\" stroke=\"#888888\" points=\"";
    for (const auto& p : c.poly.v) out << p[0] << ',' << p[1] << ' ';
    out << "\"/>\n";
  }
  for (const auto& e : r.mesh.edges()) {
    const auto& a = r.mesh.vertices()[e.a];
    const auto& b = r.mesh.vertices()[e.b];
    out << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x << "\" y2=\"" << b.y
        << "\" stroke=\"black\"/>\n";
  }
  for (const auto& e : r.boundary)
    out << "<line x1=\"" << e[0].x << "\" y1=\"" << e[0].y << "\" x2=\"" << e[1].x << "\" y2=\"" << e[1].y
        << "\" stroke=\"#d62728\"/>\n";
  for (const auto& s : r.seeds.seeds)
    out << "<circle cx=\"" << s.p.x << "\" cy=\"" << s.p.y << "\" r=\"" << 2.0 * stroke << "\" fill=\""
        << (s.label == SeedLabel::interior ? "#1f77b4" : "#555555") << "\"/>\n";
  out << "</g>\n</svg>\n";
}

}  // namespace vorocrust
