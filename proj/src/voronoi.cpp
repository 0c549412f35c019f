#include "vorocrust/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "vorocrust/bvh.hpp"
#include "vorocrust/kdtree.hpp"
#include "vorocrust/parameters.hpp"

namespace vorocrust {

namespace {

double clip_eps(const Aabb& box) { return 1e-11 * box.diagonal(); }

template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const int nt = std::max(1, threads);
  std::vector<std::string> errors(nt);
  auto work = [&](int t) {
    try {
      for (std::size_t i = t; i < n; i += nt) f(i);
    } catch (const std::exception& e) {
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
}

}  // namespace

std::vector<VoronoiCell> compute_cells(const std::vector<Point3>& seeds, const Aabb& box, int threads) {
  if (seeds.empty()) throw Error("no seeds");
  KdTree tree;
  std::vector<int> ids(seeds.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  tree.build(seeds, ids);
  const double eps = clip_eps(box);
  const double dup = 1e-12 * box.diagonal();
  std::vector<VoronoiCell> cells(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    const Point3& p = seeds[i];
    ConvexPolyhedron cell = ConvexPolyhedron::box(box);
    std::size_t k = std::min<std::size_t>(seeds.size(), 32);
    std::size_t done = 0;
    bool finished = false;
    while (!finished) {
      const auto hits = tree.k_nearest(p, k);
      for (; done < hits.size(); ++done) {
        const auto& h = hits[done];
        if (h.id == static_cast<int>(i)) continue;
        if (h.distance < dup) throw Error("duplicate seeds");
        if (h.distance > 2.0 * cell.max_distance_from(p)) {
          finished = true;
          break;
        }
        cell = cell.clipped(Plane::bisector(p, seeds[h.id]), h.id, eps);
      }
      if (k >= seeds.size()) break;
      k = std::min(seeds.size(), 2 * k);
    }
    cells[i] = {static_cast<int>(i), std::move(cell)};
  });
  return cells;
}

VoronoiCell brute_force_cell(const std::vector<Point3>& seeds, int i, const Aabb& box) {
  ConvexPolyhedron cell = ConvexPolyhedron::box(box);
  for (std::size_t j = 0; j < seeds.size(); ++j)
    if (static_cast<int>(j) != i) cell = cell.clipped(Plane::bisector(seeds[i], seeds[j]), static_cast<int>(j), clip_eps(box));
  return {i, std::move(cell)};
}

namespace {

std::map<std::pair<int, int>, int> directed_edges(const SurfaceMesh& s) {
  std::map<std::pair<int, int>, int> e;
  for (const auto& f : s.facets)
    for (std::size_t k = 0; k < f.size(); ++k) ++e[{f[k], f[(k + 1) % f.size()]}];
  return e;
}

}  // namespace

int SurfaceMesh::euler_characteristic() const {
  std::vector<char> used(vertices.size(), 0);
  std::map<std::pair<int, int>, int> edges;
  for (const auto& f : facets)
    for (std::size_t k = 0; k < f.size(); ++k) {
      used[f[k]] = 1;
      ++edges[std::minmax(f[k], f[(k + 1) % f.size()])];
    }
  const long v = std::count(used.begin(), used.end(), 1);
  return static_cast<int>(v - static_cast<long>(edges.size()) + static_cast<long>(facets.size()));
}

bool SurfaceMesh::is_closed_manifold() const {
  const auto e = directed_edges(*this);
  for (const auto& [k, n] : e) {
    if (n != 1) return false;
    auto it = e.find({k.second, k.first});
    if (it == e.end() || it->second != 1) return false;
  }
  return !facets.empty();
}

std::vector<std::array<int, 3>> SurfaceMesh::triangulate() const {
  std::vector<std::array<int, 3>> out;
  for (const auto& f : facets) {
    Point3 c{};
    for (int v : f) c += vertices[v];
    c /= static_cast<double>(f.size());
    std::size_t a = 0;
    for (std::size_t k = 1; k < f.size(); ++k)
      if (distance(vertices[f[k]], c) < distance(vertices[f[a]], c)) a = k;
    const std::size_t n = f.size();
    for (std::size_t k = 1; k + 1 < n; ++k) out.push_back({f[a], f[(a + k) % n], f[(a + k + 1) % n]});
  }
  return out;
}

SurfaceMesh extract_surface(const std::vector<VoronoiCell>& cells, const SeedSet& seeds, double scale) {
  SurfaceMesh s;
  KdTree index;
  const double tol = 1e-9 * scale;
  std::vector<int> near;
  auto vertex = [&](const Point3& p) {
    near.clear();
    index.within(p, tol, near);
    if (!near.empty()) return *std::min_element(near.begin(), near.end());
    const int id = static_cast<int>(s.vertices.size());
    s.vertices.push_back(p);
    index.insert(p, id);
    return id;
  };
  for (const auto& c : cells) {
    if (seeds.seeds[c.seed].label != SeedLabel::interior) continue;
    const auto& V = c.poly.vertices();
    for (const auto& f : c.poly.faces()) {
      if (f.tag < 0 || seeds.seeds[f.tag].label != SeedLabel::exterior) continue;
      std::vector<int> poly;
      for (int v : f.vertices) {
        const int id = vertex(V[v]);
        if (poly.empty() || poly.back() != id) poly.push_back(id);
      }
      while (poly.size() > 1 && poly.front() == poly.back()) poly.pop_back();
      if (poly.size() < 3) continue;
      s.facets.push_back(std::move(poly));
      s.provenance.push_back({c.seed, f.tag});
    }
  }
  return s;
}

std::size_t verify_convexity(const std::vector<VoronoiCell>& cells, double tol) {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [tol](const VoronoiCell& c) { return !c.poly.is_convex(tol); }));
}

namespace {

std::vector<Point3> sample_surface(const std::vector<Point3>& v, const std::vector<std::array<int, 3>>& t,
                                   std::size_t n, Rng& rng) {
  std::vector<double> cum;
  double total = 0.0;
  for (const auto& f : t) cum.push_back(total += triangle_area(v[f[0]], v[f[1]], v[f[2]]));
  std::vector<Point3> out;
  if (t.empty()) return out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = std::upper_bound(cum.begin(), cum.end(), uniform01(rng) * total) - cum.begin();
    k = std::min(k, t.size() - 1);
    out.push_back(sample_triangle(rng, v[t[k][0]], v[t[k][1]], v[t[k][2]]));
  }
  return out;
}

double one_sided(const std::vector<Point3>& samples, const TriangleBvh& target) {
  double d = 0.0;
  for (const auto& p : samples) d = std::max(d, target.closest(p).cp.distance);
  return d;
}

}  // namespace

double sampled_hausdorff(const std::vector<Point3>& va, const std::vector<std::array<int, 3>>& ta,
                         const std::vector<Point3>& vb, const std::vector<std::array<int, 3>>& tb, std::size_t n,
                         Rng& rng) {
  if (ta.empty() || tb.empty()) return std::numeric_limits<double>::infinity();
  const TriangleBvh a(va, ta), b(vb, tb);
  std::vector<Point3> used_a, used_b;
  {
    std::vector<char> ua(va.size(), 0), ub(vb.size(), 0);
    for (const auto& f : ta)
      for (int k : f) ua[k] = 1;
    for (const auto& f : tb)
      for (int k : f) ub[k] = 1;
    for (std::size_t i = 0; i < va.size(); ++i)
      if (ua[i]) used_a.push_back(va[i]);
    for (std::size_t i = 0; i < vb.size(); ++i)
      if (ub[i]) used_b.push_back(vb[i]);
  }
  auto sa = sample_surface(va, ta, n, rng);
  auto sb = sample_surface(vb, tb, n, rng);
  // vertices count too: they carry the extreme points of polyhedral surfaces
  sa.insert(sa.end(), used_a.begin(), used_a.end());
  sb.insert(sb.end(), used_b.begin(), used_b.end());
  return std::max(one_sided(sa, b), one_sided(sb, a));
}

QualityReport quality_report(const SurfaceMesh& surface, const std::vector<VoronoiCell>& cells, const SeedSet& seeds,
                             const InputComplex& input, const Timings& timings, std::size_t hausdorff_samples,
                             Rng& rng) {
  QualityReport r;
  const auto tris = surface.triangulate();
  r.surface_facets = surface.facets.size();
  r.surface_triangles = tris.size();
  r.q_min = tris.empty() ? 0.0 : 1.0;
  std::size_t below = 0, above = 0;
  const double a30 = degrees(30.0);
  const double a90 = degrees(90.0);
  for (const auto& t : tris) {
    const auto& V = surface.vertices;
    const auto ang = triangle_angles(V[t[0]], V[t[1]], V[t[2]]);
    if (std::min({ang[0], ang[1], ang[2]}) < a30) ++below;
    if (std::max({ang[0], ang[1], ang[2]}) > a90) ++above;
    r.q_min = std::min(r.q_min, triangle_quality(V[t[0]], V[t[1]], V[t[2]]));
  }
  if (!tris.empty()) {
    r.frac_below_30 = static_cast<double>(below) / static_cast<double>(tris.size());
    r.frac_above_90 = static_cast<double>(above) / static_cast<double>(tris.size());
  }
  for (const auto& c : cells) {
    if (seeds.seeds[c.seed].label != SeedLabel::interior || c.poly.empty()) continue;
    try {
      r.rho_max = std::max(r.rho_max, aspect_ratio(c.poly));
    } catch (const Error&) {
    }
  }
  r.hausdorff = sampled_hausdorff(surface.vertices, tris, input.vertices(), input.triangles(), hausdorff_samples, rng) /
                input.bbox().diagonal();
  r.surface_seeds = seeds.count(SeedKind::surface);
  r.volume_seeds = seeds.count(SeedKind::volume);
  r.t_surface = timings.surface;
  r.t_volume = timings.volume;
  r.non_convex = verify_convexity(cells, 1e-9 * input.scale());
  r.euler = surface.euler_characteristic();
  r.cells = cells.size();
  return r;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

void write_off(const std::filesystem::path& path, const SurfaceMesh& s) {
  auto out = open_out(path);
  out << "OFF\n" << s.vertices.size() << ' ' << s.facets.size() << " 0\n";
  for (const auto& v : s.vertices) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& f : s.facets) {
    out << f.size();
    for (int v : f) out << ' ' << v;
    out << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const SurfaceMesh& s) {
  auto out = open_out(path);
  for (const auto& v : s.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& f : s.facets) {
    out << 'f';
    for (int v : f) out << ' ' << v + 1;
    out << '\n';
  }
}

void write_vtk(const std::filesystem::path& path, const std::vector<VoronoiCell>& cells) {
  auto out = open_out(path);
  std::size_t npts = 0, size = 0;
  for (const auto& c : cells) {
    npts += c.poly.vertices().size();
    size += 2;
    for (const auto& f : c.poly.faces()) size += 1 + f.vertices.size();
  }
  out << "# vtk DataFile Version 4.2\nvoronoi cells\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << npts << " double\n";
  for (const auto& c : cells)
    for (const auto& v : c.poly.vertices()) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
  out << "CELLS " << cells.size() << ' ' << size << '\n';
  std::size_t base = 0;
  for (const auto& c : cells) {
    std::size_t len = 1;
    for (const auto& f : c.poly.faces()) len += 1 + f.vertices.size();
    out << len << ' ' << c.poly.faces().size();
    for (const auto& f : c.poly.faces()) {
      out << ' ' << f.vertices.size();
      for (int v : f.vertices) out << ' ' << base + v;
    }
    out << '\n';
    base += c.poly.vertices().size();
  }
  out << "CELL_TYPES " << cells.size() << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) out << "42\n";
  out << "CELL_DATA " << cells.size() << "\nSCALARS seed int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : cells) out << c.seed << '\n';
}

void write_cells_text(const std::filesystem::path& path, const std::vector<VoronoiCell>& cells) {
  auto out = open_out(path);
  for (const auto& c : cells) {
    out << "cell " << c.seed << ' ' << c.poly.vertices().size() << ' ' << c.poly.faces().size() << '\n';
    for (const auto& v : c.poly.vertices()) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto& f : c.poly.faces()) {
      out << f.vertices.size();
      for (int v : f.vertices) out << ' ' << v;
      out << '\n';
    }
  }
}

}  // namespace vorocrust
