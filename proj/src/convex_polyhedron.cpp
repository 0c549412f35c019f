#include "vorocrust/convex_polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <utility>

namespace vorocrust {

ConvexPolyhedron ConvexPolyhedron::box(const Aabb& b) {
  const Vec3& l = b.lo;
  const Vec3& h = b.hi;
  std::vector<Point3> v = {{l.x, l.y, l.z}, {h.x, l.y, l.z}, {h.x, h.y, l.z}, {l.x, h.y, l.z},
                           {l.x, l.y, h.z}, {h.x, l.y, h.z}, {h.x, h.y, h.z}, {l.x, h.y, h.z}};
  std::vector<Face> f = {{{0, 4, 7, 3}, -1}, {{1, 2, 6, 5}, -2}, {{0, 1, 5, 4}, -3},
                         {{3, 7, 6, 2}, -4}, {{0, 3, 2, 1}, -5}, {{4, 5, 6, 7}, -6}};
  return {std::move(v), std::move(f)};
}

ConvexPolyhedron ConvexPolyhedron::clipped(const Plane& plane, int tag, double eps) const {
  if (empty()) return {};
  const std::size_t nv = vertices_.size();
  std::vector<double> d(nv);
  bool any_out = false;
  bool any_in = false;
  for (std::size_t i = 0; i < nv; ++i) {
    d[i] = plane.signed_distance(vertices_[i]);
    any_out = any_out || d[i] > eps;
    any_in = any_in || d[i] < -eps;
  }
  if (!any_out) return *this;
  if (!any_in) return {};

  std::vector<Point3> out_vertices;
  std::vector<int> remap(nv, -1);
  auto keep = [&](int v) {
    if (remap[v] < 0) {
      remap[v] = static_cast<int>(out_vertices.size());
      out_vertices.push_back(vertices_[v]);
    }
    return remap[v];
  };
  std::map<std::pair<int, int>, int> cut_vertex;
  auto interpolate = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = cut_vertex.find(key);
    if (it != cut_vertex.end()) return it->second;
    // interpolate from the inside vertex for a consistent result on both faces
    const int in = d[key.first] < 0.0 ? key.first : key.second;
    const int out = in == key.first ? key.second : key.first;
    const double t = d[in] / (d[in] - d[out]);
    const Point3 p = vertices_[in] + (vertices_[out] - vertices_[in]) * t;
    const int id = static_cast<int>(out_vertices.size());
    out_vertices.push_back(p);
    cut_vertex.emplace(key, id);
    return id;
  };

  std::vector<int> cap;
  std::vector<Face> out_faces;
  out_faces.reserve(faces_.size() + 1);
  for (const auto& face : faces_) {
    const auto& poly = face.vertices;
    const std::size_t n = poly.size();
    bool strictly_in = false;
    bool has_out = false;
    for (int v : poly) {
      strictly_in = strictly_in || d[v] < -eps;
      has_out = has_out || d[v] > eps;
    }
    if (!strictly_in) continue;
    if (!has_out) {
      Face f{{}, face.tag};
      f.vertices.reserve(n);
      for (int v : poly) {
        f.vertices.push_back(keep(v));
        if (d[v] >= -eps) cap.push_back(remap[v]);
      }
      out_faces.push_back(std::move(f));
      continue;
    }
    Face f{{}, face.tag};
    for (std::size_t k = 0; k < n; ++k) {
      const int a = poly[k];
      const int b = poly[(k + 1) % n];
      const bool a_in = d[a] <= eps;
      const bool b_in = d[b] <= eps;
      if (a_in) f.vertices.push_back(keep(a));
      if (a_in && !b_in) {
        if (d[a] >= -eps) {
          cap.push_back(remap[a]);
        } else {
          const int x = interpolate(a, b);
          f.vertices.push_back(x);
          cap.push_back(x);
        }
      } else if (!a_in && b_in) {
        if (d[b] >= -eps) {
          cap.push_back(keep(b));
        } else {
          const int x = interpolate(a, b);
          f.vertices.push_back(x);
          cap.push_back(x);
        }
      }
    }
    f.vertices.erase(std::unique(f.vertices.begin(), f.vertices.end()), f.vertices.end());
    while (f.vertices.size() > 1 && f.vertices.front() == f.vertices.back()) f.vertices.pop_back();
    if (f.vertices.size() >= 3) out_faces.push_back(std::move(f));
  }

  std::sort(cap.begin(), cap.end());
  cap.erase(std::unique(cap.begin(), cap.end()), cap.end());
  if (cap.size() >= 3) {
    Point3 c{};
    for (int v : cap) c += out_vertices[v];
    c /= static_cast<double>(cap.size());
    const Vec3 n = plane.normal;
    const Vec3 helper = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 u = normalized(cross(n, helper));
    const Vec3 w = cross(n, u);
    std::vector<std::pair<double, int>> order;
    order.reserve(cap.size());
    for (int v : cap) {
      const Vec3 r = out_vertices[v] - c;
      order.emplace_back(std::atan2(dot(r, w), dot(r, u)), v);
    }
    std::sort(order.begin(), order.end());
    Face capf{{}, tag};
    for (const auto& [ang, v] : order) capf.vertices.push_back(v);
    out_faces.push_back(std::move(capf));
  }
  if (out_faces.size() < 4) return {};

  // drop vertices no face references
  std::vector<int> used(out_vertices.size(), -1);
  std::vector<Point3> compact;
  for (auto& f : out_faces)
    for (int& v : f.vertices) {
      if (used[v] < 0) {
        used[v] = static_cast<int>(compact.size());
        compact.push_back(out_vertices[v]);
      }
      v = used[v];
    }
  return {std::move(compact), std::move(out_faces)};
}

Plane ConvexPolyhedron::face_plane(std::size_t f) const {
  const auto& poly = faces_[f].vertices;
  Vec3 n{};
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point3& a = vertices_[poly[k]];
    const Point3& b = vertices_[poly[(k + 1) % poly.size()]];
    n.x += (a.y - b.y) * (a.z + b.z);
    n.y += (a.z - b.z) * (a.x + b.x);
    n.z += (a.x - b.x) * (a.y + b.y);
  }
  return Plane::through(normalized(n), face_centroid(f));
}

Point3 ConvexPolyhedron::face_centroid(std::size_t f) const {
  Point3 c{};
  for (int v : faces_[f].vertices) c += vertices_[v];
  return c / static_cast<double>(faces_[f].vertices.size());
}

double ConvexPolyhedron::face_area(std::size_t f) const {
  const auto& poly = faces_[f].vertices;
  Vec3 acc{};
  for (std::size_t k = 1; k + 1 < poly.size(); ++k)
    acc += cross(vertices_[poly[k]] - vertices_[poly[0]], vertices_[poly[k + 1]] - vertices_[poly[0]]);
  return 0.5 * norm(acc);
}

double ConvexPolyhedron::volume() const {
  if (empty()) return 0.0;
  const Point3 o = vertices_.front();
  double v = 0.0;
  for (const auto& f : faces_) {
    const auto& poly = f.vertices;
    for (std::size_t k = 1; k + 1 < poly.size(); ++k)
      v += dot(vertices_[poly[0]] - o,
               cross(vertices_[poly[k]] - o, vertices_[poly[k + 1]] - o));
  }
  return v / 6.0;
}

Point3 ConvexPolyhedron::centroid() const {
  if (empty()) return {};
  const Point3 o = vertices_.front();
  double vol = 0.0;
  Vec3 acc{};
  for (const auto& f : faces_) {
    const auto& poly = f.vertices;
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      const Point3& a = vertices_[poly[0]];
      const Point3& b = vertices_[poly[k]];
      const Point3& c = vertices_[poly[k + 1]];
      const double tv = dot(a - o, cross(b - o, c - o));
      vol += tv;
      acc += (o + a + b + c) * (tv / 4.0);
    }
  }
  if (vol == 0.0) {
    Point3 c{};
    for (const auto& p : vertices_) c += p;
    return c / static_cast<double>(vertices_.size());
  }
  return acc / vol;
}

double ConvexPolyhedron::max_distance_from(const Point3& p) const {
  double best = 0.0;
  for (const auto& v : vertices_) best = std::max(best, distance2(v, p));
  return std::sqrt(best);
}

double ConvexPolyhedron::diameter_bound() const {
  return bounding_box(vertices_).diagonal();
}

bool ConvexPolyhedron::is_convex(double tol) const {
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    // a face thinner than tol is a segment within tolerance; its plane is
    // not defined and the neighboring faces carry the test
    double diam = 0.0;
    for (int a : faces_[f].vertices)
      for (int b : faces_[f].vertices) diam = std::max(diam, distance(vertices_[a], vertices_[b]));
    if (diam <= tol || face_area(f) / diam <= tol) continue;
    const Plane pl = face_plane(f);
    for (const auto& v : vertices_)
      if (pl.signed_distance(v) > tol) return false;
  }
  return true;
}

bool ConvexPolyhedron::is_closed() const {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : faces_) {
    const auto& poly = f.vertices;
    for (std::size_t k = 0; k < poly.size(); ++k) ++directed[{poly[k], poly[(k + 1) % poly.size()]}];
  }
  for (const auto& [e, count] : directed) {
    if (count != 1) return false;
    auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

double aspect_ratio(const ConvexPolyhedron& cell) {
  if (cell.empty()) throw Error("degenerate cell");
  const Sphere outer = min_enclosing_sphere(cell.vertices());
  std::vector<Plane> planes;
  planes.reserve(cell.faces().size());
  for (std::size_t f = 0; f < cell.faces().size(); ++f) planes.push_back(cell.face_plane(f));
  const Sphere inner = chebyshev_ball(planes, cell.centroid());
  if (inner.radius <= 1e-12 * outer.radius) throw Error("degenerate cell");
  return outer.radius / inner.radius;
}

}  // namespace vorocrust
