#include "vorocrust/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vorocrust {

namespace {

double box_distance2(const Aabb& b, const Point3& p) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = std::max({b.lo[k] - p[k], 0.0, p[k] - b.hi[k]});
    s += d * d;
  }
  return s;
}

bool ray_box(const Aabb& b, const Point3& o, const Vec3& d) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < b.lo[k] || o[k] > b.hi[k]) return false;
      continue;
    }
    double a = (b.lo[k] - o[k]) / d[k];
    double c = (b.hi[k] - o[k]) / d[k];
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return false;
  }
  return true;
}

// Moller-Trumbore, t > 0.
bool ray_triangle(const Point3& o, const Vec3& d, const Point3& a, const Point3& b, const Point3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = cross(d, e2);
  const double det = dot(e1, p);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  const double u = dot(s, p) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 q = cross(s, e1);
  const double v = dot(d, q) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  return dot(e2, q) * inv > 0.0;
}

}  // namespace

TriangleBvh::TriangleBvh(std::vector<Point3> vertices, std::vector<std::array<int, 3>> triangles)
    : v_(std::move(vertices)), tris_(std::move(triangles)) {
  order_.resize(tris_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  if (!tris_.empty()) build(0, static_cast<int>(tris_.size()));
}

int TriangleBvh::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, cbox;
  for (int i = begin; i < end; ++i) {
    const auto& t = tris_[order_[i]];
    for (int k = 0; k < 3; ++k) box.expand(v_[t[k]]);
    cbox.expand((v_[t[0]] + v_[t[1]] + v_[t[2]]) / 3.0);
  }
  nodes_[id].box = box;
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= 8) return id;
  const Vec3 ext = cbox.extent();
  const int dim = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
    const auto& ta = tris_[a];
    const auto& tb = tris_[b];
    return v_[ta[0]][dim] + v_[ta[1]][dim] + v_[ta[2]][dim] < v_[tb[0]][dim] + v_[tb[1]][dim] + v_[tb[2]][dim];
  });
  const int l = build(begin, mid);
  const int r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

void TriangleBvh::closest_rec(int node, const Point3& p, Hit& best) const {
  const Node& n = nodes_[node];
  if (n.left < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const auto& t = tris_[order_[i]];
      const auto cp = closest_point_triangle(p, v_[t[0]], v_[t[1]], v_[t[2]]);
      if (cp.distance < best.cp.distance) best = {cp, order_[i]};
    }
    return;
  }
  const double dl = box_distance2(nodes_[n.left].box, p);
  const double dr = box_distance2(nodes_[n.right].box, p);
  const int first = dl <= dr ? n.left : n.right;
  const int second = dl <= dr ? n.right : n.left;
  const double b2 = best.cp.distance * best.cp.distance;
  if (std::min(dl, dr) <= b2) closest_rec(first, p, best);
  if (std::max(dl, dr) <= best.cp.distance * best.cp.distance) closest_rec(second, p, best);
}

TriangleBvh::Hit TriangleBvh::closest(const Point3& p) const {
  Hit best;
  best.cp.distance = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) closest_rec(0, p, best);
  return best;
}

int TriangleBvh::crossings(const Point3& p, const Vec3& d) const {
  if (nodes_.empty()) return 0;
  int count = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (!ray_box(n.box, p, d)) continue;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const auto& t = tris_[order_[i]];
        if (ray_triangle(p, d, v_[t[0]], v_[t[1]], v_[t[2]])) ++count;
      }
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  return count;
}

bool TriangleBvh::inside(const Point3& p) const {
  static const std::array<Vec3, 3> dirs{normalized(Vec3{0.5773, 0.3141, 0.7536}),
                                        normalized(Vec3{-0.4142, 0.8660, 0.2718}),
                                        normalized(Vec3{0.1618, -0.7071, -0.6931})};
  int votes = 0;
  for (const auto& d : dirs) votes += crossings(p, d) % 2;
  return votes >= 2;
}

}  // namespace vorocrust
