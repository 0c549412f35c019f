#include "vorocrust/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace vorocrust {

double angle_between(const Vec3& a, const Vec3& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  // atan2 form stays accurate for nearly parallel vectors
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

double line_angle(const Vec3& a, const Vec3& b) {
  const double ang = angle_between(a, b);
  return std::min(ang, M_PI - ang);
}

Plane Plane::bisector(const Point3& a, const Point3& b) {
  const Vec3 n = normalized(b - a);
  return {n, dot(n, (a + b) * 0.5)};
}

void Aabb::expand(const Vec3& p) {
  lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
  hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
}

double Aabb::volume() const {
  const Vec3 e = extent();
  return e.x * e.y * e.z;
}

Aabb Aabb::scaled(double factor) const {
  const Vec3 c = center();
  const Vec3 h = extent() * (0.5 * factor);
  return {c - h, c + h};
}

bool Aabb::contains(const Vec3& p) const {
  return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
}

Aabb bounding_box(std::span<const Vec3> points) {
  Aabb box;
  for (const auto& p : points) box.expand(p);
  return box;
}

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

Vec3 triangle_normal(const Point3& a, const Point3& b, const Point3& c) {
  return normalized(cross(b - a, c - a));
}

double triangle_quality(const Point3& a, const Point3& b, const Point3& c) {
  const double la = distance(b, c);
  const double lb = distance(a, c);
  const double lc = distance(a, b);
  const double h = std::max({la, lb, lc});
  const double half_perimeter = 0.5 * (la + lb + lc);
  if (h <= 0.0) return 0.0;
  const double area = triangle_area(a, b, c);
  const double q = 6.0 * area / (std::sqrt(3.0) * h * half_perimeter);
  return std::clamp(q, 0.0, 1.0);
}

std::array<double, 3> triangle_angles(const Point3& a, const Point3& b, const Point3& c) {
  return {angle_between(b - a, c - a), angle_between(a - b, c - b), angle_between(a - c, b - c)};
}

ClosestPoint closest_point_segment(const Point3& p, const Point3& a, const Point3& b) {
  const Vec3 ab = b - a;
  const double len2 = norm2(ab);
  if (len2 == 0.0) return {distance(p, a), a, ClosestPoint::Region::vertex};
  const double t = dot(p - a, ab) / len2;
  if (t <= 0.0) return {distance(p, a), a, ClosestPoint::Region::vertex};
  if (t >= 1.0) return {distance(p, b), b, ClosestPoint::Region::vertex};
  const Point3 q = a + ab * t;
  return {distance(p, q), q, ClosestPoint::Region::edge};
}

ClosestPoint closest_point_triangle(const Point3& p, const Point3& a, const Point3& b,
                                    const Point3& c) {
  using Region = ClosestPoint::Region;
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  if (norm2(cross(ab, ac)) <= 1e-30 * std::max(norm2(ab), norm2(ac)) * std::max(norm2(ab), norm2(ac))) {
    // degenerate: distance to the hull, which is the longest segment
    ClosestPoint best = closest_point_segment(p, a, b);
    for (const auto& cand : {closest_point_segment(p, b, c), closest_point_segment(p, a, c)})
      if (cand.distance < best.distance) best = cand;
    return best;
  }
  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {distance(p, a), a, Region::vertex};

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return {distance(p, b), b, Region::vertex};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    const Point3 q = a + ab * v;
    return {distance(p, q), q, Region::edge};
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return {distance(p, c), c, Region::vertex};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    const Point3 q = a + ac * w;
    return {distance(p, q), q, Region::edge};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    const Point3 q = b + (c - b) * w;
    return {distance(p, q), q, Region::edge};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  const Point3 q = a + ab * v + ac * w;
  return {distance(p, q), q, Region::interior};
}

std::vector<Point3> sphere_triplet_points(const Sphere& s1, const Sphere& s2, const Sphere& s3) {
  const Vec3 e1 = s2.center - s1.center;
  const Vec3 e2 = s3.center - s1.center;
  const double max_r = std::max({s1.radius, s2.radius, s3.radius});
  const double scale = std::max({norm(e1), norm(e2), max_r});
  const Vec3 n = cross(e1, e2);
  if (scale == 0.0 || norm(n) < 1e-12 * scale * scale) throw Error("degenerate triplet");

  // Local frame: ex along c1->c2, ey in the plane of the centers, ez = ex x ey.
  const double d = norm(e1);
  const Vec3 ex = e1 / d;
  const double i = dot(ex, e2);
  const Vec3 ey = normalized(e2 - ex * i);
  const Vec3 ez = cross(ex, ey);
  const double j = dot(ey, e2);

  const double r1 = s1.radius, r2 = s2.radius, r3 = s3.radius;
  const double x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - (i / j) * x;
  const double z2 = r1 * r1 - x * x - y * y;
  const double tol = 1e-10 * max_r;
  const Point3 base = s1.center + ex * x + ey * y;
  if (z2 < 0.0) {
    if (z2 >= -tol * tol) return {base};
    return {};
  }
  const double z = std::sqrt(z2);
  if (z <= tol) return {base};
  return {base + ez * z, base - ez * z};
}

Sphere circumsphere(const Point3& a, const Point3& b, const Point3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 n = cross(ab, ac);
  const double n2 = norm2(n);
  if (n2 <= 1e-30 * norm2(ab) * norm2(ac)) return {a, -1.0};
  const Vec3 offset = (cross(n, ab) * norm2(ac) + cross(ac, n) * norm2(ab)) / (2.0 * n2);
  return {a + offset, norm(offset)};
}

Sphere circumsphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ad = d - a;
  const double det = dot(ab, cross(ac, ad));
  const double scale = norm(ab) * norm(ac) * norm(ad);
  if (std::abs(det) <= 1e-12 * scale) return {a, -1.0};
  const Vec3 offset =
      (cross(ac, ad) * norm2(ab) + cross(ad, ab) * norm2(ac) + cross(ab, ac) * norm2(ad)) / (2.0 * det);
  return {a + offset, norm(offset)};
}

namespace {

bool inside(const Sphere& s, const Point3& p) {
  if (s.radius < 0.0) return false;
  return distance(s.center, p) <= s.radius * (1.0 + 1e-12) + 1e-300;
}

Sphere sphere_from_support(std::span<const Point3> support) {
  switch (support.size()) {
    case 0:
      return {{}, -1.0};
    case 1:
      return {support[0], 0.0};
    case 2:
      return {(support[0] + support[1]) * 0.5, 0.5 * distance(support[0], support[1])};
    case 3: {
      Sphere s = circumsphere(support[0], support[1], support[2]);
      if (s.radius >= 0.0) return s;
      // collinear: the farthest pair spans the others
      Sphere best{{}, -1.0};
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const Sphere cand{(support[i] + support[j]) * 0.5, 0.5 * distance(support[i], support[j])};
          if (cand.radius > best.radius) best = cand;
        }
      return best;
    }
    default: {
      Sphere s = circumsphere(support[0], support[1], support[2], support[3]);
      if (s.radius >= 0.0) return s;
      // coplanar support: smallest three-point sphere containing all four
      Sphere best{{}, std::numeric_limits<double>::infinity()};
      for (int skip = 0; skip < 4; ++skip) {
        std::array<Point3, 3> tri;
        int k = 0;
        for (int i = 0; i < 4; ++i)
          if (i != skip) tri[k++] = support[i];
        const Sphere cand = sphere_from_support(tri);
        if (cand.radius < best.radius && inside(cand, support[skip])) best = cand;
      }
      return best;
    }
  }
}

Sphere welzl(std::vector<Point3>& pts, std::size_t n, std::vector<Point3>& support) {
  Sphere s = sphere_from_support(support);
  if (support.size() == 4) return s;
  for (std::size_t i = 0; i < n; ++i) {
    if (inside(s, pts[i])) continue;
    support.push_back(pts[i]);
    s = welzl(pts, i, support);
    support.pop_back();
    // move-to-front keeps the expected running time linear
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i),
                pts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return s;
}

}  // namespace

Sphere min_enclosing_sphere(std::span<const Point3> points) {
  if (points.empty()) return {{}, 0.0};
  std::vector<Point3> pts(points.begin(), points.end());
  std::mt19937_64 rng(0x5eed5eedULL);
  std::shuffle(pts.begin(), pts.end(), rng);
  std::vector<Point3> support;
  support.reserve(4);
  return welzl(pts, pts.size(), support);
}

Sphere chebyshev_ball(std::span<const Plane> halfspaces, const Point3& interior_point) {
  // maximize t  s.t.  n_i.(x0 + u - w) + t <= d_i,  u, w, t >= 0
  const std::size_t m = halfspaces.size();
  constexpr std::size_t kVars = 7;
  const std::size_t cols = kVars + m + 1;
  std::vector<std::vector<double>> tab(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& h = halfspaces[i];
    const double b = h.offset - dot(h.normal, interior_point);
    if (b <= 0.0) return {interior_point, 0.0};
    auto& row = tab[i];
    for (int k = 0; k < 3; ++k) {
      row[k] = h.normal[k];
      row[3 + k] = -h.normal[k];
    }
    row[6] = 1.0;
    row[kVars + i] = 1.0;
    row[cols - 1] = b;
    basis[i] = kVars + i;
  }
  tab[m][6] = -1.0;

  constexpr double eps = 1e-12;
  for (int iter = 0; iter < 10000; ++iter) {
    // Bland's rule: first improving column
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j)
      if (tab[m][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] <= eps) continue;
      const double ratio = tab[i][cols - 1] / tab[i][enter];
      if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave < m && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) throw Error("degenerate cell");  // unbounded region
    const double piv = tab[leave][enter];
    for (auto& v : tab[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = tab[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
  }
  std::array<double, kVars> sol{};
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < kVars) sol[basis[i]] = tab[i][cols - 1];
  const Vec3 x = interior_point + Vec3{sol[0] - sol[3], sol[1] - sol[4], sol[2] - sol[5]};
  return {x, sol[6]};
}

}  // namespace vorocrust
