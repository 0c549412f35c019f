#include "vorocrust/spatial_index.hpp"

#include <algorithm>
#include <cmath>

namespace vorocrust {

Locus corner_locus(const InputComplex& mesh, const Strata& strata, int corner) {
  return {mesh.vertices()[strata.corners[corner]], StratumKind::corner, corner, strata.corners[corner], Vec3{}};
}

Locus crease_locus(const Strata& strata, int edge, const Point3& p) {
  return {p, StratumKind::crease, strata.edge_crease[edge], edge, strata.edge_direction[edge]};
}

Locus patch_locus(const Strata& strata, int facet, const Point3& p) {
  return {p, StratumKind::patch, strata.facet_patch[facet], facet, strata.facet_normal[facet]};
}

namespace {

bool displacement_test(const Locus& center, const Locus& other, double theta, double tiny) {
  const Vec3 d = center.point - other.point;
  if (norm(d) <= tiny) return true;
  if (other.kind == StratumKind::crease) return line_angle(other.orientation, d) <= theta;
  return line_angle(other.orientation, d) >= kPi / 2.0 - theta;
}

}  // namespace

bool cosmooth(const Strata& strata, const Locus& center, const Locus& other, double theta, double tiny) {
  const int dc = static_cast<int>(center.kind);
  const int dother = static_cast<int>(other.kind);
  if (dother < dc) return false;
  if (dother == dc) {
    if (center.stratum != other.stratum) return false;
    if (center.kind == StratumKind::corner) return true;
    if (angle_between(other.orientation, center.orientation) > theta) return false;
    return displacement_test(center, other, theta, tiny);
  }
  if (!strata.incident(center.kind, center.stratum, other.kind, other.stratum)) return false;
  return displacement_test(center, other, theta, tiny);
}

bool cosmooth_pair(const Strata& strata, const Locus& a, const Locus& b, double theta, double tiny) {
  if (a.kind == b.kind) return cosmooth(strata, a, b, theta, tiny) && cosmooth(strata, b, a, theta, tiny);
  return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? cosmooth(strata, a, b, theta, tiny)
                                                             : cosmooth(strata, b, a, theta, tiny);
}

std::vector<std::size_t> allocate_samples(const std::vector<double>& measures, std::size_t total, Rng& rng) {
  std::vector<std::size_t> out(measures.size(), 1);
  double sum = 0.0;
  for (double m : measures) sum += m;
  if (sum <= 0.0) return out;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const double want = static_cast<double>(total) * measures[i] / sum;
    const double base = std::floor(want);
    std::size_t n = static_cast<std::size_t>(base);
    if (uniform01(rng) < want - base) ++n;
    out[i] = std::max<std::size_t>(1, n);
  }
  return out;
}

BoundaryIndex::BoundaryIndex(const InputComplex& mesh, const Strata& strata, std::size_t crease_samples,
                             std::size_t surface_samples, Rng& rng)
    : mesh_(&mesh), strata_(&strata), tiny_(1e-12 * mesh.scale()) {
  const auto& V = mesh.vertices();
  std::array<std::vector<Point3>, 3> pts;
  std::array<std::vector<int>, 3> ids;
  auto push = [&](const Locus& l) {
    const int k = static_cast<int>(l.kind);
    ids[k].push_back(static_cast<int>(samples_.size()));
    pts[k].push_back(l.point);
    samples_.push_back(l);
  };
  for (int c = 0; c < static_cast<int>(strata.corners.size()); ++c) push(corner_locus(mesh, strata, c));

  std::vector<int> crease_edges;
  std::vector<double> lengths;
  for (const auto& cr : strata.creases)
    for (int e : cr.edges) {
      crease_edges.push_back(e);
      lengths.push_back(distance(V[mesh.edges()[e].a], V[mesh.edges()[e].b]));
    }
  if (!crease_edges.empty()) {
    const auto counts = allocate_samples(lengths, crease_samples, rng);
    for (std::size_t i = 0; i < crease_edges.size(); ++i) {
      const auto& ed = mesh.edges()[crease_edges[i]];
      // stratified along the edge
      for (std::size_t k = 0; k < counts[i]; ++k) {
        const double t = (static_cast<double>(k) + uniform01(rng)) / static_cast<double>(counts[i]);
        push(crease_locus(strata, crease_edges[i], V[ed.a] + (V[ed.b] - V[ed.a]) * t));
      }
    }
  }
  if (mesh.has_facets()) {
    std::vector<double> areas(mesh.triangles().size());
    for (std::size_t f = 0; f < areas.size(); ++f) areas[f] = mesh.facet_area(static_cast<int>(f));
    const auto counts = allocate_samples(areas, surface_samples, rng);
    for (std::size_t f = 0; f < areas.size(); ++f) {
      const auto& t = mesh.triangles()[f];
      for (std::size_t k = 0; k < counts[f]; ++k)
        push(patch_locus(strata, static_cast<int>(f), sample_triangle(rng, V[t[0]], V[t[1]], V[t[2]])));
    }
  }
  for (int k = 0; k < 3; ++k) trees_[k].build(std::move(pts[k]), std::move(ids[k]));
}

std::optional<BoundaryIndex::Nearest> BoundaryIndex::nearest_non_cosmooth(const Locus& p, double theta) const {
  KdTree::Hit best;
  auto accept = [&](int id) { return !cosmooth(*strata_, p, samples_[id], theta, tiny_); };
  for (const auto& tree : trees_) {
    const auto hit = tree.nearest(p.point, accept, best.distance);
    if (hit.id >= 0 && (hit.distance < best.distance || (hit.distance == best.distance && hit.id < best.id)))
      best = hit;
  }
  if (best.id < 0) return std::nullopt;
  return Nearest{samples_[best.id].point, best.distance, best.id};
}

int BallIndex::add(const Ball& b) {
  const int id = static_cast<int>(balls_.size());
  balls_.push_back(b);
  const int k = static_cast<int>(b.type);
  trees_[k].insert(b.center, id);
  rmax_[k] = std::max(rmax_[k], b.radius);
  lipschitz_valid_[k] = false;
  return id;
}

void BallIndex::set_radius(int id, double r) {
  if (!(r > 0.0) || r > balls_[id].radius) throw Error("ball radius may only shrink");
  if (r == balls_[id].radius) return;
  balls_[id].radius = r;
  lipschitz_valid_[static_cast<int>(balls_[id].type)] = false;
}

std::vector<int> BallIndex::balls_overlapping(const Sphere& s, int self, std::optional<StratumKind> own_type,
                                              bool member) const {
  std::vector<int> out;
  std::vector<int> cand;
  for (int k = 0; k < 3; ++k) {
    if (trees_[k].empty()) continue;
    double R = s.radius + rmax_[k];
    if (member && own_type && static_cast<int>(*own_type) == k && lipschitz_valid_[k])
      R = std::min(R, overlap_query_radius(s.radius, L_));
    cand.clear();
    trees_[k].within(s.center, R, cand);
    for (int id : cand)
      if (id != self && distance(balls_[id].center, s.center) < s.radius + balls_[id].radius) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> BallIndex::balls_covering(const Point3& x) const {
  std::vector<int> out;
  std::vector<int> cand;
  for (int k = 0; k < 3; ++k) {
    if (trees_[k].empty()) continue;
    double R = rmax_[k];
    if (lipschitz_valid_[k]) {
      const auto q = trees_[k].nearest(x);
      R = std::min(R, covering_query_radius(balls_[q.id].radius, q.distance, L_));
    }
    cand.clear();
    trees_[k].within(x, R, cand);
    for (int id : cand)
      if (distance2(balls_[id].center, x) <= balls_[id].radius * balls_[id].radius) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> BallIndex::centers_within(const Point3& x, double r) const {
  std::vector<int> out;
  for (const auto& tree : trees_) tree.within(x, r, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace vorocrust
