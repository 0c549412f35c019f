#include "vorocrust/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <unordered_set>

#include "vorocrust/log.hpp"
#include "vorocrust/parameters.hpp"

namespace vorocrust {

const char* to_string(StratumKind kind) {
  switch (kind) {
    case StratumKind::corner: return "corner";
    case StratumKind::crease: return "crease";
    case StratumKind::patch: return "patch";
  }
  return "?";
}

bool Strata::incident(StratumKind low_kind, int low, StratumKind high_kind, int high) const {
  const std::vector<int>* list = nullptr;
  if (low_kind == StratumKind::corner && high_kind == StratumKind::crease) list = &corner_creases[low];
  if (low_kind == StratumKind::corner && high_kind == StratumKind::patch) list = &corner_patches[low];
  if (low_kind == StratumKind::crease && high_kind == StratumKind::patch) list = &crease_patches[low];
  if (!list) return false;
  return std::find(list->begin(), list->end(), high) != list->end();
}

std::size_t Strata::sharp_edge_count() const {
  return static_cast<std::size_t>(std::count(sharp_edge.begin(), sharp_edge.end(), 1));
}

namespace {

/// Per-facet flip flags giving a consistent orientation on every connected
/// component (across manifold edges). Components keep the majority input
/// orientation; closed components end up with positive signed volume.
std::vector<char> orient_facets(const InputComplex& mesh) {
  const int nf = static_cast<int>(mesh.triangles().size());
  std::vector<char> flip(nf, 0);
  std::vector<int> comp(nf, -1);
  int ncomp = 0;
  for (int seed = 0; seed < nf; ++seed) {
    if (comp[seed] >= 0) continue;
    std::vector<int> members;
    std::deque<int> queue{seed};
    comp[seed] = ncomp;
    bool closed = true;
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      members.push_back(f);
      for (int e : mesh.facet_edges(f)) {
        const auto& edge = mesh.edges()[e];
        if (edge.facets.size() != 2) {
          closed = false;
          continue;
        }
        const int g = edge.facets[0] == f ? edge.facets[1] : edge.facets[0];
        const bool same = mesh.facet_uses_edge_forward(f, e) == mesh.facet_uses_edge_forward(g, e);
        const char want = static_cast<char>(flip[f] ^ (same ? 1 : 0));
        if (comp[g] < 0) {
          comp[g] = ncomp;
          flip[g] = want;
          queue.push_back(g);
        }
      }
    }
    double flipped_area = 0.0, total_area = 0.0;
    for (int f : members) {
      total_area += mesh.facet_area(f);
      if (flip[f]) flipped_area += mesh.facet_area(f);
    }
    if (flipped_area > 0.5 * total_area)
      for (int f : members) flip[f] ^= 1;
    if (closed) {
      double vol = 0.0;
      for (int f : members) {
        const auto& t = mesh.triangles()[f];
        const double v = dot(mesh.vertices()[t[0]], cross(mesh.vertices()[t[1]], mesh.vertices()[t[2]]));
        vol += flip[f] ? -v : v;
      }
      if (vol < 0.0)
        for (int f : members) flip[f] ^= 1;
    }
    ++ncomp;
  }
  return flip;
}

Strata detect_impl(const InputComplex& mesh, double theta_sharp, const std::vector<char>* forced_sharp) {
  Strata s;
  const int nv = static_cast<int>(mesh.vertices().size());
  const int ne = static_cast<int>(mesh.edges().size());
  const int nf = static_cast<int>(mesh.triangles().size());
  const auto& V = mesh.vertices();

  const auto flip = orient_facets(mesh);
  s.facet_normal.resize(nf);
  for (int f = 0; f < nf; ++f) s.facet_normal[f] = flip[f] ? -mesh.facet_normal(f) : mesh.facet_normal(f);

  s.sharp_edge.assign(ne, 0);
  for (int e = 0; e < ne; ++e) {
    const auto& edge = mesh.edges()[e];
    if (edge.facets.size() != 2) {
      s.sharp_edge[e] = 1;
      continue;
    }
    const Vec3 n1 = s.facet_normal[edge.facets[0]];
    Vec3 n2 = s.facet_normal[edge.facets[1]];
    // consistent neighbors traverse the edge in opposite directions; a
    // non-orientable seam is compared with one normal reversed
    const bool fwd0 = mesh.facet_uses_edge_forward(edge.facets[0], e) != static_cast<bool>(flip[edge.facets[0]]);
    const bool fwd1 = mesh.facet_uses_edge_forward(edge.facets[1], e) != static_cast<bool>(flip[edge.facets[1]]);
    if (fwd0 == fwd1) n2 = -n2;
    if (angle_between(n1, n2) > theta_sharp) s.sharp_edge[e] = 1;
  }
  if (forced_sharp)
    for (int e = 0; e < ne; ++e)
      if ((*forced_sharp)[e]) s.sharp_edge[e] = 1;

  // corners
  s.vertex_corner.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    std::vector<int> sharp;
    for (int e : mesh.vertex_edges(v))
      if (s.sharp_edge[e]) sharp.push_back(e);
    bool corner = false;
    if (sharp.size() == 1 || sharp.size() > 2) corner = true;
    if (sharp.size() == 2) {
      auto other = [&](int e) {
        const auto& ed = mesh.edges()[e];
        return ed.a == v ? ed.b : ed.a;
      };
      const double ang = angle_between(V[other(sharp[0])] - V[v], V[other(sharp[1])] - V[v]);
      if (ang < kPi - theta_sharp) corner = true;
    }
    if (!corner && sharp.size() != 1) {
      // sectors: facets around v connected through non-sharp edges at v
      const auto& fans = mesh.vertex_facets(v);
      std::map<int, int> sector;
      int nsec = 0;
      for (int f0 : fans) {
        if (sector.count(f0)) continue;
        std::deque<int> queue{f0};
        sector[f0] = nsec;
        while (!queue.empty()) {
          const int f = queue.front();
          queue.pop_front();
          for (int e : mesh.facet_edges(f)) {
            const auto& ed = mesh.edges()[e];
            if (s.sharp_edge[e] || (ed.a != v && ed.b != v)) continue;
            for (int g : ed.facets)
              if (!sector.count(g)) {
                sector[g] = nsec;
                queue.push_back(g);
              }
          }
        }
        ++nsec;
      }
      for (auto i = sector.begin(); i != sector.end() && !corner; ++i)
        for (auto j = std::next(i); j != sector.end(); ++j)
          if (i->second == j->second &&
              angle_between(s.facet_normal[i->first], s.facet_normal[j->first]) >= theta_sharp) {
            corner = true;
            break;
          }
    }
    if (corner) {
      s.vertex_corner[v] = static_cast<int>(s.corners.size());
      s.corners.push_back(v);
    }
  }

  // creases
  s.edge_crease.assign(ne, -1);
  s.edge_direction.assign(ne, Vec3{});
  auto next_edge = [&](int v, int from) {
    for (int e : mesh.vertex_edges(v))
      if (e != from && s.sharp_edge[e]) return e;
    return -1;
  };
  auto other_end = [&](int e, int v) {
    const auto& ed = mesh.edges()[e];
    return ed.a == v ? ed.b : ed.a;
  };
  for (int e0 = 0; e0 < ne; ++e0) {
    if (!s.sharp_edge[e0] || s.edge_crease[e0] >= 0) continue;
    // walk backwards from edge.a to find the start of the chain
    int start_v = mesh.edges()[e0].a;
    int start_e = e0;
    bool cycle = false;
    while (s.vertex_corner[start_v] < 0) {
      const int prev = next_edge(start_v, start_e);
      if (prev < 0) break;
      if (prev == e0) {
        cycle = true;
        break;
      }
      start_v = other_end(prev, start_v);
      start_e = prev;
    }
    if (cycle) {
      start_v = mesh.edges()[e0].a;
      start_e = e0;
    }
    Crease c;
    c.closed = cycle;
    const int id = static_cast<int>(s.creases.size());
    int v = start_v;
    int e = start_e;
    c.vertices.push_back(v);
    while (true) {
      const int w = other_end(e, v);
      c.edges.push_back(e);
      s.edge_crease[e] = id;
      s.edge_direction[e] = normalized(V[w] - V[v]);
      c.length += distance(V[w], V[v]);
      if (s.vertex_corner[w] >= 0) {
        c.vertices.push_back(w);
        break;
      }
      const int ne2 = next_edge(w, e);
      if (ne2 < 0 || s.edge_crease[ne2] == id) {
        if (!cycle) c.vertices.push_back(w);
        break;
      }
      c.vertices.push_back(w);
      v = w;
      e = ne2;
    }
    if (!cycle) {
      c.start_corner = s.vertex_corner[c.vertices.front()];
      c.end_corner = s.vertex_corner[c.vertices.back()];
    }
    s.creases.push_back(std::move(c));
  }

  // patches
  s.facet_patch.assign(nf, -1);
  for (int f0 = 0; f0 < nf; ++f0) {
    if (s.facet_patch[f0] >= 0) continue;
    Patch p;
    const int id = static_cast<int>(s.patches.size());
    std::deque<int> queue{f0};
    s.facet_patch[f0] = id;
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      p.facets.push_back(f);
      p.area += mesh.facet_area(f);
      for (int e : mesh.facet_edges(f)) {
        if (s.sharp_edge[e]) continue;
        for (int g : mesh.edges()[e].facets)
          if (s.facet_patch[g] < 0) {
            s.facet_patch[g] = id;
            queue.push_back(g);
          }
      }
    }
    s.patches.push_back(std::move(p));
  }

  // incidence
  s.corner_creases.assign(s.corners.size(), {});
  s.corner_patches.assign(s.corners.size(), {});
  s.crease_patches.assign(s.creases.size(), {});
  auto add_unique = [](std::vector<int>& list, int x) {
    if (std::find(list.begin(), list.end(), x) == list.end()) list.push_back(x);
  };
  for (int c = 0; c < static_cast<int>(s.creases.size()); ++c) {
    const auto& cr = s.creases[c];
    if (cr.start_corner >= 0) add_unique(s.corner_creases[cr.start_corner], c);
    if (cr.end_corner >= 0) add_unique(s.corner_creases[cr.end_corner], c);
    for (int e : cr.edges)
      for (int f : mesh.edges()[e].facets) add_unique(s.crease_patches[c], s.facet_patch[f]);
  }
  for (int k = 0; k < static_cast<int>(s.corners.size()); ++k)
    for (int f : mesh.vertex_facets(s.corners[k])) add_unique(s.corner_patches[k], s.facet_patch[f]);
  for (auto& l : s.corner_patches) std::sort(l.begin(), l.end());
  for (auto& l : s.corner_creases) std::sort(l.begin(), l.end());
  for (auto& l : s.crease_patches) std::sort(l.begin(), l.end());
  return s;
}

}  // namespace

Strata detect_features(const InputComplex& mesh, double theta_sharp) { return detect_impl(mesh, theta_sharp, nullptr); }

double max_patch_normal_deviation(const InputComplex& mesh, const Strata& strata) {
  double worst = 0.0;
  for (int e = 0; e < static_cast<int>(mesh.edges().size()); ++e) {
    const auto& ed = mesh.edges()[e];
    if (strata.sharp_edge[e] || ed.facets.size() != 2) continue;
    worst = std::max(worst, angle_between(strata.facet_normal[ed.facets[0]], strata.facet_normal[ed.facets[1]]));
  }
  return worst;
}

namespace {

std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

SmoothingResult smooth_patches(const InputComplex& input, const Strata& input_strata, double theta_sharp,
                               double dihedral_threshold, int max_iterations) {
  SmoothingResult result{input, input_strata, 0, 0.0};
  // sharp edges by endpoint pair, carried across rounds
  std::unordered_set<std::uint64_t> sharp_pairs;
  for (int e = 0; e < static_cast<int>(input.edges().size()); ++e)
    if (input_strata.sharp_edge[e]) sharp_pairs.insert(pair_key(input.edges()[e].a, input.edges()[e].b));
  std::vector<char> fixed(input.vertices().size(), 0);
  for (int e = 0; e < static_cast<int>(input.edges().size()); ++e)
    if (input_strata.sharp_edge[e]) fixed[input.edges()[e].a] = fixed[input.edges()[e].b] = 1;

  const double max_normal_angle = kPi - dihedral_threshold;
  for (int round = 0; round < max_iterations; ++round) {
    const InputComplex& mesh = result.mesh;
    const Strata& strata = result.strata;
    const int nf = static_cast<int>(mesh.triangles().size());
    const int ne = static_cast<int>(mesh.edges().size());
    const auto& V = mesh.vertices();

    std::vector<char> red(nf, 0);
    bool any = false;
    for (int e = 0; e < ne; ++e) {
      const auto& ed = mesh.edges()[e];
      if (strata.sharp_edge[e] || ed.facets.size() != 2) continue;
      if (angle_between(strata.facet_normal[ed.facets[0]], strata.facet_normal[ed.facets[1]]) > max_normal_angle) {
        red[ed.facets[0]] = red[ed.facets[1]] = 1;
        any = true;
      }
    }
    if (!any) break;

    std::vector<char> split(ne, 0);
    for (int f = 0; f < nf; ++f)
      if (red[f])
        for (int e : mesh.facet_edges(f)) split[e] = 1;
    for (bool changed = true; changed;) {
      changed = false;
      for (int f = 0; f < nf; ++f) {
        if (red[f]) continue;
        int n = 0;
        for (int e : mesh.facet_edges(f)) n += split[e];
        if (n >= 2) {
          red[f] = 1;
          for (int e : mesh.facet_edges(f)) split[e] = 1;
          changed = true;
        }
      }
    }

    std::vector<Point3> verts = V;
    // old vertex rule, applied only where the whole one-ring is refined
    for (int v = 0; v < static_cast<int>(V.size()); ++v) {
      if (fixed[v]) continue;
      const auto& fans = mesh.vertex_facets(v);
      if (fans.empty() || !std::all_of(fans.begin(), fans.end(), [&](int f) { return red[f]; })) continue;
      const auto& ring = mesh.vertex_edges(v);
      const double n = static_cast<double>(ring.size());
      const double beta = ring.size() == 3 ? 3.0 / 16.0 : 3.0 / (8.0 * n);
      Vec3 sum;
      for (int e : ring) sum += V[mesh.edges()[e].a == v ? mesh.edges()[e].b : mesh.edges()[e].a];
      verts[v] = V[v] * (1.0 - n * beta) + sum * beta;
    }
    std::vector<int> mid(ne, -1);
    for (int e = 0; e < ne; ++e) {
      if (!split[e]) continue;
      const auto& ed = mesh.edges()[e];
      Point3 p = (V[ed.a] + V[ed.b]) * 0.5;
      if (!strata.sharp_edge[e] && ed.facets.size() == 2) {
        const int c = mesh.opposite_vertex(ed.facets[0], e);
        const int d = mesh.opposite_vertex(ed.facets[1], e);
        p = (V[ed.a] + V[ed.b]) * 0.375 + (V[c] + V[d]) * 0.125;
      }
      mid[e] = static_cast<int>(verts.size());
      verts.push_back(p);
      fixed.push_back(strata.sharp_edge[e] ? 1 : 0);
      if (strata.sharp_edge[e]) {
        sharp_pairs.insert(pair_key(ed.a, mid[e]));
        sharp_pairs.insert(pair_key(mid[e], ed.b));
      }
    }

    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(nf) * 2);
    for (int f = 0; f < nf; ++f) {
      const auto& t = mesh.triangles()[f];
      std::array<int, 3> m{};
      int nsplit = 0;
      for (int k = 0; k < 3; ++k) {
        const int e = mesh.edge_id(t[k], t[(k + 1) % 3]);
        m[k] = mid[e];
        if (m[k] >= 0) ++nsplit;
      }
      if (nsplit == 0) {
        tris.push_back(t);
      } else if (nsplit == 3) {
        tris.push_back({t[0], m[0], m[2]});
        tris.push_back({m[0], t[1], m[1]});
        tris.push_back({m[2], m[1], t[2]});
        tris.push_back({m[0], m[1], m[2]});
      } else {
        for (int k = 0; k < 3; ++k)
          if (m[k] >= 0) {
            const int a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
            tris.push_back({a, m[k], c});
            tris.push_back({m[k], b, c});
          }
      }
    }

    InputComplex next(std::move(verts), std::move(tris));
    std::vector<char> forced(next.edges().size(), 0);
    for (int e = 0; e < static_cast<int>(next.edges().size()); ++e)
      if (sharp_pairs.count(pair_key(next.edges()[e].a, next.edges()[e].b))) forced[e] = 1;
    Strata next_strata = detect_impl(next, theta_sharp, &forced);
    result.mesh = std::move(next);
    result.strata = std::move(next_strata);
    result.rounds = round + 1;
  }
  result.effective_theta_flat = max_patch_normal_deviation(result.mesh, result.strata);
  spdlog::info("smoothing: {} rounds, {} facets, effective theta_flat {:.2f} deg", result.rounds,
               result.mesh.triangles().size(), result.effective_theta_flat * 180.0 / kPi);
  return result;
}

}  // namespace vorocrust
