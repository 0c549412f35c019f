#include "vorocrust/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "vorocrust/log.hpp"

namespace vorocrust {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

InputComplex::InputComplex(std::vector<Point3> vertices, std::vector<std::array<int, 3>> triangles,
                           std::vector<std::array<int, 2>> segments)
    : vertices_(std::move(vertices)) {
  const int nv = static_cast<int>(vertices_.size());
  for (const auto& p : vertices_)
    if (!is_finite(p)) throw Error("non-finite vertex coordinate");
  bbox_ = bounding_box(vertices_);
  scale_ = vertices_.empty() ? 0.0 : bbox_.diagonal();

  triangles_.reserve(triangles.size());
  for (const auto& t : triangles) {
    for (int v : t)
      if (v < 0 || v >= nv) throw Error("triangle index out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
    triangles_.push_back(t);
  }

  vertex_edges_.assign(vertices_.size(), {});
  vertex_facets_.assign(vertices_.size(), {});
  auto add_edge = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = edge_lookup_.find(key);
    if (it != edge_lookup_.end()) return it->second;
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({std::min(a, b), std::max(a, b), {}});
    edge_lookup_.emplace(key, id);
    vertex_edges_[a].push_back(id);
    vertex_edges_[b].push_back(id);
    return id;
  };
  facet_edges_.resize(triangles_.size());
  for (int f = 0; f < static_cast<int>(triangles_.size()); ++f) {
    const auto& t = triangles_[f];
    for (int k = 0; k < 3; ++k) {
      const int e = add_edge(t[k], t[(k + 1) % 3]);
      facet_edges_[f][k] = e;
      edges_[e].facets.push_back(f);
      vertex_facets_[t[k]].push_back(f);
    }
  }
  for (const auto& s : segments) {
    if (s[0] < 0 || s[0] >= nv || s[1] < 0 || s[1] >= nv) throw Error("segment index out of range");
    if (s[0] == s[1]) continue;
    add_edge(s[0], s[1]);
  }
}

int InputComplex::edge_id(int a, int b) const {
  auto it = edge_lookup_.find(edge_key(a, b));
  return it == edge_lookup_.end() ? -1 : it->second;
}

int InputComplex::opposite_vertex(int f, int e) const {
  const auto& t = triangles_[f];
  const auto& ed = edges_[e];
  for (int v : t)
    if (v != ed.a && v != ed.b) return v;
  return -1;
}

bool InputComplex::facet_uses_edge_forward(int f, int e) const {
  const auto& t = triangles_[f];
  const auto& ed = edges_[e];
  for (int k = 0; k < 3; ++k)
    if (t[k] == ed.a && t[(k + 1) % 3] == ed.b) return true;
  return false;
}

Vec3 InputComplex::facet_normal(int f) const {
  const auto& t = triangles_[f];
  return triangle_normal(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

double InputComplex::facet_area(int f) const {
  const auto& t = triangles_[f];
  return triangle_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

bool InputComplex::is_watertight() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const MeshEdge& e) { return e.facets.size() == 2; });
}

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return MeshFormat::off;
  if (ext == ".obj") return MeshFormat::obj;
  if (ext == ".stl") return MeshFormat::stl;
  throw Error("unknown mesh format: " + path.string());
}

void weld_vertices(std::vector<Point3>& vertices, std::vector<std::array<int, 3>>& triangles, double tol) {
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  std::map<Key, std::vector<int>> grid;
  std::vector<Point3> merged;
  std::vector<int> remap(vertices.size());
  const double cell = tol > 0.0 ? tol : 1.0;
  auto key_of = [&](const Point3& p) {
    return Key{static_cast<std::int64_t>(std::floor(p.x / cell)), static_cast<std::int64_t>(std::floor(p.y / cell)),
               static_cast<std::int64_t>(std::floor(p.z / cell))};
  };
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Point3& p = vertices[i];
    const Key k = key_of(p);
    int found = -1;
    for (int dx = -1; dx <= 1 && found < 0; ++dx)
      for (int dy = -1; dy <= 1 && found < 0; ++dy)
        for (int dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find({std::get<0>(k) + dx, std::get<1>(k) + dy, std::get<2>(k) + dz});
          if (it == grid.end()) continue;
          for (int cand : it->second)
            if (distance(merged[cand], p) <= tol) {
              found = cand;
              break;
            }
        }
    if (found < 0) {
      found = static_cast<int>(merged.size());
      merged.push_back(p);
      grid[k].push_back(found);
    }
    remap[i] = found;
  }
  for (auto& t : triangles)
    for (int& v : t) v = remap[v];
  vertices = std::move(merged);
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

void add_polygon(const std::vector<int>& poly, std::vector<std::array<int, 3>>& tris, bool& warned) {
  if (poly.size() < 3) throw Error("non-triangle face cannot be triangulated");
  if (poly.size() > 3 && !warned) {
    spdlog::warn("polygonal faces fan-triangulated");
    warned = true;
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
}

void read_off(std::istream& in, std::vector<Point3>& verts, std::vector<std::array<int, 3>>& tris) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(strip_comment(line));
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  if (pos < tokens.size() && tokens[pos].rfind("OFF", 0) == 0) ++pos;
  if (tokens.size() < pos + 3) throw Error("malformed OFF header");
  const auto nv = std::stoul(tokens[pos]);
  const auto nf = std::stoul(tokens[pos + 1]);
  pos += 3;
  if (tokens.size() < pos + 3 * nv) throw Error("truncated OFF vertex list");
  for (std::size_t i = 0; i < nv; ++i, pos += 3)
    verts.push_back({std::stod(tokens[pos]), std::stod(tokens[pos + 1]), std::stod(tokens[pos + 2])});
  bool warned = false;
  for (std::size_t f = 0; f < nf; ++f) {
    if (pos >= tokens.size()) throw Error("truncated OFF face list");
    const auto n = std::stoul(tokens[pos++]);
    if (pos + n > tokens.size()) throw Error("truncated OFF face list");
    std::vector<int> poly;
    for (std::size_t k = 0; k < n; ++k) poly.push_back(std::stoi(tokens[pos++]));
    add_polygon(poly, tris, warned);
    // skip optional per-face color values up to the next face
    if (f + 1 < nf) {
      while (pos < tokens.size() && tokens[pos].find('.') != std::string::npos) ++pos;
    }
  }
}

void read_obj(std::istream& in, std::vector<Point3>& verts, std::vector<std::array<int, 3>>& tris) {
  std::string line;
  bool warned = false;
  while (std::getline(in, line)) {
    std::istringstream ss(strip_comment(line));
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Point3 p;
      if (!(ss >> p.x >> p.y >> p.z)) throw Error("malformed OBJ vertex");
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ss >> tok) {
        const int idx = std::stoi(tok.substr(0, tok.find('/')));
        poly.push_back(idx < 0 ? static_cast<int>(verts.size()) + idx : idx - 1);
      }
      add_polygon(poly, tris, warned);
    }
  }
}

void read_stl(std::istream& in, std::vector<Point3>& verts, std::vector<std::array<int, 3>>& tris) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  bool binary = false;
  if (data.size() >= 84) {
    std::uint32_t n = 0;
    std::memcpy(&n, data.data() + 80, 4);
    binary = data.size() == 84 + 50ULL * n;
  }
  if (binary) {
    std::uint32_t n = 0;
    std::memcpy(&n, data.data() + 80, 4);
    for (std::uint32_t f = 0; f < n; ++f) {
      const char* rec = data.data() + 84 + 50ULL * f;
      std::array<int, 3> tri{};
      for (int k = 0; k < 3; ++k) {
        float xyz[3];
        std::memcpy(xyz, rec + 12 + 12 * k, 12);
        tri[k] = static_cast<int>(verts.size());
        verts.push_back({xyz[0], xyz[1], xyz[2]});
      }
      tris.push_back(tri);
    }
    return;
  }
  std::istringstream ss(data);
  std::string tok;
  std::vector<int> loop;
  while (ss >> tok) {
    if (tok == "vertex") {
      Point3 p;
      if (!(ss >> p.x >> p.y >> p.z)) throw Error("malformed STL vertex");
      loop.push_back(static_cast<int>(verts.size()));
      verts.push_back(p);
    } else if (tok == "endloop") {
      if (loop.size() != 3) throw Error("non-triangle face cannot be triangulated");
      tris.push_back({loop[0], loop[1], loop[2]});
      loop.clear();
    }
  }
}

}  // namespace

InputComplex load_mesh(const std::filesystem::path& path, MeshFormat format, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable file: " + path.string());
  std::vector<Point3> verts;
  std::vector<std::array<int, 3>> tris;
  switch (format) {
    case MeshFormat::off: read_off(in, verts, tris); break;
    case MeshFormat::obj: read_obj(in, verts, tris); break;
    case MeshFormat::stl: read_stl(in, verts, tris); break;
  }
  if (verts.empty() || tris.empty()) throw Error("empty mesh");
  for (const auto& t : tris)
    for (int v : t)
      if (v < 0 || v >= static_cast<int>(verts.size())) throw Error("face index out of range");

  const double scale = bounding_box(verts).diagonal();
  weld_vertices(verts, tris, options.weld_tolerance * scale);

  const std::size_t before = tris.size();
  std::erase_if(tris, [&](const std::array<int, 3>& t) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return true;
    return triangle_area(verts[t[0]], verts[t[1]], verts[t[2]]) < 1e-14 * scale * scale;
  });
  if (tris.size() != before) spdlog::warn("dropped {} degenerate facets", before - tris.size());
  if (tris.empty()) throw Error("empty mesh");

  // drop vertices no facet references
  std::vector<int> remap(verts.size(), -1);
  std::vector<Point3> used;
  for (auto& t : tris)
    for (int& v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(verts[v]);
      }
      v = remap[v];
    }

  InputComplex mesh(std::move(used), std::move(tris));
  if (options.require_watertight) {
    for (const auto& e : mesh.edges())
      if (e.facets.size() == 1) throw Error("not watertight");
  }
  return mesh;
}

}  // namespace vorocrust
