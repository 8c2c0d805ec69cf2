#pragma once

// Conformal 2D meshes of triangles or quadrilaterals: connectivity, boundary
// tags, periodic identification, structured generators, a gmsh 2.2 reader and
// the continuous DOF numbering for B1/B2.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "amrd/bezier_basis.hpp"
#include "amrd/core.hpp"

namespace amrd {

/// An interior edge shared by `elem` (local edge `edge`) and `nb_elem`
/// (local edge `nb_edge`). `reversed` means the neighbour traverses the edge
/// in the opposite direction, which is the normal case for CCW elements.
struct InteriorEdge {
  int elem = -1;
  int edge = -1;
  int nb_elem = -1;
  int nb_edge = -1;
  bool reversed = true;
  bool periodic = false;
};

struct BoundaryFace {
  int elem = -1;
  int edge = -1;
  std::string tag;
};

struct PeriodicLink {
  std::string tag_a;
  std::string tag_b;
  Vec2 translation;
};

struct Mesh {
  ElementKind kind = ElementKind::triangle;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 4>> elements;
  std::vector<InteriorEdge> interior_edges;
  std::vector<BoundaryFace> boundary_faces;
  std::vector<PeriodicLink> periodic_links;
  /// Representative vertex after periodic identification (identity otherwise).
  std::vector<int> vertex_rep;

  int nvert() const { return vertex_count(kind); }
  std::size_t size() const { return elements.size(); }

  std::array<Vec2, 4> element_vertices(std::size_t k) const {
    std::array<Vec2, 4> x{};
    for (int i = 0; i < nvert(); ++i) x[i] = vertices[elements[k][i]];
    return x;
  }
  std::pair<int, int> edge_vertices(std::size_t k, int e) const {
    return {elements[k][e], elements[k][(e + 1) % nvert()]};
  }
  double element_area(std::size_t k) const;
  double diameter() const;
  std::vector<std::string> boundary_tags() const {
    std::vector<std::string> tags;
    for (const auto& f : boundary_faces)
      if (std::find(tags.begin(), tags.end(), f.tag) == tags.end()) tags.push_back(f.tag);
    return tags;
  }
};

inline double Mesh::element_area(std::size_t k) const {
  const auto x = element_vertices(k);
  return detail::signed_area(std::span<const Vec2>(x.data(), static_cast<std::size_t>(nvert())));
}

inline double Mesh::diameter() const {
  if (vertices.empty()) return 0.0;
  Vec2 lo = vertices.front(), hi = vertices.front();
  for (const auto& v : vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  return norm(hi - lo);
}

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Hanging-node check: no vertex of the boundary-edge set may lie strictly
// inside another boundary edge. Bucketed on a uniform grid.
inline void check_hanging_nodes(const Mesh& m, const std::vector<std::pair<int, int>>& bedges) {
  if (bedges.empty()) return;
  std::vector<int> bverts;
  for (auto [a, b] : bedges) {
    bverts.push_back(a);
    bverts.push_back(b);
  }
  std::sort(bverts.begin(), bverts.end());
  bverts.erase(std::unique(bverts.begin(), bverts.end()), bverts.end());
  Vec2 lo = m.vertices[bverts[0]], hi = lo;
  for (int v : bverts) {
    lo = {std::min(lo.x, m.vertices[v].x), std::min(lo.y, m.vertices[v].y)};
    hi = {std::max(hi.x, m.vertices[v].x), std::max(hi.y, m.vertices[v].y)};
  }
  const int nb = std::max(1, static_cast<int>(std::sqrt(double(bverts.size()))));
  const double cw = std::max((hi.x - lo.x) / nb, 1e-300);
  const double ch = std::max((hi.y - lo.y) / nb, 1e-300);
  auto cell = [&](const Vec2& p) {
    const int i = std::clamp(static_cast<int>((p.x - lo.x) / cw), 0, nb - 1);
    const int j = std::clamp(static_cast<int>((p.y - lo.y) / ch), 0, nb - 1);
    return std::pair{i, j};
  };
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(nb * nb));
  for (int v : bverts) {
    auto [i, j] = cell(m.vertices[v]);
    grid[static_cast<std::size_t>(j * nb + i)].push_back(v);
  }
  const double tol = 1e-10 * std::max(m.diameter(), 1e-300);
  for (auto [a, b] : bedges) {
    const Vec2 pa = m.vertices[a], pb = m.vertices[b];
    auto [i0, j0] = cell({std::min(pa.x, pb.x), std::min(pa.y, pb.y)});
    auto [i1, j1] = cell({std::max(pa.x, pb.x), std::max(pa.y, pb.y)});
    const Vec2 d = pb - pa;
    const double len2 = dot(d, d);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        for (int v : grid[static_cast<std::size_t>(j * nb + i)]) {
          if (v == a || v == b) continue;
          const Vec2 r = m.vertices[v] - pa;
          const double s = dot(r, d) / len2;
          if (s <= 1e-12 || s >= 1 - 1e-12) continue;
          if (std::abs(wedge(d, r)) / std::sqrt(len2) < tol)
            throw ConformalityError("vertex " + std::to_string(v) +
                                    " hangs on the interior of edge (" + std::to_string(a) + "," +
                                    std::to_string(b) + ")");
        }
  }
}

}  // namespace detail

/// Orient every element counter-clockwise, then derive interior edges and
/// boundary faces. `edge_tags` maps sorted vertex pairs to boundary tags;
/// untagged boundary edges get `default_tag`.
inline void build_connectivity(Mesh& m,
                               const std::unordered_map<std::uint64_t, std::string>& edge_tags = {},
                               const std::string& default_tag = "boundary") {
  const int nv = m.nvert();
  for (std::size_t k = 0; k < m.elements.size(); ++k) {
    const double a = m.element_area(k);
    if (!(std::abs(a) > 0.0) || !std::isfinite(a))
      throw DegenerateMesh("element " + std::to_string(k) + " has zero area");
    if (a < 0) std::reverse(m.elements[k].begin(), m.elements[k].begin() + nv);
  }
  struct Side {
    int elem;
    int edge;
  };
  std::unordered_map<std::uint64_t, std::vector<Side>> edges;
  std::vector<std::uint64_t> order;
  for (std::size_t k = 0; k < m.elements.size(); ++k)
    for (int e = 0; e < nv; ++e) {
      auto [a, b] = m.edge_vertices(k, e);
      const auto key = detail::edge_key(a, b);
      auto& sides = edges[key];
      if (sides.empty()) order.push_back(key);
      sides.push_back({static_cast<int>(k), e});
    }
  m.interior_edges.clear();
  m.boundary_faces.clear();
  std::vector<std::pair<int, int>> bedges;
  for (auto key : order) {
    const auto& sides = edges[key];
    if (sides.size() > 2)
      throw ConformalityError("edge shared by " + std::to_string(sides.size()) + " elements");
    if (sides.size() == 2) {
      InteriorEdge ie{sides[0].elem, sides[0].edge, sides[1].elem, sides[1].edge};
      ie.reversed = m.edge_vertices(sides[0].elem, sides[0].edge).first ==
                    m.edge_vertices(sides[1].elem, sides[1].edge).second;
      m.interior_edges.push_back(ie);
    } else {
      auto it = edge_tags.find(key);
      m.boundary_faces.push_back(
          {sides[0].elem, sides[0].edge, it == edge_tags.end() ? default_tag : it->second});
      bedges.push_back(m.edge_vertices(sides[0].elem, sides[0].edge));
    }
  }
  detail::check_hanging_nodes(m, bedges);
  m.vertex_rep.resize(m.vertices.size());
  std::iota(m.vertex_rep.begin(), m.vertex_rep.end(), 0);
}

// ---------------------------------------------------------------------------
// Generators

/// nx x ny grid of quadrilaterals on [x0,x1]x[y0,y1]; tags left/right/bottom/top.
inline Mesh structured_quads(int nx, int ny, double x0, double x1, double y0, double y1) {
  if (nx < 1 || ny < 1) throw ConfigError("structured mesh needs at least one cell per direction");
  Mesh m;
  m.kind = ElementKind::quadrilateral;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  std::unordered_map<std::uint64_t, std::string> tags;
  for (int i = 0; i < nx; ++i) {
    tags[detail::edge_key(id(i, 0), id(i + 1, 0))] = "bottom";
    tags[detail::edge_key(id(i, ny), id(i + 1, ny))] = "top";
  }
  for (int j = 0; j < ny; ++j) {
    tags[detail::edge_key(id(0, j), id(0, j + 1))] = "left";
    tags[detail::edge_key(id(nx, j), id(nx, j + 1))] = "right";
  }
  build_connectivity(m, tags);
  return m;
}

/// The quad grid above with every cell cut into two triangles along the
/// (i,j)-(i+1,j+1) diagonal.
inline Mesh structured_triangles(int nx, int ny, double x0, double x1, double y0, double y1) {
  Mesh q = structured_quads(nx, ny, x0, x1, y0, y1);
  Mesh m;
  m.kind = ElementKind::triangle;
  m.vertices = q.vertices;
  for (const auto& c : q.elements) {
    m.elements.push_back({c[0], c[1], c[2], -1});
    m.elements.push_back({c[0], c[2], c[3], -1});
  }
  std::unordered_map<std::uint64_t, std::string> tags;
  for (const auto& f : q.boundary_faces) {
    auto [a, b] = q.edge_vertices(f.elem, f.edge);
    tags[detail::edge_key(a, b)] = f.tag;
  }
  build_connectivity(m, tags);
  return m;
}

/// Triangulated disc: a centre node plus `rings` concentric rings of 6i
/// nodes, zipped ring to ring. Boundary tag "outer".
inline Mesh disc_mesh(double radius, int rings, Vec2 centre = {}) {
  if (rings < 1) throw ConfigError("disc mesh needs at least one ring");
  Mesh m;
  m.kind = ElementKind::triangle;
  m.vertices.push_back(centre);
  std::vector<int> start{0};
  for (int i = 1; i <= rings; ++i) {
    start.push_back(static_cast<int>(m.vertices.size()));
    const int n = 6 * i;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n;
      const double r = radius * i / rings;
      m.vertices.push_back(centre + Vec2{r * std::cos(th), r * std::sin(th)});
    }
  }
  auto push = [&m](int a, int b, int c) { m.elements.push_back({a, b, c, -1}); };
  for (int j = 0; j < 6; ++j) push(0, 1 + j, 1 + (j + 1) % 6);
  for (int i = 2; i <= rings; ++i) {
    const int nin = 6 * (i - 1), nout = 6 * i;
    int a = 0, b = 0;
    auto in = [&](int idx) { return start[i - 1] + idx % nin; };
    auto out = [&](int idx) { return start[i] + idx % nout; };
    while (a < nin || b < nout) {
      const double next_in = double(a + 1) / nin;
      const double next_out = double(b + 1) / nout;
      if (b < nout && (a >= nin || next_out <= next_in)) {
        push(in(a), out(b), out(b + 1));
        ++b;
      } else {
        push(in(a), out(b), in(a + 1));
        ++a;
      }
    }
  }
  std::unordered_map<std::uint64_t, std::string> tags;
  for (int j = 0; j < 6 * rings; ++j)
    tags[detail::edge_key(start[rings] + j, start[rings] + (j + 1) % (6 * rings))] = "outer";
  build_connectivity(m, tags);
  return m;
}

// ---------------------------------------------------------------------------
// gmsh ASCII 2.2

inline Mesh load_gmsh(std::istream& in) {
  Mesh m;
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char* what) -> std::string& {
    if (!std::getline(in, line)) throw FormatError(std::string("unexpected end of file in ") + what, lineno);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  std::map<int, std::string> physical_names;
  std::unordered_map<long, int> node_index;
  struct RawElement {
    int type;
    int physical;
    std::vector<long> nodes;
    std::size_t line;
  };
  std::vector<RawElement> raw;
  bool have_format = false, have_nodes = false, have_elements = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "$MeshFormat") {
      std::istringstream ss(next("$MeshFormat"));
      double version = 0;
      int filetype = -1;
      if (!(ss >> version >> filetype)) throw FormatError("malformed $MeshFormat header", lineno);
      if (version < 2.0 || version >= 3.0) throw FormatError("only gmsh format 2.x is supported", lineno);
      if (filetype != 0) throw FormatError("binary gmsh files are not supported", lineno);
      if (next("$MeshFormat") != "$EndMeshFormat") throw FormatError("expected $EndMeshFormat", lineno);
      have_format = true;
    } else if (line == "$PhysicalNames") {
      int n = 0;
      if (!(std::istringstream(next("$PhysicalNames")) >> n)) throw FormatError("bad count", lineno);
      for (int i = 0; i < n; ++i) {
        std::istringstream ss(next("$PhysicalNames"));
        int dim = 0, tag = 0;
        std::string name;
        if (!(ss >> dim >> tag)) throw FormatError("malformed physical name", lineno);
        std::getline(ss, name);
        const auto q0 = name.find('"'), q1 = name.rfind('"');
        if (q0 == std::string::npos || q1 == q0) throw FormatError("unquoted physical name", lineno);
        physical_names[tag] = name.substr(q0 + 1, q1 - q0 - 1);
      }
      if (next("$PhysicalNames") != "$EndPhysicalNames") throw FormatError("expected $EndPhysicalNames", lineno);
    } else if (line == "$Nodes") {
      long n = 0;
      if (!(std::istringstream(next("$Nodes")) >> n) || n < 0) throw FormatError("bad node count", lineno);
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(next("$Nodes"));
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z)) throw FormatError("malformed node record", lineno);
        node_index[id] = static_cast<int>(m.vertices.size());
        m.vertices.push_back({x, y});
      }
      if (next("$Nodes") != "$EndNodes") throw FormatError("expected $EndNodes", lineno);
      have_nodes = true;
    } else if (line == "$Elements") {
      long n = 0;
      if (!(std::istringstream(next("$Elements")) >> n) || n < 0) throw FormatError("bad element count", lineno);
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(next("$Elements"));
        long id = 0;
        int type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags)) throw FormatError("malformed element record", lineno);
        std::vector<int> tags(static_cast<std::size_t>(std::max(ntags, 0)));
        for (auto& t : tags)
          if (!(ss >> t)) throw FormatError("missing element tag", lineno);
        const int nn = type == 1 ? 2 : type == 2 ? 3 : type == 3 ? 4 : type == 15 ? 1 : -1;
        if (nn < 0) throw FormatError("unsupported gmsh element type " + std::to_string(type), lineno);
        RawElement e{type, tags.empty() ? 0 : tags[0], std::vector<long>(static_cast<std::size_t>(nn)), lineno};
        for (auto& v : e.nodes)
          if (!(ss >> v)) throw FormatError("missing element node", lineno);
        raw.push_back(std::move(e));
      }
      if (next("$Elements") != "$EndElements") throw FormatError("expected $EndElements", lineno);
      have_elements = true;
    } else if (!line.empty() && line[0] == '$' && line.rfind("$End", 0) != 0) {
      // unknown section: skip to its end marker
      const std::string end = "$End" + line.substr(1);
      while (next(line.c_str()) != end) {
      }
    }
  }
  if (!have_format || !have_nodes || !have_elements)
    throw FormatError("missing $MeshFormat, $Nodes or $Elements section", lineno);
  auto node = [&](long id, std::size_t ln) {
    auto it = node_index.find(id);
    if (it == node_index.end()) throw FormatError("element references unknown node " + std::to_string(id), ln);
    return it->second;
  };
  bool tri = false, quad = false;
  std::unordered_map<std::uint64_t, std::string> tags;
  for (const auto& e : raw) {
    if (e.type == 2 || e.type == 3) {
      (e.type == 2 ? tri : quad) = true;
      std::array<int, 4> v{-1, -1, -1, -1};
      for (std::size_t i = 0; i < e.nodes.size(); ++i) v[i] = node(e.nodes[i], e.line);
      m.elements.push_back(v);
    } else if (e.type == 1) {
      auto it = physical_names.find(e.physical);
      tags[detail::edge_key(node(e.nodes[0], e.line), node(e.nodes[1], e.line))] =
          it != physical_names.end() ? it->second : std::to_string(e.physical);
    }
  }
  if (tri && quad) throw UnsupportedElement("mixed triangle/quadrilateral meshes are not supported");
  if (!tri && !quad) throw FormatError("no 2D elements in file", lineno);
  m.kind = quad ? ElementKind::quadrilateral : ElementKind::triangle;
  build_connectivity(m, tags);
  return m;
}

inline Mesh load_gmsh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open mesh file " + path, 0);
  return load_gmsh(f);
}

// ---------------------------------------------------------------------------
// Periodicity

namespace detail {
inline int find_rep(std::vector<int>& rep, int v) {
  while (rep[v] != v) {
    rep[v] = rep[rep[v]];
    v = rep[v];
  }
  return v;
}
}  // namespace detail

/// Identify the faces tagged `tag_a` with those tagged `tag_b`, where
/// x_b = x_a + translation. Matched faces become periodic interior edges.
inline Mesh make_periodic(Mesh m, const std::string& tag_a, const std::string& tag_b, Vec2 translation) {
  const double tol = 1e-9 * std::max(m.diameter(), 1e-300);
  std::vector<std::size_t> fa, fb;
  for (std::size_t i = 0; i < m.boundary_faces.size(); ++i) {
    if (m.boundary_faces[i].tag == tag_a) fa.push_back(i);
    if (m.boundary_faces[i].tag == tag_b) fb.push_back(i);
  }
  if (fa.empty() || fa.size() != fb.size())
    throw PeriodicityMismatch("tags '" + tag_a + "' and '" + tag_b + "' have " +
                              std::to_string(fa.size()) + " and " + std::to_string(fb.size()) + " faces");
  std::vector<bool> used_b(fb.size(), false), remove(m.boundary_faces.size(), false);
  for (auto ia : fa) {
    const auto& f = m.boundary_faces[ia];
    auto [a0, a1] = m.edge_vertices(f.elem, f.edge);
    const Vec2 p0 = m.vertices[a0] + translation, p1 = m.vertices[a1] + translation;
    bool found = false;
    for (std::size_t j = 0; j < fb.size() && !found; ++j) {
      if (used_b[j]) continue;
      const auto& g = m.boundary_faces[fb[j]];
      auto [b0, b1] = m.edge_vertices(g.elem, g.edge);
      const Vec2 q0 = m.vertices[b0], q1 = m.vertices[b1];
      const bool rev = norm(p0 - q1) < tol && norm(p1 - q0) < tol;
      const bool fwd = norm(p0 - q0) < tol && norm(p1 - q1) < tol;
      if (!rev && !fwd) continue;
      found = true;
      used_b[j] = true;
      remove[ia] = remove[fb[j]] = true;
      InteriorEdge ie{f.elem, f.edge, g.elem, g.edge, rev, true};
      m.interior_edges.push_back(ie);
      auto unite = [&m](int x, int y) {
        x = detail::find_rep(m.vertex_rep, x);
        y = detail::find_rep(m.vertex_rep, y);
        if (x != y) m.vertex_rep[std::max(x, y)] = std::min(x, y);
      };
      unite(a0, rev ? b1 : b0);
      unite(a1, rev ? b0 : b1);
    }
    if (!found)
      throw PeriodicityMismatch("face of tag '" + tag_a + "' has no translated partner in '" + tag_b + "'");
  }
  for (std::size_t v = 0; v < m.vertex_rep.size(); ++v)
    m.vertex_rep[v] = detail::find_rep(m.vertex_rep, static_cast<int>(v));
  std::vector<BoundaryFace> kept;
  for (std::size_t i = 0; i < m.boundary_faces.size(); ++i)
    if (!remove[i]) kept.push_back(m.boundary_faces[i]);
  m.boundary_faces = std::move(kept);
  m.periodic_links.push_back({tag_a, tag_b, translation});
  return m;
}

// ---------------------------------------------------------------------------
// DOF numbering

/// Continuous DOF numbering. Local order per element follows the basis
/// table: vertex DOFs, then (B2 triangles) edge DOFs for vertex pairs
/// (0,1), (0,2), (1,2).
struct DofMap {
  int degree = 1;
  int nloc = 3;
  std::size_t ndofs = 0;
  std::vector<int> elem_dofs;       // nloc entries per element
  std::vector<Vec2> dof_position;   // Greville point, first element seen

  std::span<const int> dofs(std::size_t k) const {
    return {elem_dofs.data() + k * static_cast<std::size_t>(nloc), static_cast<std::size_t>(nloc)};
  }
};

inline constexpr std::array<std::array<int, 2>, 3> kTriangleEdgeDofVertices{{{0, 1}, {0, 2}, {1, 2}}};

inline DofMap build_dofmap(const Mesh& m, int degree) {
  if (degree < 1 || degree > 2) throw UnsupportedElement("basis degree must be 1 or 2");
  if (degree == 2 && m.kind != ElementKind::triangle)
    throw UnsupportedElement("degree 2 is only available on triangle meshes");
  DofMap d;
  d.degree = degree;
  const int nv = m.nvert();
  d.nloc = degree == 1 ? nv : 6;
  std::vector<int> vdof(m.vertices.size(), -1);
  std::vector<char> used(m.vertices.size(), 0);
  for (const auto& e : m.elements)
    for (int i = 0; i < nv; ++i) used[static_cast<std::size_t>(m.vertex_rep[e[i]])] = 1;
  int next = 0;
  for (std::size_t v = 0; v < used.size(); ++v)
    if (used[v]) vdof[v] = next++;
  std::unordered_map<std::uint64_t, int> edof;
  d.elem_dofs.reserve(m.elements.size() * static_cast<std::size_t>(d.nloc));
  d.dof_position.assign(static_cast<std::size_t>(next), Vec2{});
  std::vector<char> placed(static_cast<std::size_t>(next), 0);
  for (std::size_t k = 0; k < m.elements.size(); ++k) {
    const auto& e = m.elements[k];
    for (int i = 0; i < nv; ++i) {
      const int g = vdof[static_cast<std::size_t>(m.vertex_rep[e[i]])];
      d.elem_dofs.push_back(g);
      if (!placed[static_cast<std::size_t>(g)]) {
        d.dof_position[static_cast<std::size_t>(g)] = m.vertices[e[i]];
        placed[static_cast<std::size_t>(g)] = 1;
      }
    }
    if (degree == 2) {
      for (const auto& pr : kTriangleEdgeDofVertices) {
        const int a = m.vertex_rep[e[pr[0]]], b = m.vertex_rep[e[pr[1]]];
        const auto key = detail::edge_key(a, b);
        auto [it, inserted] = edof.try_emplace(key, next);
        if (inserted) {
          ++next;
          d.dof_position.push_back(0.5 * (m.vertices[e[pr[0]]] + m.vertices[e[pr[1]]]));
        }
        d.elem_dofs.push_back(it->second);
      }
    }
  }
  d.ndofs = static_cast<std::size_t>(next);
  return d;
}

}  // namespace amrd
