#pragma once

// Block-structured P1 triangulation of the quarter domain: a tensor grid on
// the core rectangle (0,a)x(0,b) and a mapped grid on the tube
// {0 < x1 < eps*h(x2-b), b < x2 < b+L}, sharing nodes on the junction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nodalab/errors.hpp"
#include "nodalab/geometry.hpp"

namespace nodalab {

using Triangle = std::array<int, 3>;

struct BoundaryEdge {
  std::array<int, 2> v{};
  EdgeTag tag = EdgeTag::physical;
};

struct Mesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  double h_max = 0.0;
  int tube_layers = 0;                // 0 when the mesh has no tube
  std::optional<DomainSpec> domain;   // exact geometry, used to project wall midpoints

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
};

inline double triangle_signed_area(Point p0, Point p1, Point p2) {
  return 0.5 * cross(p1 - p0, p2 - p0);
}

inline double triangle_area(const Mesh& m, std::size_t t) {
  const auto& tri = m.triangles[t];
  return triangle_signed_area(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]);
}

inline double total_area(const Mesh& m) {
  double sum = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) sum += triangle_area(m, t);
  return sum;
}

inline std::pair<int, int> edge_key(int i, int j) { return i < j ? std::pair{i, j} : std::pair{j, i}; }

inline double longest_edge(const Mesh& m) {
  double h = 0.0;
  for (const auto& tri : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      h = std::max(h, distance(m.vertices[tri[e]], m.vertices[tri[(e + 1) % 3]]));
    }
  }
  return h;
}

/// Number of distinct undirected edges.
inline std::size_t count_edges(const Mesh& m) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& tri : m.triangles) {
    for (int e = 0; e < 3; ++e) edges[edge_key(tri[e], tri[(e + 1) % 3])] += 1;
  }
  return edges.size();
}

namespace detail {

/// Grid points from `start` to `start + length`: spacings begin at
/// `first` * growth, grow geometrically by `growth`, saturate at `cap`, and
/// are then uniformly rescaled so the last point lands exactly on the end.
inline std::vector<double> graded_offsets(double length, double first, double cap, double growth = 1.3) {
  std::vector<double> steps;
  double sum = 0.0;
  double d = first;
  while (sum < length * (1.0 - 1e-12)) {
    d = std::min(d * growth, cap);
    steps.push_back(d);
    sum += d;
  }
  // Dropping the final step is preferable when it leaves a smaller stretch
  // and the stretched steps still respect the cap.
  if (steps.size() > 1) {
    const double without = sum - steps.back();
    const double stretch = length / without;
    const double max_step = *std::max_element(steps.begin(), steps.end() - 1) * stretch;
    if (stretch - 1.0 < 1.0 - length / sum && max_step <= cap * (1.0 + 1e-12)) {
      steps.pop_back();
      sum = without;
    }
  }
  const double scale = length / sum;
  std::vector<double> offsets{0.0};
  double acc = 0.0;
  for (double s : steps) {
    acc += s * scale;
    offsets.push_back(acc);
  }
  offsets.back() = length;
  return offsets;
}

inline std::vector<double> uniform_offsets(double length, int cells) {
  std::vector<double> out(cells + 1);
  for (int i = 0; i <= cells; ++i) out[i] = length * i / cells;
  out.back() = length;
  return out;
}

/// Splits the cell (v00, v10, v01, v11) along the v10-v01 diagonal; for the
/// narrowing tube this keeps every angle at most 90 degrees.
inline void split_cell(std::vector<Triangle>& tris, int v00, int v10, int v01, int v11) {
  tris.push_back({v00, v10, v01});
  tris.push_back({v10, v11, v01});
}

}  // namespace detail

struct MeshOptions {
  double target_h = 0.05;
  int tube_layers = 4;
};

/// Quarter rectangle (0,a)x(0,b) alone: physical edges at x1=a and x2=b.
inline Mesh generate_rectangle_mesh(double a, double b, double target_h) {
  if (!(a > 0.0 && b > 0.0)) throw MeshError("rectangle sides must be positive");
  if (!(target_h > 0.0)) throw MeshError("target_h must be positive");
  const int nx = std::max(2, static_cast<int>(std::ceil(a / target_h - 1e-9)));
  const int ny = std::max(2, static_cast<int>(std::ceil(b / target_h - 1e-9)));
  const auto xs = detail::uniform_offsets(a, nx);
  const auto ys = detail::uniform_offsets(b, ny);

  Mesh m;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) m.vertices.push_back({xs[i], ys[j]});
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      detail::split_cell(m.triangles, id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
    }
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({{id(i, 0), id(i + 1, 0)}, EdgeTag::sym_x2});
    m.boundary_edges.push_back({{id(i + 1, ny), id(i, ny)}, EdgeTag::physical});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary_edges.push_back({{id(nx, j), id(nx, j + 1)}, EdgeTag::physical});
    m.boundary_edges.push_back({{id(0, j + 1), id(0, j)}, EdgeTag::sym_x1});
  }
  m.h_max = longest_edge(m);
  return m;
}

/// Core block plus tube block. The core x1-grid is uniform on [0, eps] with
/// max(tube_layers, ceil(eps/target_h)) cells (matching the tube's
/// transverse nodes) and geometrically graded (ratio <= 1.3) up to a; the
/// core x2-grid is graded the same way toward the junction x2 = b. The tube
/// x2-grid is uniform with spacing <= min(target_h, 10 eps).
inline Mesh generate_mesh(const QuarterBoundary& q, double target_h, int tube_layers = 4) {
  const DomainSpec& s = q.domain;
  validate(s);
  if (!(target_h > 0.0)) throw MeshError("target_h must be positive");
  if (tube_layers < 4) {
    throw MeshError("tube_layers must be at least 4 (got " + std::to_string(tube_layers) + ")");
  }
  if (target_h > 0.5 * s.b) {
    throw MeshError("target_h = " + std::to_string(target_h) +
                    " is too coarse: the core needs at least two cells across b = " + std::to_string(s.b));
  }
  const double w0 = tube_half_width(s, s.b);
  const int nt = std::max(tube_layers, static_cast<int>(std::ceil(w0 / target_h - 1e-9)));
  const double d0 = w0 / nt;
  if (s.a - w0 < d0) {
    throw MeshError("tube of half-width " + std::to_string(w0) + " leaves less than one cell of core");
  }

  std::vector<double> xs = detail::uniform_offsets(w0, nt);
  for (double off : detail::graded_offsets(s.a - w0, d0, target_h)) {
    if (off > 0.0) xs.push_back(w0 + off);
  }
  xs.back() = s.a;
  std::vector<double> ys;
  {
    const auto down = detail::graded_offsets(s.b, std::min(d0, target_h) / 1.3, target_h);
    for (auto it = down.rbegin(); it != down.rend(); ++it) ys.push_back(s.b - *it);
    ys.front() = 0.0;
    ys.back() = s.b;
  }
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;

  const double tube_step = std::min(target_h, 10.0 * s.eps);
  const int nl = std::max(1, static_cast<int>(std::ceil(s.L / tube_step - 1e-9)));

  Mesh m;
  m.tube_layers = tube_layers;
  m.domain = s;
  auto core = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) m.vertices.push_back({xs[i], ys[j]});
  }
  const int tube_base = static_cast<int>(m.vertices.size());
  // Tube rows r = 1..nl; row 0 is the core's top row.
  auto tube = [&](int c, int r) { return r == 0 ? core(c, ny) : tube_base + (r - 1) * (nt + 1) + c; };
  for (int r = 1; r <= nl; ++r) {
    const double x2 = r == nl ? s.cut_height() : s.b + s.L * r / nl;
    const double width = tube_half_width(s, x2);
    for (int c = 0; c <= nt; ++c) {
      const double x1 = c == 0 ? 0.0 : (c == nt ? width : width * c / nt);
      m.vertices.push_back({x1, x2});
    }
  }

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      detail::split_cell(m.triangles, core(i, j), core(i + 1, j), core(i, j + 1), core(i + 1, j + 1));
    }
  }
  for (int r = 0; r < nl; ++r) {
    for (int c = 0; c < nt; ++c) {
      detail::split_cell(m.triangles, tube(c, r), tube(c + 1, r), tube(c, r + 1), tube(c + 1, r + 1));
    }
  }

  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({{core(i, 0), core(i + 1, 0)}, EdgeTag::sym_x2});
    if (i >= nt) m.boundary_edges.push_back({{core(i + 1, ny), core(i, ny)}, EdgeTag::physical});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary_edges.push_back({{core(nx, j), core(nx, j + 1)}, EdgeTag::physical});
    m.boundary_edges.push_back({{core(0, j + 1), core(0, j)}, EdgeTag::sym_x1});
  }
  for (int r = 0; r < nl; ++r) {
    m.boundary_edges.push_back({{tube(nt, r), tube(nt, r + 1)}, EdgeTag::physical});
    m.boundary_edges.push_back({{tube(0, r + 1), tube(0, r)}, EdgeTag::sym_x1});
  }
  for (int c = 0; c < nt; ++c) {
    m.boundary_edges.push_back({{tube(c + 1, nl), tube(c, nl)}, EdgeTag::cut});
  }
  m.h_max = longest_edge(m);
  return m;
}

inline Mesh generate_mesh(const DomainSpec& spec, const MeshOptions& opt) {
  return generate_mesh(quarter_boundary(spec), opt.target_h, opt.tube_layers);
}

/// True for physical boundary edges on the curved tube wall.
inline bool is_wall_edge(const DomainSpec& s, Point p, Point q) {
  return std::min(p.x2, q.x2) >= s.b && std::max(p.x2, q.x2) > s.b;
}

/// Regular 1->4 refinement by edge midpoints. Midpoints of tube-wall edges
/// are moved onto the exact wall x1 = eps*h(x2-b).
inline Mesh refine(const Mesh& m) {
  Mesh out;
  out.vertices = m.vertices;
  out.tube_layers = m.tube_layers;
  out.domain = m.domain;

  std::map<std::pair<int, int>, EdgeTag> boundary_tag;
  for (const auto& be : m.boundary_edges) boundary_tag[edge_key(be.v[0], be.v[1])] = be.tag;

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int i, int j) {
    const auto key = edge_key(i, j);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const Point p = m.vertices[i];
    const Point q = m.vertices[j];
    Point c{0.5 * (p.x1 + q.x1), 0.5 * (p.x2 + q.x2)};
    if (m.domain) {
      auto bt = boundary_tag.find(key);
      if (bt != boundary_tag.end() && bt->second == EdgeTag::physical && is_wall_edge(*m.domain, p, q)) {
        c.x1 = tube_half_width(*m.domain, c.x2);
      }
    }
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(c);
    midpoint.emplace(key, id);
    return id;
  };

  out.triangles.reserve(4 * m.triangles.size());
  for (const auto& t : m.triangles) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({m01, t[1], m12});
    out.triangles.push_back({m20, m12, t[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  for (const auto& be : m.boundary_edges) {
    const int c = mid(be.v[0], be.v[1]);
    out.boundary_edges.push_back({{be.v[0], c}, be.tag});
    out.boundary_edges.push_back({{c, be.v[1]}, be.tag});
  }
  out.h_max = longest_edge(out);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { bad_index, negative_area, nonconforming_edge, symmetry_vertex_off_axis, thin_tube };

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::bad_index: return "bad_index";
    case ViolationKind::negative_area: return "negative_area";
    case ViolationKind::nonconforming_edge: return "nonconforming_edge";
    case ViolationKind::symmetry_vertex_off_axis: return "symmetry_vertex_off_axis";
    case ViolationKind::thin_tube: return "thin_tube";
  }
  return "unknown";
}

struct MeshViolation {
  ViolationKind kind;
  long index = -1;  // triangle, vertex or boundary-edge index depending on kind
  std::string detail;
};

inline std::vector<MeshViolation> validate(const Mesh& m) {
  std::vector<MeshViolation> out;
  const long nv = static_cast<long>(m.vertices.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    for (int v : m.triangles[t]) {
      if (v < 0 || v >= nv) {
        out.push_back({ViolationKind::bad_index, static_cast<long>(t), "triangle vertex out of range"});
      }
    }
  }
  for (std::size_t e = 0; e < m.boundary_edges.size(); ++e) {
    for (int v : m.boundary_edges[e].v) {
      if (v < 0 || v >= nv) {
        out.push_back({ViolationKind::bad_index, static_cast<long>(e), "boundary edge vertex out of range"});
      }
    }
  }
  if (!out.empty()) return out;

  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const double area = triangle_area(m, t);
    if (!(area > 0.0)) {
      out.push_back({ViolationKind::negative_area, static_cast<long>(t), "signed area " + std::to_string(area)});
    }
  }

  std::map<std::pair<int, int>, int> uses;
  for (const auto& tri : m.triangles) {
    for (int e = 0; e < 3; ++e) uses[edge_key(tri[e], tri[(e + 1) % 3])] += 1;
  }
  std::map<std::pair<int, int>, int> listed;
  for (std::size_t e = 0; e < m.boundary_edges.size(); ++e) {
    const auto key = edge_key(m.boundary_edges[e].v[0], m.boundary_edges[e].v[1]);
    listed[key] += 1;
    auto it = uses.find(key);
    if (it == uses.end() || it->second != 1) {
      out.push_back({ViolationKind::nonconforming_edge, static_cast<long>(e),
                     "boundary edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                         ") is used by " + std::to_string(it == uses.end() ? 0 : it->second) + " triangles"});
    }
  }
  for (const auto& [key, count] : uses) {
    const bool is_listed = listed.count(key) > 0;
    if (count > 2 || (count == 1 && !is_listed) || (count == 2 && is_listed)) {
      out.push_back({ViolationKind::nonconforming_edge, -1,
                     "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") shared by " +
                         std::to_string(count) + " triangles" + (is_listed ? " but tagged boundary" : "")});
    }
  }

  for (std::size_t e = 0; e < m.boundary_edges.size(); ++e) {
    const auto& be = m.boundary_edges[e];
    for (int v : be.v) {
      const Point p = m.vertices[v];
      if ((be.tag == EdgeTag::sym_x1 && p.x1 != 0.0) || (be.tag == EdgeTag::sym_x2 && p.x2 != 0.0)) {
        out.push_back({ViolationKind::symmetry_vertex_off_axis, v, "vertex of a symmetry edge is off its axis"});
      }
    }
  }

  if (m.domain && m.tube_layers > 0) {
    std::map<double, int> per_level;
    for (const auto& p : m.vertices) {
      if (p.x2 > m.domain->b) per_level[p.x2] += 1;
    }
    for (const auto& [x2, count] : per_level) {
      if (count < m.tube_layers + 1) {
        out.push_back({ViolationKind::thin_tube, -1,
                       "only " + std::to_string(count - 1) + " layers across the tube at x2 = " + std::to_string(x2)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Four-fold reflection

/// Full-domain mesh with provenance: full vertex i is the image of quarter
/// vertex source[i] under x1 -> sign_x1[i]*x1, x2 -> sign_x2[i]*x2. Vertices
/// on an axis are shared and carry sign +1 for that axis.
struct ReflectedMesh {
  Mesh mesh;
  std::vector<int> source;
  std::vector<signed char> sign_x1;
  std::vector<signed char> sign_x2;
};

inline ReflectedMesh reflect_mesh(const Mesh& quarter) {
  ReflectedMesh out;
  const std::size_t nv = quarter.num_vertices();
  constexpr std::array<std::array<int, 2>, 4> quadrants{{{1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};
  std::array<std::vector<int>, 4> map;
  auto quadrant_index = [&](int s1, int s2) {
    for (int q = 0; q < 4; ++q) {
      if (quadrants[q][0] == s1 && quadrants[q][1] == s2) return q;
    }
    return 0;
  };
  for (int q = 0; q < 4; ++q) {
    const int s1 = quadrants[q][0];
    const int s2 = quadrants[q][1];
    map[q].resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      const Point p = quarter.vertices[v];
      const bool on_x1_axis = p.x1 == 0.0;
      const bool on_x2_axis = p.x2 == 0.0;
      if (s1 < 0 && on_x1_axis) {
        map[q][v] = map[quadrant_index(1, s2)][v];
      } else if (s2 < 0 && on_x2_axis) {
        map[q][v] = map[quadrant_index(s1, 1)][v];
      } else {
        map[q][v] = static_cast<int>(out.mesh.vertices.size());
        out.mesh.vertices.push_back({s1 * p.x1, s2 * p.x2});
        out.source.push_back(static_cast<int>(v));
        out.sign_x1.push_back(static_cast<signed char>(on_x1_axis ? 1 : s1));
        out.sign_x2.push_back(static_cast<signed char>(on_x2_axis ? 1 : s2));
      }
    }
    const bool flips = s1 * s2 < 0;
    for (const auto& t : quarter.triangles) {
      Triangle img{map[q][t[0]], map[q][t[1]], map[q][t[2]]};
      if (flips) std::swap(img[1], img[2]);
      out.mesh.triangles.push_back(img);
    }
    for (const auto& be : quarter.boundary_edges) {
      if (be.tag == EdgeTag::sym_x1 || be.tag == EdgeTag::sym_x2) continue;
      BoundaryEdge img{{map[q][be.v[0]], map[q][be.v[1]]}, be.tag};
      if (flips) std::swap(img.v[0], img.v[1]);
      out.mesh.boundary_edges.push_back(img);
    }
  }
  out.mesh.h_max = quarter.h_max;
  return out;
}

/// Chains the boundary edges of a simply connected mesh into one closed
/// tagged polygon.
inline FullBoundary mesh_boundary(const Mesh& m) {
  FullBoundary out;
  if (m.boundary_edges.empty()) return out;
  std::map<int, std::vector<std::size_t>> incident;
  for (std::size_t e = 0; e < m.boundary_edges.size(); ++e) {
    incident[m.boundary_edges[e].v[0]].push_back(e);
    incident[m.boundary_edges[e].v[1]].push_back(e);
  }
  std::vector<bool> used(m.boundary_edges.size(), false);
  std::size_t e = 0;
  int v = m.boundary_edges[0].v[0];
  for (std::size_t step = 0; step < m.boundary_edges.size(); ++step) {
    used[e] = true;
    const auto& be = m.boundary_edges[e];
    out.vertices.push_back(m.vertices[v]);
    out.edge_tags.push_back(be.tag);
    v = be.v[0] == v ? be.v[1] : be.v[0];
    std::size_t next = e;
    for (std::size_t cand : incident[v]) {
      if (!used[cand]) next = cand;
    }
    if (next == e) break;
    e = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plain-text mesh format: "V T B", V lines "x1 x2", T lines "i j k",
// B lines "i j tag".

inline void write_mesh(std::ostream& os, const Mesh& m) {
  os << m.vertices.size() << ' ' << m.triangles.size() << ' ' << m.boundary_edges.size() << '\n';
  char buf[64];
  for (const auto& p : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x1, p.x2);
    os << buf;
  }
  for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& be : m.boundary_edges) os << be.v[0] << ' ' << be.v[1] << ' ' << to_string(be.tag) << '\n';
}

inline Mesh read_mesh(std::istream& is) {
  Mesh m;
  std::size_t nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb)) throw MeshError("mesh header must be 'V T B'");
  m.vertices.resize(nv);
  for (auto& p : m.vertices) {
    if (!(is >> p.x1 >> p.x2)) throw MeshError("truncated vertex section");
  }
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    if (!(is >> t[0] >> t[1] >> t[2])) throw MeshError("truncated triangle section");
  }
  m.boundary_edges.resize(nb);
  for (auto& be : m.boundary_edges) {
    std::string tag;
    if (!(is >> be.v[0] >> be.v[1] >> tag)) throw MeshError("truncated boundary section");
    try {
      be.tag = edge_tag_from_string(tag);
    } catch (const std::invalid_argument& e) {
      throw MeshError(e.what());
    }
  }
  m.h_max = longest_edge(m);
  return m;
}

}  // namespace nodalab
