#pragma once

// Zero level sets, nodal domains and the shape of the nodal line of
// eigenfunctions reconstructed on the full (reflected) domain.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nodalab/eigensolve.hpp"
#include "nodalab/errors.hpp"
#include "nodalab/fem.hpp"
#include "nodalab/mesh.hpp"

namespace nodalab {

inline constexpr double kZeroSnap = 1e-12;

struct FullField {
  Mesh mesh;  // reflected four-fold
  Eigen::VectorXd values;
  Sector sector;
  double eigenvalue = 0.0;
};

inline FullField reconstruct_full(const ReflectedMesh& full, const Mesh& quarter, const EigenResult& res,
                                  std::size_t index) {
  if (index >= res.size()) {
    throw std::out_of_range("eigenpair index " + std::to_string(index) + " out of range (" +
                            std::to_string(res.size()) + " computed)");
  }
  const Eigen::VectorXd q = vertex_values(res, index, quarter.num_vertices());
  FullField f;
  f.mesh = full.mesh;
  f.sector = res.sector;
  f.eigenvalue = res.values[index];
  const int p1 = parity_sign(res.sector.parity_x1);
  const int p2 = parity_sign(res.sector.parity_x2);
  f.values.resize(static_cast<Eigen::Index>(full.mesh.num_vertices()));
  for (std::size_t v = 0; v < full.mesh.num_vertices(); ++v) {
    double s = 1.0;
    if (full.sign_x1[v] < 0 && p1 < 0) s = -s;
    if (full.sign_x2[v] < 0 && p2 < 0) s = -s;
    const Point p = full.mesh.vertices[v];
    double val = s * q(full.source[v]);
    if ((p1 < 0 && p.x1 == 0.0) || (p2 < 0 && p.x2 == 0.0)) val = 0.0;
    f.values(static_cast<Eigen::Index>(v)) = val;
  }
  return f;
}

inline FullField reconstruct_full(const Mesh& quarter, const EigenResult& res, std::size_t index) {
  return reconstruct_full(reflect_mesh(quarter), quarter, res, index);
}

struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

namespace detail {

inline std::vector<int> snapped_signs(const Eigen::VectorXd& v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  if (!(vmax > 0.0)) throw NodalError("field is identically zero (not an eigenfunction)");
  std::vector<int> s(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = v(i);
    s[static_cast<std::size_t>(i)] = std::abs(x) <= kZeroSnap * vmax ? 0 : (x > 0.0 ? 1 : -1);
  }
  return s;
}

/// Edge -> adjacent triangles (one or two).
inline std::map<std::pair<int, int>, std::vector<int>> edge_triangles(const Mesh& m) {
  std::map<std::pair<int, int>, std::vector<int>> e2t;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int i = 0; i < 3; ++i) e2t[edge_key(tri[i], tri[(i + 1) % 3])].push_back(static_cast<int>(t));
  }
  return e2t;
}

inline int third_vertex(const Triangle& t, std::pair<int, int> e) {
  for (int v : t) {
    if (v != e.first && v != e.second) return v;
  }
  return -1;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// Zero level set of the piecewise-linear field, chained into polylines.
///
/// Values below 1e-12 of the maximum count as zero. A zero edge is nodal when
/// it is interior and the field changes sign across it. For anti parity the
/// whole symmetry axis is nodal by construction, even where the field's
/// magnitude has underflowed the snap threshold on both sides.
inline std::vector<Polyline> extract_zero_set(const FullField& f) {
  const Mesh& m = f.mesh;
  const auto sg = detail::snapped_signs(f.values);

  std::vector<Point> nodes;
  std::map<std::pair<int, int>, int> node_id;  // (v,v) for vertices, (i,j) i<j for edge crossings
  auto vertex_node = [&](int v) {
    auto [it, fresh] = node_id.try_emplace({v, v}, static_cast<int>(nodes.size()));
    if (fresh) nodes.push_back(m.vertices[v]);
    return it->second;
  };
  auto crossing_node = [&](int i, int j) {
    const auto key = edge_key(i, j);
    auto [it, fresh] = node_id.try_emplace(key, static_cast<int>(nodes.size()));
    if (fresh) {
      const double fi = f.values(key.first), fj = f.values(key.second);
      const double t = fi / (fi - fj);
      const Point a = m.vertices[key.first], b = m.vertices[key.second];
      nodes.push_back(a + t * (b - a));
    }
    return it->second;
  };

  std::set<std::pair<int, int>> segments;
  auto add = [&](int p, int q) {
    if (p != q) segments.insert({std::min(p, q), std::max(p, q)});
  };

  for (const auto& tri : m.triangles) {
    int pos = 0, neg = 0, zero = 0;
    for (int v : tri) {
      pos += sg[v] > 0;
      neg += sg[v] < 0;
      zero += sg[v] == 0;
    }
    if (pos == 0 || neg == 0) continue;
    if (zero == 1) {
      int z = 0;
      while (sg[tri[z]] != 0) ++z;
      add(vertex_node(tri[z]), crossing_node(tri[(z + 1) % 3], tri[(z + 2) % 3]));
    } else {
      std::vector<int> ends;
      for (int i = 0; i < 3; ++i) {
        const int a = tri[i], b = tri[(i + 1) % 3];
        if (sg[a] * sg[b] < 0) ends.push_back(crossing_node(a, b));
      }
      add(ends[0], ends[1]);
    }
  }

  const bool axis_r = f.sector.parity_x1 == Parity::anti;
  const bool axis_perp = f.sector.parity_x2 == Parity::anti;
  for (const auto& [e, ts] : detail::edge_triangles(m)) {
    if (ts.size() != 2 || sg[e.first] != 0 || sg[e.second] != 0) continue;
    const Point a = m.vertices[e.first], b = m.vertices[e.second];
    const bool structural =
        (axis_r && a.x1 == 0.0 && b.x1 == 0.0) || (axis_perp && a.x2 == 0.0 && b.x2 == 0.0);
    const int s0 = sg[detail::third_vertex(m.triangles[ts[0]], e)];
    const int s1 = sg[detail::third_vertex(m.triangles[ts[1]], e)];
    if (structural || s0 * s1 < 0) add(vertex_node(e.first), vertex_node(e.second));
  }

  // Chain segments; walks start at endpoints and junctions, leftovers are loops.
  std::vector<std::vector<std::pair<int, int>>> adj(nodes.size());  // (neighbor, segment index)
  int sid = 0;
  for (const auto& [p, q] : segments) {
    adj[p].push_back({q, sid});
    adj[q].push_back({p, sid});
    ++sid;
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](int start, std::size_t first_slot) {
    Polyline pl;
    pl.points.push_back(nodes[start]);
    int cur = start;
    auto [next, s] = adj[start][first_slot];
    while (true) {
      used[s] = true;
      pl.points.push_back(nodes[next]);
      cur = next;
      if (cur == start) {
        pl.closed = true;
        break;
      }
      if (adj[cur].size() != 2) break;
      const auto& o = adj[cur][0].second == s ? adj[cur][1] : adj[cur][0];
      if (used[o.second]) break;
      next = o.first;
      s = o.second;
    }
    out.push_back(std::move(pl));
  };
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
    if (adj[n].size() == 2) continue;
    for (std::size_t k = 0; k < adj[n].size(); ++k) {
      if (!used[adj[n][k].second]) walk(n, k);
    }
  }
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
    for (std::size_t k = 0; k < adj[n].size(); ++k) {
      if (!used[adj[n][k].second]) walk(n, k);
    }
  }
  return out;
}

/// Connected components of {u > 0} and {u < 0} over edge-adjacent triangles.
/// A triangle takes the common sign of its nonzero vertices; mixed or
/// all-zero triangles belong to no component.
inline int count_nodal_domains(const FullField& f) {
  const Mesh& m = f.mesh;
  const auto sg = detail::snapped_signs(f.values);
  std::vector<int> tsign(m.num_triangles(), 0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    bool pos = false, neg = false;
    for (int v : m.triangles[t]) {
      pos |= sg[v] > 0;
      neg |= sg[v] < 0;
    }
    tsign[t] = pos && !neg ? 1 : (neg && !pos ? -1 : 0);
  }
  detail::UnionFind uf(m.num_triangles());
  for (const auto& [e, ts] : detail::edge_triangles(m)) {
    if (ts.size() == 2 && tsign[ts[0]] != 0 && tsign[ts[0]] == tsign[ts[1]]) uf.unite(ts[0], ts[1]);
  }
  int count = 0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    if (tsign[t] != 0 && uf.find(static_cast<int>(t)) == static_cast<int>(t)) ++count;
  }
  return count;
}

enum class NodalClass { axis_r, segment_r_perp, closed_loop, other };

inline std::string_view to_string(NodalClass c) {
  switch (c) {
    case NodalClass::axis_r: return "axis_r";
    case NodalClass::segment_r_perp: return "segment_r_perp";
    case NodalClass::closed_loop: return "closed_loop";
    case NodalClass::other: return "other";
  }
  return "?";
}

/// Geometric tolerance for nodal decisions on a mesh with longest edge h_max.
inline double geometric_tolerance(double h_max) { return std::max(1e-9, 0.1 * h_max); }

struct Classification {
  NodalClass cls = NodalClass::other;
  double min_dist = std::numeric_limits<double>::infinity();
  bool touches_boundary = false;
};

/// Distance from p to the physical (non-cut) part of the boundary.
inline double distance_to_physical_boundary(Point p, const FullBoundary& boundary) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < boundary.size(); ++e) {
    if (boundary.edge_tags[e] != EdgeTag::physical) continue;
    d = std::min(d, point_segment_distance(p, boundary.edge_start(e), boundary.edge_end(e)));
  }
  return d;
}

/// Trichotomy class of a nodal set plus its distance to the physical boundary.
/// Contact means an actual meeting point (distance at rounding level), so a
/// nodal line that merely comes closer than the mesh size in a narrowing tube
/// does not count as touching.
inline Classification classify_and_measure(const std::vector<Polyline>& segments, const FullBoundary& boundary,
                                           double tol_geo) {
  if (segments.empty()) throw NodalError("empty nodal set cannot be classified");
  double extent = 1.0;
  for (const Point& p : boundary.vertices) extent = std::max({extent, std::abs(p.x1), std::abs(p.x2)});
  const double contact = 1e-9 * extent;

  Classification c;
  bool on_r = true, on_perp = true, ends_on_boundary = true, loop_clear = false;
  for (const auto& pl : segments) {
    double local_min = std::numeric_limits<double>::infinity();
    for (const Point& p : pl.points) {
      on_r &= std::abs(p.x1) <= tol_geo;
      on_perp &= std::abs(p.x2) <= tol_geo;
      local_min = std::min(local_min, distance_to_physical_boundary(p, boundary));
    }
    c.min_dist = std::min(c.min_dist, local_min);
    if (pl.closed) {
      loop_clear |= local_min >= tol_geo;
    } else {
      ends_on_boundary &= distance_to_physical_boundary(pl.points.front(), boundary) <= tol_geo &&
                          distance_to_physical_boundary(pl.points.back(), boundary) <= tol_geo;
    }
  }
  c.touches_boundary = c.min_dist <= contact;
  if (on_r) {
    c.cls = NodalClass::axis_r;
  } else if (on_perp && ends_on_boundary) {
    c.cls = NodalClass::segment_r_perp;
  } else if (loop_clear) {
    c.cls = NodalClass::closed_loop;
  } else {
    c.cls = NodalClass::other;
  }
  return c;
}

struct NodalReport {
  std::vector<Polyline> segments;
  int n_nodal_domains = 0;
  std::optional<NodalClass> classification;  // empty when there is no nodal set
  double min_dist_to_boundary = std::numeric_limits<double>::infinity();
  bool touches_boundary = false;
  double tol_geo = 0.0;
};

inline NodalReport analyze(const FullField& f) {
  NodalReport r;
  r.tol_geo = geometric_tolerance(longest_edge(f.mesh));
  r.segments = extract_zero_set(f);
  r.n_nodal_domains = count_nodal_domains(f);
  if (!r.segments.empty()) {
    const auto c = classify_and_measure(r.segments, mesh_boundary(f.mesh), r.tol_geo);
    r.classification = c.cls;
    r.min_dist_to_boundary = c.min_dist;
    r.touches_boundary = c.touches_boundary;
  }
  return r;
}

/// CSV with header "segment_id,x1,x2", one row per polyline vertex.
inline void write_nodal_csv(std::ostream& os, const std::vector<Polyline>& segments) {
  os << "segment_id,x1,x2\n";
  char buf[96];
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (const Point& p : segments[s].points) {
      std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", s, p.x1, p.x2);
      os << buf;
    }
  }
}

}  // namespace nodalab
