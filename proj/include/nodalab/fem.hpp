#pragma once

#include <array>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nodalab/errors.hpp"
#include "nodalab/mesh.hpp"

namespace nodalab {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Parity { sym, anti };
enum class CutBC { dirichlet, neumann };

inline std::string_view to_string(Parity p) { return p == Parity::sym ? "sym" : "anti"; }
inline std::string_view to_string(CutBC c) { return c == CutBC::dirichlet ? "dirichlet" : "neumann"; }

inline int parity_sign(Parity p) { return p == Parity::sym ? 1 : -1; }

/// Symmetry sector: parity under x1 -> -x1 and x2 -> -x2, plus the artificial
/// condition on the truncation cut. Anti parity on an axis means a Dirichlet
/// condition on that symmetry edge; sym parity leaves it natural.
struct Sector {
  Parity parity_x1 = Parity::sym;
  Parity parity_x2 = Parity::sym;
  CutBC cut_bc = CutBC::dirichlet;

  friend bool operator==(const Sector&, const Sector&) = default;

  Sector with_cut(CutBC bc) const { return {parity_x1, parity_x2, bc}; }
  bool same_parities(const Sector& o) const { return parity_x1 == o.parity_x1 && parity_x2 == o.parity_x2; }
};

inline std::string label(const Sector& s) {
  return "(" + std::string(to_string(s.parity_x1)) + "," + std::string(to_string(s.parity_x2)) + ")";
}

/// The four parity classes in canonical order.
inline constexpr std::array<Sector, 4> kParitySectors{{
    {Parity::sym, Parity::sym, CutBC::dirichlet},
    {Parity::anti, Parity::sym, CutBC::dirichlet},
    {Parity::sym, Parity::anti, CutBC::dirichlet},
    {Parity::anti, Parity::anti, CutBC::dirichlet},
}};

// ---------------------------------------------------------------------------
// Element matrices

/// Exact P1 stiffness: grad(phi_i).grad(phi_j) * area, from the constant
/// gradients of the barycentric coordinates.
inline Eigen::Matrix3d local_stiffness(Point p0, Point p1, Point p2) {
  const double area = triangle_signed_area(p0, p1, p2);
  if (!(std::abs(area) > 0.0)) throw AssemblyError("degenerate triangle (zero area)");
  // Edge vectors opposite each vertex, rotated: grad(phi_i) = perp(e_i) / (2 area).
  const std::array<Point, 3> opp{p2 - p1, p0 - p2, p1 - p0};
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k(i, j) = dot(opp[i], opp[j]) / (4.0 * std::abs(area));
  }
  return k;
}

/// Consistent P1 mass: area/6 on the diagonal, area/12 off it.
inline Eigen::Matrix3d local_mass(Point p0, Point p1, Point p2) {
  const double area = std::abs(triangle_signed_area(p0, p1, p2));
  if (!(area > 0.0)) throw AssemblyError("degenerate triangle (zero area)");
  Eigen::Matrix3d m = Eigen::Matrix3d::Constant(area / 12.0);
  m.diagonal().setConstant(area / 6.0);
  return m;
}

struct Assembly {
  SparseMatrix stiffness;
  SparseMatrix mass;
};

/// Global stiffness and mass over every mesh vertex (no boundary conditions).
inline Assembly assemble(const Mesh& m) {
  const auto n = static_cast<Eigen::Index>(m.num_vertices());
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(9 * m.num_triangles());
  mt.reserve(9 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const Point p0 = m.vertices[tri[0]], p1 = m.vertices[tri[1]], p2 = m.vertices[tri[2]];
    Eigen::Matrix3d ke, me;
    try {
      ke = local_stiffness(p0, p1, p2);
      me = local_mass(p0, p1, p2);
    } catch (const AssemblyError&) {
      throw AssemblyError("degenerate triangle " + std::to_string(t));
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(tri[i], tri[j], ke(i, j));
        mt.emplace_back(tri[i], tri[j], me(i, j));
      }
    }
  }
  Assembly a;
  a.stiffness.resize(n, n);
  a.mass.resize(n, n);
  a.stiffness.setFromTriplets(kt.begin(), kt.end());
  a.mass.setFromTriplets(mt.begin(), mt.end());
  return a;
}

// ---------------------------------------------------------------------------
// Sector reduction

struct SectorSystem {
  SparseMatrix K;
  SparseMatrix M;
  std::vector<int> dof_to_vertex;
  std::vector<int> vertex_to_dof;  // -1 for constrained vertices
  Sector sector;

  Eigen::Index dofs() const { return K.rows(); }
};

/// Vertices carrying a homogeneous Dirichlet condition in sector `s`.
inline std::vector<bool> constrained_vertices(const Mesh& m, const Sector& s) {
  std::vector<bool> fixed(m.num_vertices(), false);
  for (const auto& be : m.boundary_edges) {
    bool constrain = false;
    switch (be.tag) {
      case EdgeTag::physical: constrain = true; break;
      case EdgeTag::sym_x1: constrain = s.parity_x1 == Parity::anti; break;
      case EdgeTag::sym_x2: constrain = s.parity_x2 == Parity::anti; break;
      case EdgeTag::cut: constrain = s.cut_bc == CutBC::dirichlet; break;
    }
    if (constrain) fixed[be.v[0]] = fixed[be.v[1]] = true;
  }
  return fixed;
}

/// Eliminates constrained rows and columns.
inline SectorSystem reduce(const Assembly& full, const Mesh& m, const Sector& s) {
  const auto fixed = constrained_vertices(m, s);
  SectorSystem sys;
  sys.sector = s;
  sys.vertex_to_dof.assign(m.num_vertices(), -1);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (!fixed[v]) {
      sys.vertex_to_dof[v] = static_cast<int>(sys.dof_to_vertex.size());
      sys.dof_to_vertex.push_back(static_cast<int>(v));
    }
  }
  const auto n = static_cast<Eigen::Index>(sys.dof_to_vertex.size());
  auto restrict = [&](const SparseMatrix& A) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A.nonZeros());
    for (Eigen::Index col = 0; col < A.outerSize(); ++col) {
      const int dc = sys.vertex_to_dof[col];
      if (dc < 0) continue;
      for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
        const int dr = sys.vertex_to_dof[it.row()];
        if (dr >= 0) trip.emplace_back(dr, dc, it.value());
      }
    }
    SparseMatrix R(n, n);
    R.setFromTriplets(trip.begin(), trip.end());
    return R;
  };
  sys.K = restrict(full.stiffness);
  sys.M = restrict(full.mass);
  return sys;
}

inline SectorSystem sector_system(const Mesh& m, const Sector& s) { return reduce(assemble(m), m, s); }

/// Coordinate text format, one "row col value" line per stored entry.
inline void write_coordinate(std::ostream& os, const SparseMatrix& A) {
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  char buf[80];
  for (Eigen::Index col = 0; col < A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()), static_cast<long>(it.col()),
                    it.value());
      os << buf;
    }
  }
}

}  // namespace nodalab
