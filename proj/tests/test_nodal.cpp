#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "nodalab/nodal.hpp"

using namespace nodalab;

namespace {

DomainSpec strip_spec(double L = 4.0) {
  DomainSpec s;
  s.eps = 0.1;
  s.L = L;
  return s;
}

FullField analytic_field(const Mesh& quarter, auto f, Sector label = kParitySectors[0]) {
  const auto full = reflect_mesh(quarter);
  FullField out;
  out.mesh = full.mesh;
  out.sector = label;
  out.values.resize(static_cast<Eigen::Index>(full.mesh.num_vertices()));
  for (std::size_t v = 0; v < full.mesh.num_vertices(); ++v) out.values(v) = f(full.mesh.vertices[v]);
  return out;
}

// Independent count: flood fill of sign regions on a fine point lattice.
int lattice_sign_regions(auto f, double a, double b, int n) {
  std::vector<int> sign((n + 1) * (n + 1)), seen((n + 1) * (n + 1), 0);
  auto at = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const double v = f(Point{-a + 2 * a * (i + 0.5) / (n + 1), -b + 2 * b * (j + 0.5) / (n + 1)});
      sign[at(i, j)] = v > 0 ? 1 : (v < 0 ? -1 : 0);
    }
  }
  int regions = 0;
  for (int s = 0; s < (n + 1) * (n + 1); ++s) {
    if (seen[s] || sign[s] == 0) continue;
    ++regions;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      const int i = c % (n + 1), j = c / (n + 1);
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int ii = i + di[k], jj = j + dj[k];
        if (ii < 0 || jj < 0 || ii > n || jj > n) continue;
        const int d = at(ii, jj);
        if (!seen[d] && sign[d] == sign[c]) {
          seen[d] = 1;
          q.push(d);
        }
      }
    }
  }
  return regions;
}

struct Solved {
  Mesh mesh;
  EigenResult res;
};

Solved solve(const DomainSpec& spec, Sector s, int k, double h = 0.05) {
  Solved out{generate_mesh(spec, MeshOptions{h, 4}), {}};
  out.res = smallest_eigenpairs(sector_system(out.mesh, s), k);
  return out;
}

}  // namespace

TEST(Reconstruct, AntiSymVanishesOnAxisAndIntegratesToZero) {
  const auto s = solve(strip_spec(), {Parity::anti, Parity::sym, CutBC::dirichlet}, 1);
  const auto f = reconstruct_full(s.mesh, s.res, 0);
  for (std::size_t v = 0; v < f.mesh.num_vertices(); ++v) {
    if (f.mesh.vertices[v].x1 == 0.0) EXPECT_EQ(f.values(v), 0.0);
  }
  const auto a = assemble(f.mesh);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(f.values.size());
  EXPECT_NEAR(one.dot(a.mass * f.values), 0.0, 1e-12);
  // Parity: value at (-x1, x2) is minus the value at (x1, x2).
  std::map<std::pair<long long, long long>, double> by_point;
  auto key = [](Point p) { return std::pair{std::llround(p.x1 * 1e10), std::llround(p.x2 * 1e10)}; };
  for (std::size_t v = 0; v < f.mesh.num_vertices(); ++v) by_point[key(f.mesh.vertices[v])] = f.values(v);
  for (std::size_t v = 0; v < f.mesh.num_vertices(); ++v) {
    const Point p = f.mesh.vertices[v];
    EXPECT_EQ(by_point.at(key({-p.x1, p.x2})), -f.values(v));
    EXPECT_EQ(by_point.at(key({p.x1, -p.x2})), f.values(v));
  }
}

TEST(Reconstruct, GroundStatePositiveInside) {
  const auto s = solve(strip_spec(), kParitySectors[0], 1);
  const auto f = reconstruct_full(s.mesh, s.res, 0);
  const auto b = mesh_boundary(f.mesh);
  std::set<std::pair<long long, long long>> on_boundary;
  for (const Point& p : b.vertices) on_boundary.insert({std::llround(p.x1 * 1e10), std::llround(p.x2 * 1e10)});
  // Deep in the tube the mode decays below rounding; those entries may carry either sign.
  const double floor = kZeroSnap * f.values.cwiseAbs().maxCoeff();
  for (std::size_t v = 0; v < f.mesh.num_vertices(); ++v) {
    const Point p = f.mesh.vertices[v];
    if (on_boundary.count({std::llround(p.x1 * 1e10), std::llround(p.x2 * 1e10)})) continue;
    if (std::abs(p.x2) <= 1.0) EXPECT_GT(f.values(v), floor);
    else EXPECT_GT(f.values(v), -floor);
  }
  EXPECT_TRUE(extract_zero_set(f).empty());
  EXPECT_EQ(count_nodal_domains(f), 1);
}

TEST(Reconstruct, IndexOutOfRange) {
  const auto s = solve(strip_spec(), kParitySectors[0], 1, 0.1);
  EXPECT_THROW(reconstruct_full(s.mesh, s.res, 1), std::out_of_range);
}

TEST(ZeroSet, SecondEigenfunctionIsTheAxis) {
  const auto s = solve(strip_spec(), {Parity::anti, Parity::sym, CutBC::dirichlet}, 1);
  const auto f = reconstruct_full(s.mesh, s.res, 0);
  const auto segs = extract_zero_set(f);
  ASSERT_EQ(segs.size(), 1u);
  double lo = 1e9, hi = -1e9;
  for (const Point& p : segs[0].points) {
    EXPECT_EQ(p.x1, 0.0);
    lo = std::min(lo, p.x2);
    hi = std::max(hi, p.x2);
  }
  EXPECT_DOUBLE_EQ(lo, -5.0);
  EXPECT_DOUBLE_EQ(hi, 5.0);
  EXPECT_EQ(count_nodal_domains(f), 2);
}

TEST(ZeroSet, SymAntiGroundIsTheCrossAxis) {
  const auto s = solve(strip_spec(), {Parity::sym, Parity::anti, CutBC::dirichlet}, 1);
  const auto f = reconstruct_full(s.mesh, s.res, 0);
  const auto segs = extract_zero_set(f);
  ASSERT_EQ(segs.size(), 1u);
  double lo = 1e9, hi = -1e9;
  for (const Point& p : segs[0].points) {
    EXPECT_EQ(p.x2, 0.0);
    lo = std::min(lo, p.x1);
    hi = std::max(hi, p.x1);
  }
  EXPECT_DOUBLE_EQ(lo, -2.0);
  EXPECT_DOUBLE_EQ(hi, 2.0);
  const auto c = classify_and_measure(segs, mesh_boundary(f.mesh), geometric_tolerance(longest_edge(f.mesh)));
  EXPECT_EQ(c.cls, NodalClass::segment_r_perp);
  EXPECT_NEAR(c.min_dist, 0.0, 1e-12);
  EXPECT_TRUE(c.touches_boundary);
}

TEST(ZeroSet, LinearFieldCrossingInsideTriangles) {
  const auto q = generate_rectangle_mesh(2.0, 1.0, 0.1);
  const auto f = analytic_field(q, [](Point p) { return p.x1 - 0.333; });
  const auto segs = extract_zero_set(f);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_FALSE(segs[0].closed);
  for (const Point& p : segs[0].points) EXPECT_NEAR(p.x1, 0.333, 1e-12);
  EXPECT_EQ(count_nodal_domains(f), 2);
}

TEST(ZeroSet, ZeroVerticesTracedOnce) {
  // x1 vanishes exactly on mesh vertices; no parity help (sym label).
  const auto q = generate_rectangle_mesh(2.0, 1.0, 0.1);
  const auto f = analytic_field(q, [](Point p) { return p.x1; });
  const auto segs = extract_zero_set(f);
  ASSERT_EQ(segs.size(), 1u);
  std::set<double> heights;
  for (const Point& p : segs[0].points) {
    EXPECT_EQ(p.x1, 0.0);
    EXPECT_TRUE(heights.insert(p.x2).second) << "duplicate point at x2=" << p.x2;
  }
  EXPECT_DOUBLE_EQ(*heights.begin(), -1.0);
  EXPECT_DOUBLE_EQ(*heights.rbegin(), 1.0);
}

TEST(ZeroSet, ClosedLoop) {
  const auto q = generate_rectangle_mesh(2.0, 1.0, 0.05);
  const auto f = analytic_field(q, [](Point p) { return p.x1 * p.x1 / 1.0 + p.x2 * p.x2 / 0.25 - 0.5; });
  const auto segs = extract_zero_set(f);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_TRUE(segs[0].closed);
  const auto c = classify_and_measure(segs, mesh_boundary(f.mesh), geometric_tolerance(longest_edge(f.mesh)));
  EXPECT_EQ(c.cls, NodalClass::closed_loop);
  EXPECT_FALSE(c.touches_boundary);
  EXPECT_EQ(count_nodal_domains(f), 2);
}

TEST(ZeroSet, IdenticallyZeroIsError) {
  const auto q = generate_rectangle_mesh(2.0, 1.0, 0.25);
  const auto f = analytic_field(q, [](Point) { return 0.0; });
  EXPECT_THROW(extract_zero_set(f), NodalError);
}

TEST(NodalDomains, RectangleModeTwoTwoHasFour) {
  const double a = 2.0, b = 1.0;
  auto mode = [&](Point p) {
    return std::sin(2 * std::numbers::pi * (p.x1 + a) / (2 * a)) * std::sin(2 * std::numbers::pi * (p.x2 + b) / (2 * b));
  };
  const int oracle = lattice_sign_regions(mode, a, b, 400);
  EXPECT_EQ(oracle, 4);
  const auto f = analytic_field(generate_rectangle_mesh(a, b, 0.05), mode, {Parity::anti, Parity::anti, CutBC::dirichlet});
  EXPECT_EQ(count_nodal_domains(f), oracle);
}

TEST(Classify, AxisInsideStraightStrip) {
  DomainSpec s = strip_spec();
  const auto full = reflect_full(quarter_boundary(s));
  Polyline axis;
  for (int i = 0; i <= 100; ++i) axis.points.push_back({0.0, -5.0 + 0.1 * i});
  const auto c = classify_and_measure({axis}, full, 0.005);
  EXPECT_EQ(c.cls, NodalClass::axis_r);
  EXPECT_NEAR(c.min_dist, 0.1, 1e-12);
  EXPECT_FALSE(c.touches_boundary);
}

TEST(Classify, AxisInsideNarrowingTube) {
  DomainSpec s = strip_spec(6.0);
  s.profile = {ProfileKind::exp_decay, 1.0};
  const auto full = reflect_full(quarter_boundary(s));
  Polyline axis;
  for (int i = 0; i <= 140; ++i) axis.points.push_back({0.0, -7.0 + 0.1 * i});
  const auto c = classify_and_measure({axis}, full, 0.005);
  EXPECT_EQ(c.cls, NodalClass::axis_r);
  EXPECT_NEAR(c.min_dist, 0.1 * std::exp(-6.0), 1e-3 * 0.1 * std::exp(-6.0));
  EXPECT_FALSE(c.touches_boundary);
}

TEST(Classify, EmptyAndOther) {
  const auto full = reflect_full(quarter_boundary(strip_spec()));
  EXPECT_THROW(classify_and_measure({}, full, 0.01), NodalError);
  Polyline diag{{{-0.5, -0.5}, {0.5, 0.5}}, false};
  EXPECT_EQ(classify_and_measure({diag}, full, 0.01).cls, NodalClass::other);
}

TEST(NodalCsv, Format) {
  std::ostringstream os;
  write_nodal_csv(os, {Polyline{{{0, 1}, {0, 2.5}}, false}, Polyline{{{1, 0}}, false}});
  EXPECT_EQ(os.str(), "segment_id,x1,x2\n0,0,1\n0,0,2.5\n1,1,0\n");
}
