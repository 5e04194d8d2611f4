#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nodalab/geometry.hpp"

using namespace nodalab;

namespace {

// Proper intersection or touching of two closed segments.
bool segments_meet(Point p1, Point p2, Point q1, Point q2) {
  auto orient = [](Point a, Point b, Point c) {
    const double v = cross(b - a, c - a);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };
  auto on_seg = [](Point a, Point b, Point c) {
    return std::min(a.x1, b.x1) <= c.x1 && c.x1 <= std::max(a.x1, b.x1) && std::min(a.x2, b.x2) <= c.x2 &&
           c.x2 <= std::max(a.x2, b.x2);
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2), o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_seg(p1, p2, q1)) || (o2 == 0 && on_seg(p1, p2, q2)) || (o3 == 0 && on_seg(q1, q2, p1)) ||
         (o4 == 0 && on_seg(q1, q2, p2));
}

// Brute-force O(n^2) simplicity check of a closed polygon.
bool is_simple(const std::vector<Point>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_meet(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

DomainSpec strip(double L = 4.0) {
  DomainSpec s;
  s.L = L;
  return s;
}

DomainSpec decaying(double L = 4.0) {
  DomainSpec s;
  s.profile = {ProfileKind::exp_decay, 1.0};
  s.L = L;
  return s;
}

}  // namespace

TEST(Profile, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(eval_profile({ProfileKind::constant, 1.0}, 7.3), 1.0);
  EXPECT_DOUBLE_EQ(eval_profile({ProfileKind::exp_decay, 1.0}, 0.0), 1.0);
  EXPECT_NEAR(eval_profile({ProfileKind::rational_decay, 2.0}, 3.0), 1.0 / 7.0, 1e-15);
  EXPECT_NEAR(eval_profile({ProfileKind::exp_decay, 0.5}, 2.0), std::exp(-1.0), 1e-15);
}

TEST(Profile, NegativeArgumentIsDomainError) {
  EXPECT_THROW(eval_profile({ProfileKind::constant, 1.0}, -0.1), std::domain_error);
}

TEST(Profile, MonotoneAndMidpointConvexOnGrid) {
  for (auto kind : {ProfileKind::constant, ProfileKind::exp_decay, ProfileKind::rational_decay}) {
    for (double rate : {0.3, 1.0, 4.0}) {
      const Profile p{kind, rate};
      for (int i = 0; i < 200; ++i) {
        const double t1 = 0.05 * i, t2 = t1 + 0.05 + 0.01 * i;
        const double h1 = eval_profile(p, t1), h2 = eval_profile(p, t2);
        EXPECT_LE(h2, h1);
        EXPECT_GT(h2, 0.0);
        EXPECT_LE(h1, 1.0);
        EXPECT_LE(eval_profile(p, 0.5 * (t1 + t2)), 0.5 * (h1 + h2) + 1e-12);
      }
    }
  }
}

TEST(Profile, IntegralMatchesQuadrature) {
  for (auto kind : {ProfileKind::constant, ProfileKind::exp_decay, ProfileKind::rational_decay}) {
    const Profile p{kind, 1.7};
    const int n = 20000;
    const double T = 3.0;
    double simpson = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
      simpson += w * eval_profile(p, T * i / n);
    }
    simpson *= T / n / 3.0;
    EXPECT_NEAR(integrate_profile(p, T), simpson, 1e-10);
  }
}

TEST(DomainSpecTest, InvariantsRejectBadShapes) {
  DomainSpec s;
  s.a = 1.0;
  s.b = 2.0;
  EXPECT_THROW(quarter_boundary(s), GeometryError);
  s = DomainSpec{};
  s.eps = 1.5;
  EXPECT_THROW(validate(s), GeometryError);
  s = DomainSpec{};
  s.L = 0.0;
  EXPECT_THROW(validate(s), GeometryError);
  EXPECT_NO_THROW(validate(DomainSpec{}));
}

TEST(DomainSpecTest, ThresholdFormula) {
  DomainSpec s;
  s.eps = 0.05;
  EXPECT_NEAR(essential_threshold(s), 986.960440108936, 1e-9);
  s.eps = 0.4;
  EXPECT_NEAR(essential_threshold(s), 15.421256876702, 1e-9);
  EXPECT_TRUE(std::isinf(essential_threshold(decaying())));
}

TEST(QuarterBoundaryTest, StraightStripLayout) {
  const auto q = quarter_boundary(strip());
  ASSERT_EQ(q.vertices.size(), q.edge_tags.size());
  EXPECT_GT(signed_area(q.vertices), 0.0);
  EXPECT_NEAR(signed_area(q.vertices), 2.0 * 1.0 + 0.1 * 4.0, 1e-12);
  EXPECT_TRUE(is_simple(q.vertices));
  int cut_runs = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Point a = q.edge_start(i), b = q.edge_end(i);
    switch (q.edge_tags[i]) {
      case EdgeTag::sym_x1:
        EXPECT_EQ(a.x1, 0.0);
        EXPECT_EQ(b.x1, 0.0);
        break;
      case EdgeTag::sym_x2:
        EXPECT_EQ(a.x2, 0.0);
        EXPECT_EQ(b.x2, 0.0);
        break;
      case EdgeTag::cut:
        EXPECT_DOUBLE_EQ(a.x2, 5.0);
        EXPECT_DOUBLE_EQ(b.x2, 5.0);
        cut_runs += q.edge_tags[(i + q.size() - 1) % q.size()] != EdgeTag::cut;
        break;
      case EdgeTag::physical:
        // x1 = 2, the top of the core, or the tube wall x1 = 0.1.
        EXPECT_TRUE(a.x1 == 2.0 || a.x2 == 1.0 || std::abs(a.x1 - 0.1) < 1e-15);
        break;
    }
  }
  EXPECT_EQ(cut_runs, 1);
}

TEST(QuarterBoundaryTest, DecayingWallMeasuredFromJunction) {
  const auto q = quarter_boundary(decaying());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Point p = q.vertices[i];
    if (p.x2 > 1.0 && p.x1 > 0.0) EXPECT_NEAR(p.x1, 0.1 * std::exp(-(p.x2 - 1.0)), 1e-14);
  }
  // Wall through (0.1 e^{-1}, 2): interpolate the polyline at x2 = 2.
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    const Point a = q.vertices[i], b = q.vertices[i + 1];
    if (q.edge_tags[i] == EdgeTag::physical && a.x2 <= 2.0 && b.x2 > 2.0 && a.x2 >= 1.0) {
      const double t = (2.0 - a.x2) / (b.x2 - a.x2);
      EXPECT_NEAR(a.x1 + t * (b.x1 - a.x1), 0.1 * std::exp(-1.0), 1e-4);
    }
  }
  EXPECT_TRUE(is_simple(q.vertices));
}

TEST(ReflectFullTest, SymmetricSimpleAndCounted) {
  for (const auto& spec : {strip(), decaying(6.0)}) {
    const auto q = quarter_boundary(spec);
    const auto full = reflect_full(q);
    std::size_t chain = 0;  // quarter vertices on the physical/cut chain, axes included
    for (std::size_t i = 0; i < q.size(); ++i) {
      chain += q.edge_tags[i] == EdgeTag::physical || q.edge_tags[i] == EdgeTag::cut;
    }
    chain += 1;
    EXPECT_EQ(full.size(), 4 * chain - 4);  // four copies, the axis endpoints shared
    EXPECT_TRUE(is_simple(full.vertices));
    EXPECT_NEAR(signed_area(full.vertices), 4.0 * signed_area(q.vertices), 1e-10);
    std::set<std::pair<long long, long long>> pts;
    auto key = [](Point p) { return std::pair{std::llround(p.x1 * 1e9), std::llround(p.x2 * 1e9)}; };
    for (const Point& p : full.vertices) pts.insert(key(p));
    for (const Point& p : full.vertices) {
      EXPECT_TRUE(pts.count(key({-p.x1, p.x2})));
      EXPECT_TRUE(pts.count(key({p.x1, -p.x2})));
    }
    for (auto tag : full.edge_tags) {
      EXPECT_TRUE(tag == EdgeTag::physical || tag == EdgeTag::cut);
    }
  }
}
