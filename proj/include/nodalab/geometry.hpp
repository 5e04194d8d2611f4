#pragma once

// Parametric description of the domains Omega_eps = Omega_0 ∪ T_eps:
// a rectangle (-a,a)x(-b,b) with two thin tubes glued along the x2 axis.
// Everything is built on the quarter x1 >= 0, x2 >= 0 and reflected.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nodalab/errors.hpp"

namespace nodalab {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point p, Point q) { return {p.x1 + q.x1, p.x2 + q.x2}; }
inline Point operator-(Point p, Point q) { return {p.x1 - q.x1, p.x2 - q.x2}; }
inline Point operator*(double s, Point p) { return {s * p.x1, s * p.x2}; }

inline double dot(Point p, Point q) { return p.x1 * q.x1 + p.x2 * q.x2; }
inline double cross(Point p, Point q) { return p.x1 * q.x2 - p.x2 * q.x1; }
inline double norm(Point p) { return std::hypot(p.x1, p.x2); }
inline double distance(Point p, Point q) { return norm(p - q); }

inline double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Shoelace area; positive for counter-clockwise polygons.
inline double signed_area(const std::vector<Point>& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * twice;
}

// ---------------------------------------------------------------------------
// Tube profile

enum class ProfileKind { constant, exp_decay, rational_decay };

inline std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::exp_decay: return "exp_decay";
    case ProfileKind::rational_decay: return "rational_decay";
  }
  return "unknown";
}

inline ProfileKind profile_kind_from_string(std::string_view name) {
  if (name == "constant") return ProfileKind::constant;
  if (name == "exp_decay") return ProfileKind::exp_decay;
  if (name == "rational_decay") return ProfileKind::rational_decay;
  throw GeometryError("unknown profile kind '" + std::string(name) + "'");
}

/// Convex, nonincreasing h : [0, inf) -> (0, 1] with h(0) = 1.
struct Profile {
  ProfileKind kind = ProfileKind::constant;
  double rate = 1.0;  // unused for constant

  friend bool operator==(const Profile&, const Profile&) = default;

  bool decays() const { return kind != ProfileKind::constant; }
};

inline double eval_profile(const Profile& p, double t) {
  if (!(t >= 0.0)) {
    throw std::domain_error("profile argument must be nonnegative, got " + std::to_string(t));
  }
  switch (p.kind) {
    case ProfileKind::constant: return 1.0;
    case ProfileKind::exp_decay: return std::exp(-p.rate * t);
    case ProfileKind::rational_decay: return 1.0 / (1.0 + p.rate * t);
  }
  return 1.0;
}

/// Closed form of the integral of h over [0, t].
inline double integrate_profile(const Profile& p, double t) {
  switch (p.kind) {
    case ProfileKind::constant: return t;
    case ProfileKind::exp_decay: return -std::expm1(-p.rate * t) / p.rate;
    case ProfileKind::rational_decay: return std::log1p(p.rate * t) / p.rate;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Domain

/// Omega_0 = (-a,a)x(-b,b); the tube {|x1| < eps*h(|x2|-b)} continues it
/// beyond |x2| = b and is cut at |x2| = b + L for computation.
struct DomainSpec {
  double a = 2.0;
  double b = 1.0;
  double eps = 0.1;
  Profile profile{};
  double L = 4.0;
  int boundary_samples = 64;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

  double cut_height() const { return b + L; }
};

/// Half-width of the tube at height x2 >= b.
inline double tube_half_width(const DomainSpec& spec, double x2) {
  return spec.eps * eval_profile(spec.profile, std::max(0.0, x2 - spec.b));
}

inline std::vector<std::string> spec_violations(const DomainSpec& s) {
  std::vector<std::string> out;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(s.a) || !finite(s.b) || !finite(s.eps) || !finite(s.L) || !finite(s.profile.rate)) {
    out.emplace_back("all lengths must be finite");
    return out;
  }
  if (!(s.b > 0.0)) out.emplace_back("half_height b must be positive");
  if (!(s.a > s.b)) out.emplace_back("half_width a must exceed half_height b");
  if (!(s.eps > 0.0)) out.emplace_back("eps must be positive");
  if (!(s.eps < s.a)) out.emplace_back("tube half-width eps*h(0) must stay below a");
  if (!(s.eps < s.b)) out.emplace_back("eps must be smaller than b");
  if (!(s.L > 0.0)) out.emplace_back("truncation length L must be positive");
  if (s.boundary_samples < 2) out.emplace_back("boundary_samples must be at least 2");
  if (s.profile.decays() && !(s.profile.rate > 0.0)) {
    out.emplace_back("decay rate must be positive");
  }
  return out;
}

inline void validate(const DomainSpec& spec) {
  const auto problems = spec_violations(spec);
  if (problems.empty()) return;
  std::string msg = "invalid domain:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw GeometryError(msg);
}

/// Exact area of the truncated quarter domain.
inline double quarter_area(const DomainSpec& spec) {
  return spec.a * spec.b + spec.eps * integrate_profile(spec.profile, spec.L);
}

/// Lower edge of the essential spectrum for the untruncated domain:
/// pi^2/(2 eps)^2 for a straight tube, +inf when the tube narrows to zero.
inline double essential_threshold(const DomainSpec& spec) {
  if (spec.profile.decays()) return std::numeric_limits<double>::infinity();
  const double w = 2.0 * spec.eps;
  return std::numbers::pi * std::numbers::pi / (w * w);
}

// ---------------------------------------------------------------------------
// Boundary polylines

enum class EdgeTag { physical, sym_x1, sym_x2, cut };

inline std::string_view to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::physical: return "physical";
    case EdgeTag::sym_x1: return "sym_x1";
    case EdgeTag::sym_x2: return "sym_x2";
    case EdgeTag::cut: return "cut";
  }
  return "unknown";
}

inline EdgeTag edge_tag_from_string(std::string_view name) {
  if (name == "physical") return EdgeTag::physical;
  if (name == "sym_x1") return EdgeTag::sym_x1;
  if (name == "sym_x2") return EdgeTag::sym_x2;
  if (name == "cut") return EdgeTag::cut;
  throw std::invalid_argument("unknown edge tag '" + std::string(name) + "'");
}

/// Closed polyline; edge i joins vertices[i] and vertices[(i+1) % n].
struct TaggedPolygon {
  std::vector<Point> vertices;
  std::vector<EdgeTag> edge_tags;

  std::size_t size() const { return vertices.size(); }
  Point edge_start(std::size_t i) const { return vertices[i]; }
  Point edge_end(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
};

/// Boundary of the quarter domain, counter-clockwise from the origin.
struct QuarterBoundary : TaggedPolygon {
  DomainSpec domain;
};

/// Physical and cut edges of the full (reflected) truncated domain.
struct FullBoundary : TaggedPolygon {};

/// Wall sample heights, cosine-clustered toward the junction x2 = b.
inline std::vector<double> wall_sample_heights(const DomainSpec& spec) {
  const int n = spec.boundary_samples;
  std::vector<double> heights(n);
  for (int i = 0; i < n; ++i) {
    const double theta = 0.5 * std::numbers::pi * i / (n - 1);
    heights[i] = spec.b + spec.L * (1.0 - std::cos(theta));
  }
  heights.front() = spec.b;
  heights.back() = spec.cut_height();
  return heights;
}

inline QuarterBoundary quarter_boundary(const DomainSpec& spec) {
  validate(spec);
  QuarterBoundary q;
  q.domain = spec;
  auto push = [&q](Point p, EdgeTag tag_of_next_edge) {
    q.vertices.push_back(p);
    q.edge_tags.push_back(tag_of_next_edge);
  };
  push({0.0, 0.0}, EdgeTag::sym_x2);
  push({spec.a, 0.0}, EdgeTag::physical);
  push({spec.a, spec.b}, EdgeTag::physical);
  const auto heights = wall_sample_heights(spec);
  for (std::size_t i = 0; i < heights.size(); ++i) {
    const bool last = i + 1 == heights.size();
    push({tube_half_width(spec, heights[i]), heights[i]}, last ? EdgeTag::cut : EdgeTag::physical);
  }
  push({0.0, spec.cut_height()}, EdgeTag::sym_x1);
  return q;
}

/// Reflects the quarter across both axes and drops the symmetry edges,
/// giving one closed counter-clockwise polyline of the truncated boundary.
inline FullBoundary reflect_full(const QuarterBoundary& q) {
  // Physical/cut chain of the quarter from (a,0) to (0, b+L).
  std::vector<Point> chain;
  std::vector<EdgeTag> tags;
  const std::size_t n = q.size();
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (q.edge_tags[i] != EdgeTag::sym_x1 && q.edge_tags[i] != EdgeTag::sym_x2 &&
        q.edge_tags[(i + n - 1) % n] == EdgeTag::sym_x2) {
      start = i;
    }
  }
  if (start == n) throw GeometryError("quarter boundary has no physical chain after the x2-axis");
  for (std::size_t i = start;; i = (i + 1) % n) {
    chain.push_back(q.vertices[i]);
    if (q.edge_tags[i] == EdgeTag::sym_x1 || q.edge_tags[i] == EdgeTag::sym_x2) break;
    tags.push_back(q.edge_tags[i]);
  }
  if (chain.front().x2 != 0.0 || chain.back().x1 != 0.0) {
    throw GeometryError("physical chain must run from the x2=0 axis to the x1=0 axis");
  }

  FullBoundary full;
  const std::size_t m = chain.size();  // m vertices, m-1 edges
  // Quadrant I: (a,0) -> (0,top), excluding the last vertex.
  for (std::size_t i = 0; i + 1 < m; ++i) {
    full.vertices.push_back(chain[i]);
    full.edge_tags.push_back(tags[i]);
  }
  // Quadrant II: mirrored chain walked backwards, (0,top) -> (-a,0).
  for (std::size_t i = m - 1; i >= 1; --i) {
    full.vertices.push_back({-chain[i].x1, chain[i].x2});
    full.edge_tags.push_back(tags[i - 1]);
  }
  // Quadrant III: (-a,0) -> (0,-top).
  for (std::size_t i = 0; i + 1 < m; ++i) {
    full.vertices.push_back({-chain[i].x1, -chain[i].x2});
    full.edge_tags.push_back(tags[i]);
  }
  // Quadrant IV: (0,-top) -> (a,0).
  for (std::size_t i = m - 1; i >= 1; --i) {
    full.vertices.push_back({chain[i].x1, -chain[i].x2});
    full.edge_tags.push_back(tags[i - 1]);
  }
  return full;
}

/// CSV with header "x1,x2,tag"; the tag is that of the edge leaving the vertex.
inline void write_polyline_csv(std::ostream& os, const TaggedPolygon& poly) {
  os << "x1,x2,tag\n";
  char buf[96];
  for (std::size_t i = 0; i < poly.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,", poly.vertices[i].x1, poly.vertices[i].x2);
    os << buf << to_string(poly.edge_tags[i]) << '\n';
  }
}

}  // namespace nodalab
