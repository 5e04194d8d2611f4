#pragma once

// Static SVG 1.1 figures: domain outline, truncation cut and nodal overlay.
// Output depends only on the inputs (fixed number formatting, no timestamps).

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "nodalab/geometry.hpp"
#include "nodalab/nodal.hpp"

namespace nodalab {

struct Panel {
  FullBoundary boundary;
  std::vector<Polyline> nodal;
  std::string caption;
};

struct SvgStyle {
  double panel_width = 320.0;
  double panel_height = 640.0;
  double margin = 28.0;
};

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, y0, scale, cx, cy;
  // SVG y grows downward.
  double X(Point p) const { return x0 + (p.x1 - cx) * scale; }
  double Y(Point p) const { return y0 - (p.x2 - cy) * scale; }
};

inline void draw_panel(std::string& out, const Panel& p, double left, const SvgStyle& st) {
  double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
  for (const Point& q : p.boundary.vertices) {
    lo1 = std::min(lo1, q.x1);
    hi1 = std::max(hi1, q.x1);
    lo2 = std::min(lo2, q.x2);
    hi2 = std::max(hi2, q.x2);
  }
  const double w = st.panel_width - 2 * st.margin, h = st.panel_height - 2 * st.margin - 20.0;
  const double scale = std::min(w / std::max(hi1 - lo1, 1e-12), h / std::max(hi2 - lo2, 1e-12));
  const Frame f{left + st.panel_width / 2, st.margin + h / 2, scale, (lo1 + hi1) / 2, (lo2 + hi2) / 2};

  out += "<g>\n<polygon fill=\"#eef2f7\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < p.boundary.size(); ++i) {
    if (i) out += ' ';
    out += num(f.X(p.boundary.vertices[i])) + "," + num(f.Y(p.boundary.vertices[i]));
  }
  out += "\"/>\n";
  for (std::size_t i = 0; i < p.boundary.size(); ++i) {
    const Point a = p.boundary.edge_start(i), b = p.boundary.edge_end(i);
    const bool cut = p.boundary.edge_tags[i] == EdgeTag::cut;
    out += "<line x1=\"" + num(f.X(a)) + "\" y1=\"" + num(f.Y(a)) + "\" x2=\"" + num(f.X(b)) + "\" y2=\"" +
           num(f.Y(b)) + (cut ? "\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"4,3\" class=\"cut\"/>\n"
                              : "\" stroke=\"#1f2d3d\" stroke-width=\"1.2\"/>\n");
    if (cut) {
      const Point m = 0.5 * (a + b);
      out += "<text x=\"" + num(f.X(m) + 6) + "\" y=\"" + num(f.Y(m) + (m.x2 > 0 ? -4 : 12)) +
             "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#c0392b\">truncation</text>\n";
    }
  }
  for (const auto& pl : p.nodal) {
    out += "<polyline fill=\"none\" stroke=\"#2e86de\" stroke-width=\"2\" class=\"nodal\" points=\"";
    for (std::size_t i = 0; i < pl.points.size(); ++i) {
      if (i) out += ' ';
      out += num(f.X(pl.points[i])) + "," + num(f.Y(pl.points[i]));
    }
    out += "\"/>\n";
  }
  out += "<text x=\"" + num(left + st.panel_width / 2) + "\" y=\"" + num(st.panel_height - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(p.caption) + "</text>\n";
  out += "</g>\n";
}

}  // namespace detail

/// Panels side by side, left to right.
inline std::string render_svg(const std::vector<Panel>& panels, const SvgStyle& st = {}) {
  const double width = st.panel_width * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + detail::num(width) + "\" height=\"" +
         detail::num(st.panel_height) + "\" viewBox=\"0 0 " + detail::num(width) + " " + detail::num(st.panel_height) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) detail::draw_panel(out, panels[i], st.panel_width * i, st);
  out += "</svg>\n";
  return out;
}

inline std::string render_svg(const Panel& p, const SvgStyle& st = {}) { return render_svg(std::vector<Panel>{p}, st); }

}  // namespace nodalab
