#include "sievelab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sievelab/util.hpp"

namespace sievelab {

namespace {

std::string num(double v) { return strfmt("%.6g", v); }

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out.push_back(c);
  }
  return out;
}

}  // namespace

Svg::Svg(double width, double height) : width_(width), height_(height) {}

void Svg::rect(double x, double y, double w, double h, const std::string& fill,
               const std::string& stroke, double stroke_width) {
  body_ += strfmt("<rect x=\"%s\" y=\"%s\" width=\"%s\" height=\"%s\" fill=\"%s\"", num(x).c_str(),
                  num(y).c_str(), num(w).c_str(), num(h).c_str(), fill.c_str());
  if (stroke != "none")
    body_ += strfmt(" stroke=\"%s\" stroke-width=\"%s\"", stroke.c_str(), num(stroke_width).c_str());
  body_ += "/>\n";
}

void Svg::polygon(const std::vector<Vec2>& pts, const std::string& fill, const std::string& stroke,
                  double stroke_width) {
  body_ += "<polygon points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    body_ += strfmt("%s%s,%s", i ? " " : "", num(pts[i].x).c_str(), num(pts[i].y).c_str());
  body_ += strfmt("\" fill=\"%s\"", fill.c_str());
  if (stroke != "none")
    body_ += strfmt(" stroke=\"%s\" stroke-width=\"%s\"", stroke.c_str(), num(stroke_width).c_str());
  body_ += "/>\n";
}

void Svg::polyline(const std::vector<Vec2>& pts, const std::string& stroke, double stroke_width) {
  body_ += "<polyline points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    body_ += strfmt("%s%s,%s", i ? " " : "", num(pts[i].x).c_str(), num(pts[i].y).c_str());
  body_ += strfmt("\" fill=\"none\" stroke=\"%s\" stroke-width=\"%s\"/>\n", stroke.c_str(),
                  num(stroke_width).c_str());
}

void Svg::line(Vec2 a, Vec2 b, const std::string& stroke, double stroke_width) {
  body_ += strfmt("<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"%s\" stroke-width=\"%s\"/>\n",
                  num(a.x).c_str(), num(a.y).c_str(), num(b.x).c_str(), num(b.y).c_str(),
                  stroke.c_str(), num(stroke_width).c_str());
}

void Svg::path(const std::string& d, const std::string& stroke, double stroke_width,
               const std::string& fill) {
  body_ += strfmt("<path d=\"%s\" fill=\"%s\" stroke=\"%s\" stroke-width=\"%s\"/>\n", d.c_str(),
                  fill.c_str(), stroke.c_str(), num(stroke_width).c_str());
}

void Svg::text(Vec2 at, double size, const std::string& content, const std::string& anchor) {
  body_ += strfmt(
      "<text x=\"%s\" y=\"%s\" font-size=\"%s\" font-family=\"sans-serif\" text-anchor=\"%s\">%s"
      "</text>\n",
      num(at.x).c_str(), num(at.y).c_str(), num(size).c_str(), anchor.c_str(),
      esc(content).c_str());
}

std::string Svg::str() const {
  return strfmt(
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%s\" height=\"%s\" "
             "viewBox=\"0 0 %s %s\">\n",
             num(width_).c_str(), num(height_).c_str(), num(width_).c_str(), num(height_).c_str()) +
         body_ + "</svg>\n";
}

namespace {

constexpr double kW = 640, kH = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

struct AxisMap {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double px0 = 0.0, px1 = 1.0;  // canvas range

  double to_px(double v) const {
    double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                   : (v - lo) / (hi - lo);
    return px0 + t * (px1 - px0);
  }
};

// Round bounds outward: decades for log axes, 1-2-5 steps linearly.
void expand(AxisMap& ax) {
  if (ax.log) {
    ax.lo = std::pow(10.0, std::floor(std::log10(ax.lo)));
    ax.hi = std::pow(10.0, std::ceil(std::log10(ax.hi)));
    if (ax.lo == ax.hi) ax.hi *= 10.0;
    return;
  }
  if (ax.lo == ax.hi) {
    ax.lo -= 0.5;
    ax.hi += 0.5;
    return;
  }
  double span = ax.hi - ax.lo;
  double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
  for (double m : {2.0, 2.5, 2.0}) {
    if (span / step <= 8.0) break;
    step *= m;
  }
  ax.lo = std::floor(ax.lo / step) * step;
  ax.hi = std::ceil(ax.hi / step) * step;
}

std::vector<double> ticks_of(const AxisMap& ax) {
  std::vector<double> t;
  if (ax.log) {
    for (double v = ax.lo; v <= ax.hi * 1.0000001; v *= 10.0) t.push_back(v);
    return t;
  }
  double span = ax.hi - ax.lo;
  double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
  for (double m : {2.0, 2.5, 2.0}) {
    if (span / step <= 8.0) break;
    step *= m;
  }
  for (double v = ax.lo; v <= ax.hi + step * 1e-9; v += step) t.push_back(v);
  return t;
}

std::string tick_label(double v) {
  if (v != 0.0 && (std::fabs(v) < 1e-3 || std::fabs(v) >= 1e4)) return strfmt("%.0e", v);
  return strfmt("%.4g", v);
}

// Piecewise-linear ramp through dark blue, teal, green, yellow.
std::string ramp_color(double t) {
  static const double stops[4][3] = {
      {68, 1, 84}, {49, 104, 142}, {53, 183, 121}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 3.0;
  int k = std::min(2, static_cast<int>(t));
  double f = t - k;
  int r = static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0])));
  int g = static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1])));
  int b = static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2])));
  return strfmt("#%02x%02x%02x", r, g, b);
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series,
                          bool log_x, bool log_y) {
  AxisMap xa, ya;
  xa.log = log_x;
  ya.log = log_y;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const PlotSeries& s : series)
    for (Vec2 p : s.points) {
      if ((log_x && p.x <= 0.0) || (log_y && p.y <= 0.0)) continue;
      xlo = std::min(xlo, p.x), xhi = std::max(xhi, p.x);
      ylo = std::min(ylo, p.y), yhi = std::max(yhi, p.y);
    }
  Svg svg(kW, kH);
  svg.rect(0, 0, kW, kH, "#ffffff");
  svg.text({kW / 2, 22}, 15, title, "middle");
  if (!(xlo <= xhi)) {  // nothing plottable
    svg.text({kW / 2, kH / 2}, 13, "no data", "middle");
    return svg.str();
  }
  xa.lo = xlo, xa.hi = xhi, ya.lo = ylo, ya.hi = yhi;
  expand(xa);
  expand(ya);
  xa.px0 = kLeft, xa.px1 = kW - kRight;
  ya.px0 = kH - kBottom, ya.px1 = kTop;  // y grows upward

  for (double t : ticks_of(xa)) {
    double px = xa.to_px(t);
    svg.line({px, kH - kBottom}, {px, kTop}, "#dddddd", 0.6);
    svg.text({px, kH - kBottom + 16}, 11, tick_label(t), "middle");
  }
  for (double t : ticks_of(ya)) {
    double py = ya.to_px(t);
    svg.line({kLeft, py}, {kW - kRight, py}, "#dddddd", 0.6);
    svg.text({kLeft - 6, py + 4}, 11, tick_label(t), "end");
  }
  svg.rect(kLeft, kTop, kW - kLeft - kRight, kH - kTop - kBottom, "none", "#333333", 1.0);
  svg.text({kW / 2, kH - 12}, 12, x_label, "middle");
  svg.text({14, kTop - 10}, 12, y_label, "start");

  double ly = kTop + 14;
  for (const PlotSeries& s : series) {
    std::vector<Vec2> pts;
    for (Vec2 p : s.points) {
      if ((log_x && p.x <= 0.0) || (log_y && p.y <= 0.0)) continue;
      pts.push_back({xa.to_px(p.x), ya.to_px(p.y)});
    }
    if (pts.size() > 1) svg.polyline(pts, s.color, 1.6);
    for (Vec2 p : pts) svg.rect(p.x - 2, p.y - 2, 4, 4, s.color);
    if (!s.label.empty()) {
      svg.line({kW - kRight - 120, ly}, {kW - kRight - 100, ly}, s.color, 2.0);
      svg.text({kW - kRight - 94, ly + 4}, 11, s.label);
      ly += 16;
    }
  }
  return svg.str();
}

std::string convergence_svg(const ConvergenceReport& report) {
  PlotSeries dist{"distance", "#1f77b4", {}};
  PlotSeries gap{"|value gap|", "#d62728", {}};
  for (const JRecord& r : report.per_j) {
    dist.points.push_back({static_cast<double>(r.j), r.lq_distance});
    gap.points.push_back({static_cast<double>(r.j), std::fabs(r.energy_gap)});
  }
  return line_plot_svg("convergence to the limit problem", "j", "value (log)", {dist, gap},
                       false, true);
}

std::string heatmap_svg(const InterfaceMesh& mesh, const std::vector<double>& nodal,
                        const std::string& title) {
  if (nodal.size() != mesh.nodes.size()) throw IoError("heatmap: nodal size mismatch");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (Vec2 p : mesh.nodes) {
    xlo = std::min(xlo, p.x), xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y), yhi = std::max(yhi, p.y);
  }
  double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
  for (double v : nodal) vlo = std::min(vlo, v), vhi = std::max(vhi, v);
  if (!(vhi > vlo)) vhi = vlo + 1.0;

  double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  double scale = std::min(plot_w / (xhi - xlo), plot_h / (yhi - ylo));
  auto to_px = [&](Vec2 p) -> Vec2 {
    return {kLeft + (p.x - xlo) * scale, kH - kBottom - (p.y - ylo) * scale};
  };

  Svg svg(kW, kH);
  svg.rect(0, 0, kW, kH, "#ffffff");
  svg.text({kW / 2, 22}, 15, title, "middle");
  for (const TriIndex& t : mesh.triangles) {
    double v = (nodal[static_cast<std::size_t>(t.a)] + nodal[static_cast<std::size_t>(t.b)] +
                nodal[static_cast<std::size_t>(t.c)]) /
               3.0;
    std::string c = ramp_color((v - vlo) / (vhi - vlo));
    svg.polygon({to_px(mesh.nodes[static_cast<std::size_t>(t.a)]),
                 to_px(mesh.nodes[static_cast<std::size_t>(t.b)]),
                 to_px(mesh.nodes[static_cast<std::size_t>(t.c)])},
                c, c, 0.3);
  }
  // color bar
  const int steps = 64;
  double bar_x = kW - kRight - 14, bar_h = plot_h * 0.8, bar_y = kTop + 0.1 * plot_h;
  for (int i = 0; i < steps; ++i) {
    double t = (i + 0.5) / steps;
    svg.rect(bar_x, bar_y + bar_h * (1.0 - (i + 1.0) / steps), 10, bar_h / steps + 0.5,
             ramp_color(t));
  }
  svg.text({bar_x - 4, bar_y + bar_h + 4}, 10, tick_label(vlo), "end");
  svg.text({bar_x - 4, bar_y + 8}, 10, tick_label(vhi), "end");
  return svg.str();
}

std::string heatmap_svg(const Field& u, const std::string& title) {
  std::vector<double> nodal(u.mesh->nodes.size());
  for (std::size_t n = 0; n < nodal.size(); ++n) nodal[n] = u.at_node(static_cast<int>(n));
  return heatmap_svg(*u.mesh, nodal, title);
}

std::string jump_profile_svg(const Field& u, const std::string& title) {
  std::vector<EdgeJump> jumps = jump_of(u);
  PlotSeries s{"[u]", "#1f77b4", {}};
  std::vector<PlotSeries> series;
  // one segment per edge keeps decoupling discontinuities visible
  for (std::size_t e = 0; e < jumps.size(); ++e) {
    const InterfaceEdge& ed = u.mesh->edges[e];
    PlotSeries seg = s;
    seg.label = e == 0 ? s.label : "";
    seg.points = {{ed.s0, jumps[e].j1}, {ed.s1, jumps[e].j2}};
    series.push_back(seg);
  }
  if (series.empty()) series.push_back(s);
  return line_plot_svg(title, "arc length s", "jump", series, false, false);
}

}  // namespace sievelab
