#pragma once

#include <string>
#include <vector>

#include "sievelab/homogenize.hpp"
#include "sievelab/mesh.hpp"

namespace sievelab {

// Dependency-free SVG assembly. Coordinates are final document units;
// callers do their own data-to-canvas mapping or use the plot helpers.
class Svg {
 public:
  Svg(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none", double stroke_width = 0.0);
  void polygon(const std::vector<Vec2>& pts, const std::string& fill,
               const std::string& stroke = "none", double stroke_width = 0.0);
  void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double stroke_width);
  void line(Vec2 a, Vec2 b, const std::string& stroke, double stroke_width);
  void path(const std::string& d, const std::string& stroke, double stroke_width,
            const std::string& fill = "none");
  // anchor: "start", "middle" or "end".
  void text(Vec2 at, double size, const std::string& content, const std::string& anchor = "start");

  std::string str() const;

 private:
  double width_, height_;
  std::string body_;
};

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<Vec2> points;  // data coordinates
};

// Line chart with ticks and labels; log axes use decade ticks and drop
// nonpositive data points.
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series,
                          bool log_x = false, bool log_y = false);

// report.per_j distances and |gaps| against j, y on a log scale.
std::string convergence_svg(const ConvergenceReport& report);

// Per-triangle fill colored by the average of the nodal values.
std::string heatmap_svg(const InterfaceMesh& mesh, const std::vector<double>& nodal,
                        const std::string& title);
std::string heatmap_svg(const Field& u, const std::string& title);

// [u] against arc length, one polyline segment per interface edge.
std::string jump_profile_svg(const Field& u, const std::string& title);

}  // namespace sievelab
