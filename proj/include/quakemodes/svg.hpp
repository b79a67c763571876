#pragma once

#include <string>
#include <vector>

namespace quakemodes {

// Minimal SVG canvas for the static report panels.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double width = 1.0,
            const std::string& dash = "");
  void circle(double cx, double cy, double r, const std::string& fill);
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none");
  void text(double x, double y, const std::string& s, double size = 11,
            const std::string& anchor = "start");

  std::string finish() const;

 private:
  double width_, height_;
  std::string body_;
};

// One scatter/line panel mapped onto a pixel viewport with axes and ticks.
struct PanelFrame {
  double x0, y0, w, h;        // pixel viewport
  double xmin, xmax, ymin, ymax;  // data range
  double px(double x) const;
  double py(double y) const;
  void draw_axes(SvgCanvas& svg, const std::string& title,
                 const std::string& xlabel, const std::string& ylabel) const;
};

std::string format_tick(double v);

}  // namespace quakemodes
