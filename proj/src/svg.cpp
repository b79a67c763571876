#include "quakemodes/svg.hpp"

#include <cmath>
#include <cstdio>

namespace quakemodes {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height)
    : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double width,
                     const std::string& dash) {
  body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" +
           fmt(x2) + "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke +
           "\" stroke-width=\"" + fmt(width) + "\"";
  if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
  body_ += "/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" +
           fmt(r) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h,
                     const std::string& fill, const std::string& stroke) {
  body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
           fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"" + fill +
           "\" stroke=\"" + stroke + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, double size,
                     const std::string& anchor) {
  body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
           fmt(size) + "\" font-family=\"sans-serif\" text-anchor=\"" +
           anchor + "\">" + s + "</text>\n";
}

std::string SvgCanvas::finish() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt(width_) + "\" height=\"" + fmt(height_) +
         "\" viewBox=\"0 0 " + fmt(width_) + " " + fmt(height_) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

double PanelFrame::px(double x) const {
  if (xmax == xmin) return x0 + w / 2;
  return x0 + (x - xmin) / (xmax - xmin) * w;
}

double PanelFrame::py(double y) const {
  if (ymax == ymin) return y0 + h / 2;
  return y0 + h - (y - ymin) / (ymax - ymin) * h;
}

std::string format_tick(double v) {
  char buf[64];
  if (v == 0) return "0";
  if (std::fabs(v) >= 0.01 && std::fabs(v) < 10000) {
    std::snprintf(buf, sizeof(buf), "%.3g", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.1e", v);
  }
  return buf;
}

void PanelFrame::draw_axes(SvgCanvas& svg, const std::string& title,
                           const std::string& xlabel,
                           const std::string& ylabel) const {
  svg.rect(x0, y0, w, h, "none", "#444444");
  svg.text(x0 + w / 2, y0 - 6, title, 12, "middle");
  svg.text(x0 + w / 2, y0 + h + 28, xlabel, 10, "middle");
  svg.text(x0 - 42, y0 + h / 2, ylabel, 10, "middle");
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    svg.line(px(fx), y0 + h, px(fx), y0 + h + 4, "#444444");
    svg.text(px(fx), y0 + h + 15, format_tick(fx), 9, "middle");
    svg.line(x0 - 4, py(fy), x0, py(fy), "#444444");
    svg.text(x0 - 6, py(fy) + 3, format_tick(fy), 9, "end");
  }
}

}  // namespace quakemodes
