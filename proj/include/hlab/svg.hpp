#pragma once
// Minimal deterministic SVG charts: points and polylines on linear or log
// axes. Plots are a convenience next to the CSV tables, never a contract.

#include <cstdio>
#include <string>
#include <vector>

#include "hlab/common.hpp"

namespace hlab {

struct Series {
  std::string name;
  std::vector<double> x, y;
  bool lines = true;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  int width = 640, height = 420;
};

namespace detail {

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace detail

/// Non-finite points, and nonpositive ones on log axes, are dropped.
inline std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.logx || x > 0) && (!spec.logy || y > 0);
  };
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double padx = 0.05 * (x1 - x0), pady = 0.08 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;

  const double L = 70, R = 150, T = 40, B = 50;
  const double W = spec.width - L - R, H = spec.height - T - B;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * W; };
  auto py = [&](double v) { return T + H - (ty(v) - y0) / (y1 - y0) * H; };
  using detail::fmt_px;

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                  std::to_string(spec.width) + "\" height=\"" + std::to_string(spec.height) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt_px(L) + "\" y=\"24\" font-size=\"14\">" +
       detail::escape_xml(spec.title) + "</text>\n";
  s += "<rect x=\"" + fmt_px(L) + "\" y=\"" + fmt_px(T) + "\" width=\"" + fmt_px(W) +
       "\" height=\"" + fmt_px(H) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4, fy = y0 + (y1 - y0) * i / 4;
    const double vx = spec.logx ? std::pow(10.0, fx) : fx;
    const double vy = spec.logy ? std::pow(10.0, fy) : fy;
    const double gx = L + W * i / 4, gy = T + H - H * i / 4;
    s += "<text x=\"" + fmt_px(gx) + "\" y=\"" + fmt_px(T + H + 16) +
         "\" text-anchor=\"middle\">" + detail::fmt_tick(vx) + "</text>\n";
    s += "<text x=\"" + fmt_px(L - 6) + "\" y=\"" + fmt_px(gy + 4) + "\" text-anchor=\"end\">" +
         detail::fmt_tick(vy) + "</text>\n";
  }
  s += "<text x=\"" + fmt_px(L + W / 2) + "\" y=\"" + fmt_px(spec.height - 10.0) +
       "\" text-anchor=\"middle\">" + detail::escape_xml(spec.xlabel) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt_px(T + H / 2) + "\" transform=\"rotate(-90 16 " +
       fmt_px(T + H / 2) + ")\" text-anchor=\"middle\">" + detail::escape_xml(spec.ylabel) +
       "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& ser = series[k];
    const std::string color = palette[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!usable(ser.x[i], ser.y[i])) continue;
      const std::string cx = fmt_px(px(ser.x[i])), cy = fmt_px(py(ser.y[i]));
      pts += cx + "," + cy + " ";
      s += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    if (ser.lines && !pts.empty())
      s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\"/>\n";
    const double ly = T + 14 + 16.0 * k;
    s += "<rect x=\"" + fmt_px(L + W + 12) + "\" y=\"" + fmt_px(ly - 8) +
         "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + fmt_px(L + W + 28) + "\" y=\"" + fmt_px(ly + 1) + "\">" +
         detail::escape_xml(ser.name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace hlab
