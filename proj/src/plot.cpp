#include "quasipot/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "quasipot/error.hpp"
#include "quasipot/io.hpp"

namespace quasipot {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 64, kRight = 150, kTop = 36, kBottom = 44;
constexpr const char* kPalette[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::fabs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  if (spec.curves.empty()) throw Error(ErrorKind::Validation, "plot needs at least one curve");
  if (spec.x.size() < 2) throw Error(ErrorKind::Validation, "plot needs at least two grid points");
  for (const Curve& c : spec.curves)
    if (c.y.size() != spec.x.size())
      throw Error(ErrorKind::Validation, "curve '" + c.label + "' does not share the plot grid");

  const auto [xlo_it, xhi_it] = std::minmax_element(spec.x.begin(), spec.x.end());
  const double x0 = *xlo_it, x1 = *xhi_it;
  double y0 = INFINITY, y1 = -INFINITY;
  for (const Curve& c : spec.curves)
    for (double v : c.y)
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
  if (!std::isfinite(y0)) y0 = y1 = 0.0;
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(spec.title) + "</text>\n";

  // Shaded bands, split where they wrap through the origin.
  for (const FlatInterval& f : spec.shaded) {
    std::vector<std::pair<double, double>> parts;
    if (f.hi > 1.0) {
      parts = {{f.lo, 1.0}, {0.0, f.hi - 1.0}};
    } else {
      parts = {{f.lo, f.hi}};
    }
    for (auto [a, b] : parts) {
      a = std::clamp(a, x0, x1);
      b = std::clamp(b, x0, x1);
      const double w = std::max(px(b) - px(a), 1.0);
      svg += "<rect x=\"" + num(px(a)) + "\" y=\"" + num(kTop) + "\" width=\"" + num(w) + "\" height=\"" + num(ph) +
             "\" fill=\"#e8e2c8\"/>\n";
    }
  }

  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" + tick(xv) +
           "</text>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) +
           "</text>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(py(yv)) + "\" y2=\"" +
           num(py(yv)) + "\" stroke=\"#ddd\"/>\n";
  }
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 8) + "\" text-anchor=\"middle\">x</text>\n";

  for (std::size_t c = 0; c < spec.curves.size(); ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    const std::vector<double>& y = spec.curves[c].y;
    bool first = true;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(y[i])) continue;
      if (!first) svg += ' ';
      svg += num(px(spec.x[i])) + "," + num(py(y[i]));
      first = false;
    }
    svg += "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(c);
    svg += "<line x1=\"" + num(kLeft + pw + 12) + "\" x2=\"" + num(kLeft + pw + 34) + "\" y1=\"" + num(ly - 4) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kLeft + pw + 40) + "\" y=\"" + num(ly) + "\">" + escape(spec.curves[c].label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const PlotSpec& spec, const std::filesystem::path& path) { io::write_text(path, render_svg(spec)); }

}  // namespace quasipot
