#include "tiltopt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tiltopt::svg {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 50;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Round axis limits out to a "nice" step so ticks land on round numbers.
void nice_limits(double& lo, double& hi, double& step) {
  if (!(hi > lo)) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
}

std::string text(double x, double y, const std::string& s, const std::string& anchor,
                 double size = 12) {
  return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + fmt(size) +
         "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

struct Frame {
  double x_lo, x_hi, y_lo, y_hi, y_step;
  double px(double x) const {
    return kLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
  }
};

std::string axes(const Frame& f, const std::string& title, const std::string& x_label,
                 const std::string& y_label, bool integer_x) {
  std::string out;
  out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" +
         fmt(kWidth - kLeft - kRight) + "\" height=\"" + fmt(kHeight - kTop - kBottom) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  out += text(kWidth / 2, kTop - 14, title, "middle", 15);
  out += text(kWidth / 2, kHeight - 10, x_label, "middle");
  out += "<g transform=\"translate(16," + fmt(kHeight / 2) + ") rotate(-90)\">" +
         text(0, 0, y_label, "middle") + "</g>\n";
  for (double y = f.y_lo; y <= f.y_hi + 1e-9; y += f.y_step) {
    out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(f.py(y)) + "\" x2=\"" +
           fmt(kWidth - kRight) + "\" y2=\"" + fmt(f.py(y)) +
           "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    out += text(kLeft - 6, f.py(y) + 4, fmt(y), "end", 11);
  }
  if (integer_x) {
    const int n = static_cast<int>(f.x_hi - f.x_lo);
    const int tick = n <= 12 ? 1 : (n <= 24 ? 2 : 5);
    for (int x = static_cast<int>(f.x_lo); x <= static_cast<int>(f.x_hi); x += tick) {
      out += text(f.px(x), kHeight - kBottom + 16, std::to_string(x), "middle", 11);
    }
  }
  return out;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const Series> series) {
  double y_min = 1e300, y_max = -1e300;
  std::size_t n = 0;
  for (const Series& s : series) {
    n = std::max(n, s.y.size());
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
    for (double v : s.band_lo) y_min = std::min(y_min, v);
    for (double v : s.band_hi) y_max = std::max(y_max, v);
  }
  if (n == 0) {
    y_min = 0;
    y_max = 1;
    n = 1;
  }
  Frame f{0.0, static_cast<double>(n - 1 > 0 ? n - 1 : 1), y_min, y_max, 1.0};
  nice_limits(f.y_lo, f.y_hi, f.y_step);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
                    "\" height=\"" + fmt(kHeight) + "\">\n";
  out += axes(f, title, x_label, y_label, true);
  for (const Series& s : series) {
    if (!s.band_lo.empty() && s.band_lo.size() == s.band_hi.size()) {
      std::string pts;
      for (std::size_t i = 0; i < s.band_lo.size(); ++i) {
        pts += fmt(f.px(static_cast<double>(i))) + "," + fmt(f.py(s.band_lo[i])) + " ";
      }
      for (std::size_t i = s.band_hi.size(); i-- > 0;) {
        pts += fmt(f.px(static_cast<double>(i))) + "," + fmt(f.py(s.band_hi[i])) + " ";
      }
      out += "<polygon points=\"" + pts + "\" fill=\"" + s.color +
             "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
  }
  for (const Series& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      pts += fmt(f.px(static_cast<double>(i))) + "," + fmt(f.py(s.y[i])) + " ";
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
  }
  // Legend.
  double ly = kTop + 16;
  for (const Series& s : series) {
    out += "<line x1=\"" + fmt(kLeft + 12) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
           fmt(kLeft + 40) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    out += text(kLeft + 46, ly, s.label, "start", 12);
    ly += 16;
  }
  out += "</svg>\n";
  return out;
}

std::string box_chart(const std::string& title, const std::string& y_label,
                      std::span<const Box> boxes) {
  double y_min = 1e300, y_max = -1e300;
  for (const Box& b : boxes) {
    y_min = std::min({y_min, b.min, b.mean});
    y_max = std::max({y_max, b.max, b.mean});
  }
  if (boxes.empty()) {
    y_min = 0;
    y_max = 1;
  }
  Frame f{-0.5, static_cast<double>(boxes.size()) - 0.5, y_min, y_max, 1.0};
  nice_limits(f.y_lo, f.y_hi, f.y_step);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
                    "\" height=\"" + fmt(kHeight) + "\">\n";
  out += axes(f, title, "", y_label, false);
  const double half = 0.28;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Box& b = boxes[i];
    const double x = static_cast<double>(i);
    const double x0 = f.px(x - half), x1 = f.px(x + half), xc = f.px(x);
    out += "<line x1=\"" + fmt(xc) + "\" y1=\"" + fmt(f.py(b.min)) + "\" x2=\"" + fmt(xc) +
           "\" y2=\"" + fmt(f.py(b.q1)) + "\" stroke=\"#333\"/>\n";
    out += "<line x1=\"" + fmt(xc) + "\" y1=\"" + fmt(f.py(b.q3)) + "\" x2=\"" + fmt(xc) +
           "\" y2=\"" + fmt(f.py(b.max)) + "\" stroke=\"#333\"/>\n";
    for (double w : {b.min, b.max}) {
      out += "<line x1=\"" + fmt(f.px(x - half / 2)) + "\" y1=\"" + fmt(f.py(w)) + "\" x2=\"" +
             fmt(f.px(x + half / 2)) + "\" y2=\"" + fmt(f.py(w)) + "\" stroke=\"#333\"/>\n";
    }
    out += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(f.py(b.q3)) + "\" width=\"" + fmt(x1 - x0) +
           "\" height=\"" + fmt(f.py(b.q1) - f.py(b.q3)) +
           "\" fill=\"#7fb3d5\" fill-opacity=\"0.6\" stroke=\"#333\"/>\n";
    out += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(f.py(b.median)) + "\" x2=\"" + fmt(x1) +
           "\" y2=\"" + fmt(f.py(b.median)) + "\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
    out += "<circle cx=\"" + fmt(xc) + "\" cy=\"" + fmt(f.py(b.mean)) +
           "\" r=\"3\" fill=\"#333\"/>\n";
    out += text(xc, kHeight - kBottom + 16, b.label, "middle", 11);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace tiltopt::svg
