#pragma once

#include <span>
#include <string>
#include <vector>

namespace tiltopt::svg {

// Chart primitives kept deliberately small: fixed-format coordinates so the
// same inputs always render byte-identical files. CSV stays the
// authoritative output; these are companions for eyeballing results.

struct Series {
  std::string label;
  std::string color;   // CSS color
  bool dashed = false;
  std::vector<double> y;      // indexed by x = 0..n-1
  std::vector<double> band_lo;  // optional quartile band (empty = none)
  std::vector<double> band_hi;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const Series> series);

struct Box {
  std::string label;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

std::string box_chart(const std::string& title, const std::string& y_label,
                      std::span<const Box> boxes);

}  // namespace tiltopt::svg
