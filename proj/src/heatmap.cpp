#include "bisnorm/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bisnorm {
namespace {

constexpr int kCell = 40;
constexpr int kMargin = 60;
// Saturated end of the scale (dark blue).
constexpr int kFull[3] = {8, 48, 107};

std::string escape(std::string_view s) {
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

std::string shade(double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) {
    rgb[k] = static_cast<int>(std::lround(255.0 + t * (kFull[k] - 255.0)));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string render_heatmap_svg(const ConfusionMatrix& m, std::string_view title) {
  const int c = m.size();
  const double top = m.entries().maxCoeff();
  const int side = kMargin + c * kCell + 10;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\""
      << side + 20 << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"14\" font-size=\"12\">" << escape(title)
      << "</text>\n";
  for (int j = 0; j < c; ++j) {
    out << "<text x=\"" << kMargin + j * kCell + kCell / 2 << "\" y=\"" << kMargin - 6
        << "\" text-anchor=\"middle\">" << escape(m.labels()[static_cast<std::size_t>(j)])
        << "</text>\n";
  }
  for (int i = 0; i < c; ++i) {
    const int y = kMargin + i * kCell;
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << y + kCell / 2 + 4
        << "\" text-anchor=\"end\">" << escape(m.labels()[static_cast<std::size_t>(i)])
        << "</text>\n";
    for (int j = 0; j < c; ++j) {
      const double t = top > 0.0 ? m(i, j) / top : 0.0;
      const int x = kMargin + j * kCell;
      char value[32];
      std::snprintf(value, sizeof value, "%.3g", m(i, j));
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << "\" fill=\"" << shade(t) << "\" stroke=\"#cccccc\"/>";
      out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
          << "\" text-anchor=\"middle\" fill=\"" << (t > 0.5 ? "#ffffff" : "#000000") << "\">"
          << value << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace bisnorm
