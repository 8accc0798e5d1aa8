#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace nmrsearch {
namespace {

constexpr double kWidth = 800, kHeight = 400;
constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1, 2 or 5 times a power of ten, giving roughly `target` ticks over `span`.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

void write_spectrum_svg(std::ostream& out, const Spectrum& spectrum, std::string_view title) {
  const std::size_t n = spectrum.freq.size();
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  double ymin = 0.0, ymax = 0.0;
  for (const auto& v : spectrum.values) {
    ymin = std::min(ymin, v.real());
    ymax = std::max(ymax, v.real());
  }
  if (ymax - ymin <= 0.0) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const double fhi = n ? spectrum.freq.front() : 1.0, flo = n ? spectrum.freq.back() : 0.0;
  const double fspan = fhi > flo ? fhi - flo : 1.0;
  auto px = [&](double f) { return kLeft + (fhi - f) / fspan * plot_w; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << escape(title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (ymin < 0.0 && ymax > 0.0) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(0)) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << num(py(0)) << "\" stroke=\"#bbbbbb\"/>\n";
  }

  const double step = tick_step(fspan, 8);
  for (double f = std::ceil(flo / step) * step; f <= fhi + 1e-9 * step; f += step) {
    const double x = px(f);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << num(x) << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(std::abs(f) < 1e-9 * step ? 0.0 : f) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">frequency (Hz)</text>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out << ' ';
    out << num(px(spectrum.freq[i])) << ',' << num(py(spectrum.values[i].real()));
  }
  out << "\"/>\n</svg>\n";
}

}  // namespace nmrsearch
