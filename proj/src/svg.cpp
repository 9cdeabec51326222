#include "svalse/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace svalse {

namespace {

constexpr double kWidth = 860.0, kHeight = 560.0;
constexpr double kLeft = 70.0, kRight = 830.0, kTop = 50.0, kBottom = 500.0;

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#17becf"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  double to_px(double v, double px_lo, double px_hi) const {
    if (hi == lo) return 0.5 * (px_lo + px_hi);
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int want = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / want;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return ticks;
}

std::string num_label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void open_doc(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"18\">"
     << esc(title) << "</text>\n";
}

void draw_axes(std::ostringstream& os, const Axis& xa, const Axis& ya,
               const std::string& xlabel, const std::string& ylabel) {
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
     << kRight - kLeft << "\" height=\"" << kBottom - kTop
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double v : nice_ticks(xa.lo, xa.hi)) {
    const double px = xa.to_px(v, kLeft, kRight);
    os << "<line x1=\"" << px << "\" y1=\"" << kBottom << "\" x2=\"" << px
       << "\" y2=\"" << kBottom + 6 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << px << "\" y=\"" << kBottom + 22
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << num_label(v) << "</text>\n";
  }
  for (double v : nice_ticks(ya.lo, ya.hi)) {
    const double py = ya.to_px(v, kBottom, kTop);
    os << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << py << "\" x2=\"" << kLeft
       << "\" y2=\"" << py << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << kLeft - 10 << "\" y=\"" << py + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
       << num_label(v) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 45
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << esc(xlabel) << "</text>\n"
     << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
        "transform=\"rotate(-90 20 "
     << (kTop + kBottom) / 2 << ")\">" << esc(ylabel) << "</text>\n";
}

void write_doc(const std::string& path, const std::ostringstream& os) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open SVG output file: " + path);
  out << os.str() << "</svg>\n";
}

} // namespace

void svg_doa_time(const std::string& path, const std::string& title,
                  const Eigen::MatrixXd& power, const std::vector<double>& grid_deg,
                  const std::vector<PointSeries>& scatter) {
  if (power.cols() != int(grid_deg.size()))
    throw std::invalid_argument("svg_doa_time: grid/power shape mismatch");
  const int t_max = int(power.rows());
  Axis xa{0.5, double(t_max) + 0.5};
  Axis ya{-90.0, 90.0};

  std::ostringstream os;
  open_doc(os, title);

  // dB-scaled grayscale heatmap, 30 dB dynamic range below the peak.
  const double pmax = std::max(power.maxCoeff(), 1e-300);
  const double cell_w = (kRight - kLeft) / double(t_max);
  const double cell_h = (kBottom - kTop) / double(grid_deg.size());
  for (int t = 0; t < t_max; ++t) {
    for (int gidx = 0; gidx < int(grid_deg.size()); ++gidx) {
      const double db =
          10.0 * std::log10(std::max(power(t, gidx), pmax * 1e-30) / pmax);
      const double lum = std::clamp(1.0 + db / 30.0, 0.0, 1.0); // 1 = peak
      const int shade = int(std::lround(255.0 * (1.0 - 0.85 * lum)));
      const double y_lo = ya.to_px(grid_deg[gidx], kBottom, kTop);
      os << "<rect x=\"" << kLeft + t * cell_w << "\" y=\"" << y_lo - cell_h
         << "\" width=\"" << cell_w + 0.5 << "\" height=\"" << cell_h + 0.5
         << "\" fill=\"rgb(" << shade << "," << shade << "," << shade
         << ")\"/>\n";
    }
  }

  int color = 0;
  double legend_y = kTop + 16.0;
  for (const PointSeries& ps : scatter) {
    const char* col = kPalette[color % 6];
    for (const XyPoint& p : ps.points) {
      os << "<circle cx=\"" << xa.to_px(p.x, kLeft, kRight) << "\" cy=\""
         << ya.to_px(p.y, kBottom, kTop) << "\" r=\"2.4\" fill=\"" << col
         << "\"/>\n";
    }
    os << "<circle cx=\"" << kRight - 150 << "\" cy=\"" << legend_y - 4
       << "\" r=\"4\" fill=\"" << col << "\"/>\n"
       << "<text x=\"" << kRight - 140 << "\" y=\"" << legend_y
       << "\" font-family=\"sans-serif\" font-size=\"13\">" << esc(ps.name)
       << "</text>\n";
    legend_y += 18.0;
    ++color;
  }
  draw_axes(os, xa, ya, "time step", "DOA [deg]");
  write_doc(path, os);
}

void svg_curves(const std::string& path, const std::string& title,
                const std::string& xlabel, const std::string& ylabel,
                const std::vector<double>& x, const std::vector<CurveSeries>& series) {
  if (x.empty()) throw std::invalid_argument("svg_curves: empty x grid");
  double ylo = 0.0, yhi = 1e-12;
  for (const CurveSeries& s : series) {
    if (s.y.size() != x.size())
      throw std::invalid_argument("svg_curves: series length mismatch");
    for (double v : s.y) {
      if (std::isfinite(v)) yhi = std::max(yhi, v);
    }
  }
  Axis xa{*std::min_element(x.begin(), x.end()),
          *std::max_element(x.begin(), x.end())};
  if (xa.lo == xa.hi) {
    xa.lo -= 1.0;
    xa.hi += 1.0;
  }
  Axis ya{ylo, yhi * 1.05};

  std::ostringstream os;
  open_doc(os, title);
  draw_axes(os, xa, ya, xlabel, ylabel);
  double legend_y = kTop + 16.0;
  for (size_t si = 0; si < series.size(); ++si) {
    const char* col = kPalette[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(series[si].y[i])) continue;
      os << xa.to_px(x[i], kLeft, kRight) << ","
         << ya.to_px(series[si].y[i], kBottom, kTop) << " ";
    }
    os << "\"/>\n";
    for (size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(series[si].y[i])) continue;
      os << "<circle cx=\"" << xa.to_px(x[i], kLeft, kRight) << "\" cy=\""
         << ya.to_px(series[si].y[i], kBottom, kTop) << "\" r=\"3\" fill=\"" << col
         << "\"/>\n";
    }
    os << "<line x1=\"" << kRight - 170 << "\" y1=\"" << legend_y - 4 << "\" x2=\""
       << kRight - 150 << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << col
       << "\" stroke-width=\"3\"/>\n"
       << "<text x=\"" << kRight - 143 << "\" y=\"" << legend_y
       << "\" font-family=\"sans-serif\" font-size=\"13\">" << esc(series[si].name)
       << "</text>\n";
    legend_y += 18.0;
  }
  write_doc(path, os);
}

} // namespace svalse
