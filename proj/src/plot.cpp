#include "genlearn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "genlearn/error.hpp"

namespace genlearn {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string render_svg(const std::string& csv, const PlotOptions& opt, int* skipped) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw invalid_input("plot: empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw invalid_input("plot: no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  if (opt.y.empty()) throw invalid_input("plot: no y columns");
  const std::size_t xc = column(opt.x);
  std::vector<std::size_t> yc;
  for (const auto& y : opt.y) yc.push_back(column(y));

  std::vector<std::vector<std::pair<double, double>>> series(yc.size());
  int dropped = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    auto parse = [&](std::size_t c, bool log, double& v) {
      if (c >= cells.size()) return false;
      char* end = nullptr;
      v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || !std::isfinite(v)) return false;
      if (log) {
        if (v <= 0.0) return false;
        v = std::log10(v);
      }
      return true;
    };
    double x;
    if (!parse(xc, opt.log_x, x)) {
      ++dropped;
      continue;
    }
    for (std::size_t s = 0; s < yc.size(); ++s) {
      double y;
      if (parse(yc[s], opt.log_y, y)) {
        series[s].emplace_back(x, y);
      } else {
        ++dropped;
      }
    }
  }
  if (skipped) *skipped = dropped;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;

  const double w = 640, h = 400, left = 70, right = 160, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };
  auto label = [](double v, bool log) { return tick(log ? std::pow(10.0, v) : v); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\">"
       << opt.title << "</text>\n";
  }
  os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(top + ph + 18)
       << "\" text-anchor=\"middle\">" << label(xv, opt.log_x) << "</text>\n";
    os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(yv) + 4)
       << "\" text-anchor=\"end\">" << label(yv, opt.log_y) << "</text>\n";
  }
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(h - 10)
     << "\" text-anchor=\"middle\">" << opt.x << (opt.log_x ? " (log)" : "") << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof *kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].size(); ++i) {
      os << (i ? " " : "") << fmt(px(series[s][i].first)) << ',' << fmt(py(series[s][i].second));
    }
    os << "\"/>\n";
    const double ly = top + 16 + 18 * s;
    os << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
       << fmt(left + pw + 36) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(left + pw + 42) << "\" y=\"" << fmt(ly) << "\">" << opt.y[s]
       << (opt.log_y ? " (log)" : "") << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace genlearn
