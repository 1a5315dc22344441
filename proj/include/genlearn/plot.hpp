#pragma once

#include <string>
#include <vector>

namespace genlearn {

struct PlotOptions {
  std::string x;
  std::vector<std::string> y;
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

// Line chart of CSV columns as standalone SVG text: one polyline per y
// column plus a legend. Rows with a nonpositive value on a log axis (or a
// non-numeric cell) are skipped and counted in `skipped`.
std::string render_svg(const std::string& csv, const PlotOptions& opt,
                       int* skipped = nullptr);

}  // namespace genlearn
