#pragma once

#include <string>
#include <utility>
#include <vector>

namespace linklouvain::tools {

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  // Points with non-positive coordinates on a log axis are skipped.
  std::vector<std::pair<double, double>> points;
  bool connect = false;
};

// A self-contained SVG document.
std::string render_svg(const Plot& plot);

}  // namespace linklouvain::tools
