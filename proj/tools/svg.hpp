#pragma once

#include <string>
#include <vector>

namespace spike::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;
};

/// Line plot with axes, ticks and a legend. Output depends only on the inputs.
std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series);

}  // namespace spike::svg
