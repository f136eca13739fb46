#pragma once

#include <string>
#include <vector>

namespace treemem::bench {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal SVG line chart; y is drawn over [y_min, y_max].
std::string line_chart(const std::vector<Series>& series, const std::string& title, double y_min = 0.0,
                       double y_max = 1.0);

}  // namespace treemem::bench
