#pragma once

#include <string>
#include <vector>

namespace prony::cli {

struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Scatter of true (open circles) against recovered (crosses) spectral points.
std::string scatter_svg(const std::vector<PlotPoint>& truth, const std::vector<PlotPoint>& recovered,
                        const std::string& x_label, const std::string& y_label);

}  // namespace prony::cli
