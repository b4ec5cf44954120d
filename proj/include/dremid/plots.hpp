#pragma once

#include <string>
#include <vector>

namespace dremid {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Writes a self-contained SVG line plot (no external tooling needed to view
// the results). Output is deterministic for identical inputs.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace dremid
