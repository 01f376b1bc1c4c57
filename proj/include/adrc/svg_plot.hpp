#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adrc {

struct PlotSeries {
    std::string label;
    const std::vector<double>* x{nullptr};
    const std::vector<double>* y{nullptr};
    bool dashed{false};
};

struct PlotPanel {
    std::string y_label;
    std::vector<PlotSeries> series;
};

// Stacked line-chart panels sharing the x axis, auto-scaled, with a legend.
void write_svg(std::ostream& out, const std::string& title, const std::string& x_label,
               const std::vector<PlotPanel>& panels);

} // namespace adrc
