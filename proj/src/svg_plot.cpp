#include "adrc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace adrc {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 260.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kGap = 50.0;
constexpr std::size_t kMaxPoints = 2000;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v, const char* f = "%.4g") {
    char buf[32];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo{std::numeric_limits<double>::infinity()};
    double hi{-std::numeric_limits<double>::infinity()};

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

double nice_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

} // namespace

void write_svg(std::ostream& out, const std::string& title, const std::string& x_label,
               const std::vector<PlotPanel>& panels) {
    const double height = kTop + static_cast<double>(panels.size()) * (kPanelHeight + kGap) + 10.0;
    const double plot_w = kWidth - kLeft - kRight;

    Range xr;
    for (const auto& p : panels)
        for (const auto& s : p.series)
            if (s.x && !s.x->empty()) xr.add(s.x->front()), xr.add(s.x->back());
    if (!(xr.lo <= xr.hi)) xr = Range{0.0, 1.0};
    if (xr.hi - xr.lo < 1e-12) xr.hi = xr.lo + 1.0;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const PlotPanel& panel = panels[pi];
        const double top = kTop + static_cast<double>(pi) * (kPanelHeight + kGap);
        Range yr;
        for (const auto& s : panel.series)
            if (s.y)
                for (double v : *s.y) yr.add(v);
        yr.finish();

        auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
        auto py = [&](double y) { return top + kPanelHeight - (y - yr.lo) / (yr.hi - yr.lo) * kPanelHeight; };

        out << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << kPanelHeight
            << "\" fill=\"none\" stroke=\"black\"/>\n";

        const double xs = nice_step(xr.hi - xr.lo);
        for (double x = std::ceil(xr.lo / xs) * xs; x <= xr.hi + 1e-9 * xs; x += xs) {
            out << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << top << "\" x2=\"" << fmt(px(x)) << "\" y2=\""
                << top + kPanelHeight << "\" stroke=\"#ddd\"/>\n";
            out << "<text x=\"" << fmt(px(x)) << "\" y=\"" << top + kPanelHeight + 15
                << "\" text-anchor=\"middle\">" << fmt(std::abs(x) < 1e-12 ? 0.0 : x) << "</text>\n";
        }
        const double ys = nice_step(yr.hi - yr.lo);
        for (double y = std::ceil(yr.lo / ys) * ys; y <= yr.hi + 1e-9 * ys; y += ys) {
            out << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
                << fmt(py(y)) << "\" stroke=\"#ddd\"/>\n";
            out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">"
                << fmt(std::abs(y) < 1e-12 ? 0.0 : y) << "</text>\n";
        }
        out << "<text x=\"18\" y=\"" << top + kPanelHeight / 2 << "\" transform=\"rotate(-90 18 "
            << top + kPanelHeight / 2 << ")\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const PlotSeries& s = panel.series[si];
            if (!s.x || !s.y || s.x->empty()) continue;
            const char* color = kPalette[si % std::size(kPalette)];
            const std::size_t n = std::min(s.x->size(), s.y->size());
            const std::size_t stride = std::max<std::size_t>(1, n / kMaxPoints);
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\"";
            if (s.dashed) out << " stroke-dasharray=\"5,4\"";
            out << " points=\"";
            for (std::size_t k = 0; k < n; k += stride) {
                const double yv = std::clamp((*s.y)[k], yr.lo, yr.hi);
                if (!std::isfinite(yv)) continue;
                out << fmt(px((*s.x)[k]), "%.2f") << ',' << fmt(py(yv), "%.2f") << ' ';
            }
            out << "\"/>\n";
            const double ly = top + 14.0 + 16.0 * static_cast<double>(si);
            out << "<line x1=\"" << kLeft + plot_w + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + plot_w + 30
                << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << kLeft + plot_w + 35 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
        }
    }
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
        << escape(x_label) << "</text>\n";
    out << "</svg>\n";
}

} // namespace adrc
