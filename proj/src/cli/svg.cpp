#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace prony::cli {

namespace {
constexpr double width = 480.0;
constexpr double height = 360.0;
constexpr double margin = 48.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}
}  // namespace

std::string scatter_svg(const std::vector<PlotPoint>& truth, const std::vector<PlotPoint>& recovered,
                        const std::string& x_label, const std::string& y_label) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto* set : {&truth, &recovered})
        for (const auto& p : *set) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    const double px = std::max(0.05 * (x1 - x0), 1e-3), py = std::max(0.05 * (y1 - y0), 1e-3);
    x0 -= px, x1 += px, y0 -= py, y1 += py;

    auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2.0 * margin); };
    auto sy = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2.0 * margin); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<rect x=\"" + fmt(margin) + "\" y=\"" + fmt(margin) + "\" width=\"" + fmt(width - 2.0 * margin) +
         "\" height=\"" + fmt(height - 2.0 * margin) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    s += "<text x=\"" + fmt(width / 2.0) + "\" y=\"" + fmt(height - 12.0) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_label) + "</text>\n";
    s += "<text x=\"14\" y=\"" + fmt(height / 2.0) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
         fmt(height / 2.0) + ")\">" + escape(y_label) + "</text>\n";
    for (const double x : {x0 + px, x1 - px}) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", x);
        s += "<text x=\"" + fmt(sx(x)) + "\" y=\"" + fmt(height - margin + 16.0) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + buf + "</text>\n";
    }
    for (const double y : {y0 + py, y1 - py}) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", y);
        s += "<text x=\"" + fmt(margin - 6.0) + "\" y=\"" + fmt(sy(y) + 4.0) +
             "\" text-anchor=\"end\" font-size=\"10\">" + buf + "</text>\n";
    }
    for (const auto& p : truth)
        s += "<circle cx=\"" + fmt(sx(p.x)) + "\" cy=\"" + fmt(sy(p.y)) +
             "\" r=\"6\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    for (const auto& p : recovered) {
        const double cx = sx(p.x), cy = sy(p.y);
        s += "<path d=\"M" + fmt(cx - 4.0) + " " + fmt(cy - 4.0) + "L" + fmt(cx + 4.0) + " " + fmt(cy + 4.0) + "M" +
             fmt(cx - 4.0) + " " + fmt(cy + 4.0) + "L" + fmt(cx + 4.0) + " " + fmt(cy - 4.0) +
             "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    }
    s += "<circle cx=\"" + fmt(width - margin - 110.0) + "\" cy=\"24\" r=\"5\" fill=\"none\" stroke=\"#1f77b4\"/>\n";
    s += "<text x=\"" + fmt(width - margin - 100.0) + "\" y=\"28\" font-size=\"11\">true</text>\n";
    s += "<path d=\"M" + fmt(width - margin - 54.0) + " 20L" + fmt(width - margin - 46.0) + " 28M" +
         fmt(width - margin - 54.0) + " 28L" + fmt(width - margin - 46.0) + " 20\" stroke=\"#d62728\"/>\n";
    s += "<text x=\"" + fmt(width - margin - 40.0) + "\" y=\"28\" font-size=\"11\">recovered</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace prony::cli
