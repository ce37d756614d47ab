#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hapticsim/textio.hpp"

// Minimal SVG line charts for the report outputs; no styling knobs beyond
// what the step-response plots need.

namespace hapticsim {

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<std::pair<double, double>> points;
};

inline std::string svg_line_chart(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<SvgSeries>& series,
                                  int width = 720, int height = 420) {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    }
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    y_min = std::min(y_min, 0.0);
    y_max *= 1.05;

    const double ml = 60, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;
    auto px = [&](double x) { return ml + pw * (x - x_min) / (x_max - x_min); };
    auto py = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fixed(width / 2.0, 1) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + title + "</text>\n";

    // Axes box and ticks.
    out += "<rect x=\"" + fixed(ml, 1) + "\" y=\"" + fixed(mt, 1) + "\" width=\"" +
           fixed(pw, 1) + "\" height=\"" + fixed(ph, 1) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x_min + (x_max - x_min) * i / 5.0;
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        out += "<text x=\"" + fixed(px(xv), 1) + "\" y=\"" + fixed(mt + ph + 18, 1) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fixed(xv, 2) + "</text>\n";
        out += "<text x=\"" + fixed(ml - 6, 1) + "\" y=\"" + fixed(py(yv) + 4, 1) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fixed(yv, 2) + "</text>\n";
        out += "<line x1=\"" + fixed(ml, 1) + "\" y1=\"" + fixed(py(yv), 1) +
               "\" x2=\"" + fixed(ml + pw, 1) + "\" y2=\"" + fixed(py(yv), 1) +
               "\" stroke=\"#ddd\"/>\n";
    }
    out += "<text x=\"" + fixed(ml + pw / 2.0, 1) + "\" y=\"" +
           fixed(height - 12.0, 1) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + fixed(mt + ph / 2.0, 1) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " + fixed(mt + ph / 2.0, 1) + ")\">" +
           y_label + "</text>\n";

    double legend_y = mt + 16;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        std::string pts;
        for (const auto& [x, y] : s.points) {
            pts += fixed(px(x), 2) + "," + fixed(py(y), 2) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        out += "<text x=\"" + fixed(ml + pw - 8, 1) + "\" y=\"" + fixed(legend_y, 1) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"" + s.color + "\">" + s.label + "</text>\n";
        legend_y += 16;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace hapticsim
