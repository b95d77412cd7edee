// SPDX-License-Identifier: Apache-2.0
//
// cbsel: UE-assisted adaptive codebook selection laboratory
// Copyright (C) 2026 The cbsel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "cbsel/svg_plot.hpp"

#include "cbsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cbsel {

namespace {

constexpr double panel_width = 640.0;
constexpr double panel_height = 360.0;
constexpr double margin_left = 70.0;
constexpr double margin_right = 150.0;
constexpr double margin_top = 40.0;
constexpr double margin_bottom = 50.0;

const char *const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string coord(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string &text)
{
    std::string out;
    for (char c : text) {
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

struct Bounds
{
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity();
    double y1 = -std::numeric_limits<double>::infinity();
};

void draw_panel(std::ostringstream &svg, const PlotPanel &panel, double top)
{
    auto ty = [&](double y) { return panel.log_y ? std::log10(std::max(y, 1e-300)) : y; };
    Bounds b;
    for (const auto &s : panel.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (panel.log_y && s.y[i] <= 0))
                continue;
            b.x0 = std::min(b.x0, s.x[i]);
            b.x1 = std::max(b.x1, s.x[i]);
            b.y0 = std::min(b.y0, ty(s.y[i]));
            b.y1 = std::max(b.y1, ty(s.y[i]));
        }
    if (!(b.x0 <= b.x1))
        b = {0.0, 1.0, 0.0, 1.0};
    if (b.x1 - b.x0 < 1e-12) {
        b.x0 -= 0.5;
        b.x1 += 0.5;
    }
    if (b.y1 - b.y0 < 1e-12) {
        b.y0 -= 0.5;
        b.y1 += 0.5;
    }

    const double w = panel_width - margin_left - margin_right;
    const double h = panel_height - margin_top - margin_bottom;
    const double left = margin_left;
    const double plot_top = top + margin_top;
    auto px = [&](double x) { return left + (x - b.x0) / (b.x1 - b.x0) * w; };
    auto py = [&](double y) { return plot_top + h - (ty(y) - b.y0) / (b.y1 - b.y0) * h; };

    svg << "<g>\n";
    svg << "<text x=\"" << coord(left + w / 2) << "\" y=\"" << coord(top + 24)
        << "\" text-anchor=\"middle\" font-size=\"15\">" << escape(panel.title) << "</text>\n";
    svg << "<rect x=\"" << coord(left) << "\" y=\"" << coord(plot_top) << "\" width=\"" << coord(w) << "\" height=\""
        << coord(h) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = b.x0 + (b.x1 - b.x0) * i / 4.0;
        const double fy = b.y0 + (b.y1 - b.y0) * i / 4.0;
        const double xpix = left + w * i / 4.0;
        const double ypix = plot_top + h - h * i / 4.0;
        svg << "<line x1=\"" << coord(xpix) << "\" y1=\"" << coord(plot_top) << "\" x2=\"" << coord(xpix) << "\" y2=\""
            << coord(plot_top + h) << "\" stroke=\"#ddd\"/>\n";
        svg << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(ypix) << "\" x2=\"" << coord(left + w) << "\" y2=\""
            << coord(ypix) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << coord(xpix) << "\" y=\"" << coord(plot_top + h + 16)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx) << "</text>\n";
        svg << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(ypix + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(panel.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    svg << "<text x=\"" << coord(left + w / 2) << "\" y=\"" << coord(plot_top + h + 38)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.x_label) << "</text>\n";
    svg << "<text x=\"" << coord(18) << "\" y=\"" << coord(plot_top + h / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << coord(plot_top + h / 2) << ")\">" << escape(panel.y_label) << "</text>\n";

    for (std::size_t k = 0; k < panel.series.size(); ++k) {
        const auto &s = panel.series[k];
        const char *color = palette[k % (sizeof palette / sizeof palette[0])];
        if (s.markers_only) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << "<circle cx=\"" << coord(px(s.x[i])) << "\" cy=\"" << coord(py(s.y[i])) << "\" r=\"4\" fill=\""
                    << color << "\"/>\n";
        } else if (!s.x.empty()) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << (i ? " " : "") << coord(px(s.x[i])) << ',' << coord(py(s.y[i]));
            svg << "\"/>\n";
        }
        const double ly = plot_top + 14 + 18.0 * static_cast<double>(k);
        svg << "<rect x=\"" << coord(left + w + 12) << "\" y=\"" << coord(ly - 9) << "\" width=\"12\" height=\"10\" fill=\""
            << color << "\"/>\n";
        svg << "<text x=\"" << coord(left + w + 30) << "\" y=\"" << coord(ly) << "\" font-size=\"11\">" << escape(s.name)
            << "</text>\n";
    }
    svg << "</g>\n";
}

} // namespace

PlotSeries empirical_cdf(const std::string &name, std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    PlotSeries s;
    s.name = name;
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.x.push_back(values[i]);
        s.y.push_back(static_cast<double>(i + 1) / n);
    }
    return s;
}

std::string render_svg(const std::vector<PlotPanel> &panels, const std::string &caption)
{
    bool any = false;
    for (const auto &p : panels)
        for (const auto &s : p.series)
            any = any || !s.x.empty();
    if (!any)
        throw ConfigError("plot: nothing to draw");

    const double caption_height = caption.empty() ? 0.0 : 24.0;
    const double height = panel_height * static_cast<double>(panels.size()) + caption_height;
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(panel_width) << "\" height=\"" << coord(height)
        << "\" viewBox=\"0 0 " << coord(panel_width) << ' ' << coord(height) << "\" font-family=\"sans-serif\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        draw_panel(svg, panels[i], panel_height * static_cast<double>(i));
    if (!caption.empty())
        svg << "<text x=\"8\" y=\"" << coord(height - 8) << "\" font-size=\"10\" fill=\"#555\">" << escape(caption)
            << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace cbsel
