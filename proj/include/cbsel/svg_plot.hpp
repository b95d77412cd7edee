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
#ifndef CBSEL_SVG_PLOT_HPP
#define CBSEL_SVG_PLOT_HPP

#include <string>
#include <vector>

namespace cbsel {

struct PlotSeries
{
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool markers_only = false;
};

struct PlotPanel
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    bool log_y = false;
};

/// Empirical CDF points (sorted values, i / n for i = 1..n).
PlotSeries empirical_cdf(const std::string &name, std::vector<double> values);

/// Self-contained SVG document with the panels stacked vertically.
/// Throws ConfigError if there is nothing to draw.
std::string render_svg(const std::vector<PlotPanel> &panels, const std::string &caption = {});

} // namespace cbsel

#endif
