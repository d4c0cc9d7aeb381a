// Copyright 2026 The wpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Minimal standalone SVG line/scatter plots. Each plot embeds its series as
 * CSV tables inside XML comments, so the numbers can be recovered from the
 * file without a renderer.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wpd::cli {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_err; ///< empty, or one per point
    bool line = true;          ///< polyline; otherwise markers
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    /// Fixed axis ranges; computed from the data when absent.
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::pair<double, double>> y_range;
};

/// Panels laid out row-major in `columns` columns.
std::string render_svg(const std::vector<Panel> &panels, unsigned columns = 1,
                       const std::string &title = "");

} // namespace wpd::cli
