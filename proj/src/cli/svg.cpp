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

#include "wpd/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace wpd::cli {
namespace {

constexpr double kPanelW = 420;
constexpr double kPanelH = 300;
constexpr double kMarginL = 60;
constexpr double kMarginR = 20;
constexpr double kMarginT = 30;
constexpr double kMarginB = 45;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

/// Comment text must not contain "--".
std::string comment_safe(std::string s) {
    for (std::size_t p; (p = s.find("--")) != std::string::npos;) {
        s.replace(p, 2, "- -");
    }
    return s;
}

std::pair<double, double> data_range(const Panel &p, bool x_axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto &s : p.series) {
        const auto &v = x_axis ? s.x : s.y;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i])) {
                continue;
            }
            const double e = (!x_axis && i < s.y_err.size()) ? s.y_err[i] : 0;
            lo = std::min(lo, v[i] - e);
            hi = std::max(hi, v[i] + e);
        }
    }
    if (!std::isfinite(lo)) {
        return {0.0, 1.0};
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

/// About five round tick positions in [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step;
         t += step) {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void render_panel(std::ostringstream &os, const Panel &p, double ox,
                  double oy) {
    const auto [x0, x1] = p.x_range ? *p.x_range : data_range(p, true);
    const auto [y0, y1] = p.y_range ? *p.y_range : data_range(p, false);
    const double pw = kPanelW - kMarginL - kMarginR;
    const double ph = kPanelH - kMarginT - kMarginB;
    const double left = ox + kMarginL;
    const double top = oy + kMarginT;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    os << "<g>\n";
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
       << num(pw) << "\" height=\"" << num(ph)
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : ticks(x0, x1)) {
        os << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(top + ph)
           << "\" x2=\"" << num(sx(t)) << "\" y2=\"" << num(top + ph + 4)
           << "\" stroke=\"#333\"/>"
           << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(top + ph + 16)
           << "\" font-size=\"10\" text-anchor=\"middle\">" << tick_label(t)
           << "</text>\n";
    }
    for (double t : ticks(y0, y1)) {
        os << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(sy(t))
           << "\" x2=\"" << num(left) << "\" y2=\"" << num(sy(t))
           << "\" stroke=\"#333\"/>"
           << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(t) + 3)
           << "\" font-size=\"10\" text-anchor=\"end\">" << tick_label(t)
           << "</text>\n";
    }
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(oy + 18)
       << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(p.title)
       << "</text>\n";
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\""
       << num(oy + kPanelH - 8) << "\" font-size=\"11\" text-anchor=\"middle\">"
       << escape(p.x_label) << "</text>\n";
    os << "<text transform=\"translate(" << num(ox + 14) << ","
       << num(top + ph / 2)
       << ") rotate(-90)\" font-size=\"11\" text-anchor=\"middle\">"
       << escape(p.y_label) << "</text>\n";

    os << "<defs><clipPath id=\"c" << num(ox) << "_" << num(oy)
       << "\"><rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
       << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath></defs>\n";
    os << "<g clip-path=\"url(#c" << num(ox) << "_" << num(oy) << ")\">\n";
    for (const auto &s : p.series) {
        os << "<!-- series: " << comment_safe(s.name) << "\nx,y"
           << (s.y_err.empty() ? "" : ",y_err") << "\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            os << full(s.x[i]) << "," << full(s.y[i]);
            if (!s.y_err.empty()) {
                os << "," << full(s.y_err[i]);
            }
            os << "\n";
        }
        os << "-->\n";
        if (s.line) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color
               << "\" stroke-width=\"1.5\""
               << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                os << (i ? " " : "") << num(sx(s.x[i])) << ","
                   << num(sy(s.y[i]));
            }
            os << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i < s.y_err.size() && s.y_err[i] > 0) {
                    os << "<line x1=\"" << num(sx(s.x[i])) << "\" y1=\""
                       << num(sy(s.y[i] - s.y_err[i])) << "\" x2=\""
                       << num(sx(s.x[i])) << "\" y2=\""
                       << num(sy(s.y[i] + s.y_err[i])) << "\" stroke=\""
                       << s.color << "\"/>";
                }
                os << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\""
                   << num(sy(s.y[i])) << "\" r=\"3\" fill=\"" << s.color
                   << "\"/>\n";
            }
        }
    }
    os << "</g>\n";

    // Legend
    double ly = top + 12;
    for (const auto &s : p.series) {
        if (s.name.empty()) {
            continue;
        }
        os << "<rect x=\"" << num(left + pw - 110) << "\" y=\"" << num(ly - 8)
           << "\" width=\"10\" height=\"3\" fill=\"" << s.color << "\"/>"
           << "<text x=\"" << num(left + pw - 95) << "\" y=\"" << num(ly - 3)
           << "\" font-size=\"10\">" << escape(s.name) << "</text>\n";
        ly += 13;
    }
    os << "</g>\n";
}

} // namespace

std::string render_svg(const std::vector<Panel> &panels, unsigned columns,
                       const std::string &title) {
    columns = std::max(1U, columns);
    const auto n = static_cast<unsigned>(panels.size());
    const unsigned rows = std::max(1U, (n + columns - 1) / columns);
    const unsigned cols = std::min(columns, std::max(n, 1U));
    const double head = title.empty() ? 0.0 : 30.0;
    const double width = cols * kPanelW;
    const double height = rows * kPanelH + head;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
       << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width)
       << " " << num(height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        os << "<text x=\"" << num(width / 2)
           << "\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">"
           << escape(title) << "</text>\n";
    }
    for (unsigned i = 0; i < n; ++i) {
        render_panel(os, panels[i], (i % cols) * kPanelW,
                     head + (i / cols) * kPanelH);
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace wpd::cli
