#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slitlab/error.hpp"

namespace slitlab::io {

inline constexpr std::size_t plot_columns = 80;
inline constexpr std::size_t plot_rows = 24;

namespace detail {
inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline void check_series(const std::vector<double>& xs, const std::vector<double>& ys)
{
    slitlab::detail::require(!xs.empty() && xs.size() == ys.size(), "plot: need matching, non-empty x and y");
}
} // namespace detail

/// 80x24 character plot. Each cell's glyph is proportional to the number of
/// points that land in it, on a " .:-=+*#%@" ramp. Two label lines follow.
inline std::string ascii_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                              std::string_view x_label = "x", std::string_view y_label = "y")
{
    detail::check_series(xs, ys);
    constexpr std::string_view ramp = " .:-=+*#%@";
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double xmin = *xmin_it;
    const double xmax = *xmax_it;
    const double ymin = std::min(0.0, *ymin_it);
    const double ymax = *ymax_it > ymin ? *ymax_it : ymin + 1.0;
    const double xspan = xmax > xmin ? xmax - xmin : 1.0;

    std::vector<std::size_t> grid(plot_columns * plot_rows, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto col = std::min<std::size_t>(
            plot_columns - 1, static_cast<std::size_t>((xs[i] - xmin) / xspan * plot_columns));
        const auto row_from_bottom = std::min<std::size_t>(
            plot_rows - 1, static_cast<std::size_t>((ys[i] - ymin) / (ymax - ymin) * plot_rows));
        ++grid[(plot_rows - 1 - row_from_bottom) * plot_columns + col];
    }
    const std::size_t densest = *std::max_element(grid.begin(), grid.end());

    std::string out;
    out.reserve((plot_columns + 1) * (plot_rows + 2) + 128);
    for (std::size_t r = 0; r < plot_rows; ++r) {
        for (std::size_t c = 0; c < plot_columns; ++c) {
            const std::size_t n = grid[r * plot_columns + c];
            // ceil(n / densest * top); any occupied cell is at least '.'
            const std::size_t level = densest ? (n * (ramp.size() - 1) + densest - 1) / densest : 0;
            out += ramp[level];
        }
        out += '\n';
    }
    out += std::string(x_label) + ": " + detail::fmt(xmin) + " .. " + detail::fmt(xmax) + '\n';
    out += std::string(y_label) + ": " + detail::fmt(ymin) + " .. " + detail::fmt(ymax) + '\n';
    return out;
}

/// Minimal SVG 1.1 line plot: frame, polyline and min/max labels.
inline std::string svg_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                            std::string_view x_label = "x", std::string_view y_label = "y",
                            std::string_view title = "")
{
    detail::check_series(xs, ys);
    constexpr double width = 800.0;
    constexpr double height = 500.0;
    constexpr double margin = 60.0;
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double xmin = *xmin_it;
    const double xspan = *xmax_it > xmin ? *xmax_it - xmin : 1.0;
    const double ymin = std::min(0.0, *ymin_it);
    const double yspan = *ymax_it > ymin ? *ymax_it - ymin : 1.0;
    const auto px = [&](double x) { return margin + (x - xmin) / xspan * (width - 2 * margin); };
    const auto py = [&](double y) { return height - margin - (y - ymin) / yspan * (height - 2 * margin); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
        << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
        << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << (i ? " " : "") << detail::fmt(px(xs[i])) << ',' << detail::fmt(py(ys[i]));
    }
    out << "\"/>\n";
    const auto text = [&](double x, double y, std::string_view anchor, const std::string& s) {
        out << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\""
            << anchor << "\">" << s << "</text>\n";
    };
    text(margin, height - margin + 20, "start", detail::fmt(xmin));
    text(width - margin, height - margin + 20, "end", detail::fmt(xmin + xspan));
    text(width / 2, height - 15, "middle", std::string(x_label));
    text(margin - 8, height - margin, "end", detail::fmt(ymin));
    text(margin - 8, margin + 5, "end", detail::fmt(ymin + yspan));
    text(margin - 8, height / 2, "end", std::string(y_label));
    if (!title.empty()) text(width / 2, margin - 20, "middle", std::string(title));
    out << "</svg>\n";
    return out.str();
}

} // namespace slitlab::io
