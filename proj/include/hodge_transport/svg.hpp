#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "hodge_transport/common.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Self-contained SVG heatmaps with a fixed 256-step viridis-like colormap
// (piecewise-linear through the standard anchor colors, baked at header
// parse time). Masked cells render gray.
// ---------------------------------------------------------------------------

namespace detail {

struct Rgb {
    double r, g, b;
};

inline const std::array<Rgb, 256>& viridis_table() {
    static const std::array<Rgb, 256> table = [] {
        // Anchor colors of the viridis ramp.
        constexpr Rgb anchors[] = {
            {0.267004, 0.004874, 0.329415}, {0.282623, 0.140926, 0.457517},
            {0.253935, 0.265254, 0.529983}, {0.206756, 0.371758, 0.553117},
            {0.163625, 0.471133, 0.558148}, {0.127568, 0.566949, 0.550556},
            {0.134692, 0.658636, 0.517649}, {0.266941, 0.748751, 0.440573},
            {0.477504, 0.821444, 0.318195}, {0.741388, 0.873449, 0.149561},
            {0.993248, 0.906157, 0.143936}};
        constexpr int n_anchor = sizeof(anchors) / sizeof(anchors[0]);
        std::array<Rgb, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double s = i / 255.0 * (n_anchor - 1);
            const int lo = std::min(n_anchor - 2, static_cast<int>(s));
            const double f = s - lo;
            t[i] = {anchors[lo].r + f * (anchors[lo + 1].r - anchors[lo].r),
                    anchors[lo].g + f * (anchors[lo + 1].g - anchors[lo].g),
                    anchors[lo].b + f * (anchors[lo + 1].b - anchors[lo].b)};
        }
        return t;
    }();
    return table;
}

inline std::string hex_color(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(255.0 * c.r)),
                  static_cast<int>(std::lround(255.0 * c.g)),
                  static_cast<int>(std::lround(255.0 * c.b)));
    return buf;
}

}  // namespace detail

/// Writes a heatmap of `values` (row-major nd x nt, d on the vertical axis
/// increasing upward) with masked cells gray.
inline void save_heatmap_svg(const std::string& path, const std::vector<double>& values,
                             const std::vector<char>& mask, int nd, int nt,
                             const std::string& title) {
    if (static_cast<int>(values.size()) != nd * nt || values.size() != mask.size())
        throw InvalidInputError("save_heatmap_svg: shape mismatch");
    double vmax = 0.0;
    for (int idx = 0; idx < nd * nt; ++idx) {
        if (mask[idx]) vmax = std::max(vmax, values[idx]);
    }
    if (vmax <= 0.0) vmax = 1.0;

    const int cell = 12, margin = 40;
    const int width = margin * 2 + nt * cell;
    const int height = margin * 2 + nd * cell;
    std::ofstream out(path);
    if (!out) throw Error("save_heatmap_svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"monospace\" "
           "font-size=\"14\">"
        << title << "</text>\n";
    const auto& table = detail::viridis_table();
    for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nt; ++j) {
            const int idx = i * nt + j;
            std::string color = "#cccccc";
            if (mask[idx]) {
                const int level = std::clamp(
                    static_cast<int>(std::lround(255.0 * values[idx] / vmax)), 0, 255);
                color = detail::hex_color(table[level]);
            }
            const int x = margin + j * cell;
            const int y = margin + (nd - 1 - i) * cell;
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"" << color << "\"/>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace hodge_transport
