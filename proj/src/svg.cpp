#include "gmc/svg.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>

namespace gmc {

namespace {

// Diverging blue-white-red map over [-1, 1].
void heat_color(double v, int& r, int& g, int& b) {
    v = std::clamp(v, -1.0, 1.0);
    const int lo_r = 59, lo_g = 76, lo_b = 192;   // -1
    const int hi_r = 180, hi_g = 4, hi_b = 38;    // +1
    if (v < 0.0) {
        const double t = v + 1.0; // 0 at -1, 1 at 0
        r = static_cast<int>(lo_r + t * (255 - lo_r));
        g = static_cast<int>(lo_g + t * (255 - lo_g));
        b = static_cast<int>(lo_b + t * (255 - lo_b));
    } else {
        r = static_cast<int>(255 + v * (hi_r - 255));
        g = static_cast<int>(255 + v * (hi_g - 255));
        b = static_cast<int>(255 + v * (hi_b - 255));
    }
}

void appendf(std::string& out, const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    out += buf;
}

} // namespace

std::string surface_to_svg(const CorrelationSurface& surface, const std::string& title) {
    const int g = surface.grid_size;
    const int cell = 10;
    const int margin_l = 60, margin_b = 40, margin_t = 30, margin_r = 20;
    const int plot = g * cell;
    const int width = margin_l + plot + margin_r;
    const int height = margin_t + plot + margin_b;

    std::string out;
    out.reserve(static_cast<std::size_t>(g) * g * 64);
    appendf(out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
            "viewBox=\"0 0 %d %d\">\n",
            width, height, width, height);
    out += "<style>text { font-family: sans-serif; font-size: 12px; }</style>\n";
    appendf(out, "<text x=\"%d\" y=\"18\" text-anchor=\"middle\">%s</text>\n",
            margin_l + plot / 2, title.c_str());

    // Grid cells: qs left-to-right, qd bottom-to-top.
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            int r, gg, b;
            heat_color(surface.value(i, j), r, gg, b);
            const int x = margin_l + i * cell;
            const int y = margin_t + (g - 1 - j) * cell;
            appendf(out, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,%d)\"/>\n",
                    x, y, cell, cell, r, gg, b);
        }
    }

    appendf(out, "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">MOS</text>\n",
            margin_l + plot / 2, margin_t + plot + 32);
    appendf(out, "<text x=\"%d\" y=\"%d\">%.4g</text>\n", margin_l, margin_t + plot + 16,
            surface.qs_range.lo);
    appendf(out, "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%.4g</text>\n", margin_l + plot,
            margin_t + plot + 16, surface.qs_range.hi);

    appendf(out,
            "<text x=\"16\" y=\"%d\" text-anchor=\"middle\" "
            "transform=\"rotate(-90 16 %d)\">|dMOS|</text>\n",
            margin_t + plot / 2, margin_t + plot / 2);
    appendf(out, "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%.4g</text>\n", margin_l - 6,
            margin_t + plot, surface.qd_range.lo);
    appendf(out, "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%.4g</text>\n", margin_l - 6,
            margin_t + 12, surface.qd_range.hi);

    out += "</svg>\n";
    return out;
}

} // namespace gmc
