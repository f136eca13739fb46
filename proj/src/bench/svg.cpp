#include "treemem/bench/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace treemem::bench {

namespace {

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title, double y_min, double y_max) {
    const double w = 640, h = 320, left = 50, right = 130, top = 30, bottom = 30;
    double x_min = 0, x_max = 1;
    bool first = true;
    for (const auto& s : series) {
        for (double x : s.x) {
            x_min = first ? x : std::min(x_min, x);
            x_max = first ? x : std::max(x_max, x);
            first = false;
        }
    }
    if (x_max <= x_min) x_max = x_min + 1;
    if (y_max <= y_min) y_max = y_min + 1;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (w - left - right); };
    auto py = [&](double y) { return h - bottom - (y - y_min) / (y_max - y_min) * (h - top - bottom); };

    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "font-family=\"sans-serif\" font-size=\"11\">\n",
                  w, h);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"18\">", left);
    out += buf + escape(title) + "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<path d=\"M%.1f %.1f V%.1f H%.1f\" stroke=\"black\" fill=\"none\"/>\n", left, top,
                  h - bottom, w - right);
    out += buf;
    for (int i = 0; i <= 4; ++i) {
        const double v = y_min + (y_max - y_min) * i / 4.0;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n", left - 4,
                      py(v) + 4, v);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\">%.0f</text>\n", left, h - 10, x_min);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.0f</text>\n", w - right,
                  h - 10, x_max);
    out += buf;

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* colour = kColours[i % (sizeof kColours / sizeof *kColours)];
        std::string d;
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            const double y = std::clamp(s.y[k], y_min, y_max);
            std::snprintf(buf, sizeof buf, "%s%.1f %.1f", k == 0 ? "M" : " L", px(s.x[k]), py(y));
            d += buf;
        }
        out += "<path d=\"" + d + "\" stroke=\"" + colour + "\" fill=\"none\" stroke-width=\"1.2\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">", w - right + 8,
                      top + 14.0 * static_cast<double>(i + 1), colour);
        out += buf + escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace treemem::bench
