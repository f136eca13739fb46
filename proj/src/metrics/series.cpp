#include "treemem/metrics/series.hpp"

#include "treemem/core/errors.hpp"
#include "treemem/metrics/contour.hpp"
#include "treemem/metrics/region.hpp"

#include <cstdio>
#include <sstream>

namespace treemem::metrics {

FrameScore score_frame(int time, const Mask& pred, const Mask& gt, int tolerance_px) {
    const double j = region_j(pred, gt);
    const double f = tolerance_px < 0 ? contour_f(pred, gt) : contour_f(pred, gt, tolerance_px);
    return FrameScore::make(time, j, f);
}

std::vector<std::pair<int, int>> segment_bounds(int n, int count) {
    if (n < 1) throw DomainError("segment_bounds: empty range");
    if (count < 1) throw DomainError("segment_bounds: segment count must be at least 1");
    const int parts = std::min(count, n);
    const int width = n / parts;
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < parts; ++i) {
        const int begin = i * width;
        const int end = i + 1 == parts ? n : begin + width;
        out.emplace_back(begin, end);
    }
    return out;
}

Summary summarize(std::span<const FrameScore> scores, int segment_count) {
    if (scores.empty()) throw DomainError("summarize: empty series");
    auto mean_over = [&](int begin, int end) {
        SegmentMean m;
        m.first_time = scores[begin].time;
        m.last_time = scores[end - 1].time;
        for (int i = begin; i < end; ++i) {
            m.j += scores[i].j;
            m.f += scores[i].f;
            m.jf += scores[i].jf;
        }
        const double n = end - begin;
        m.j /= n;
        m.f /= n;
        m.jf /= n;
        return m;
    };
    Summary s;
    const int n = static_cast<int>(scores.size());
    const auto all = mean_over(0, n);
    s.mean_j = all.j;
    s.mean_f = all.f;
    s.mean_jf = all.jf;
    for (const auto& [b, e] : segment_bounds(n, segment_count)) s.segments.push_back(mean_over(b, e));
    return s;
}

std::string to_csv(std::span<const FrameScore> scores) {
    std::string out = "time,j,f,jf\n";
    char row[128];
    for (const auto& s : scores) {
        std::snprintf(row, sizeof row, "%d,%.6f,%.6f,%.6f\n", s.time, s.j, s.f, s.jf);
        out += row;
    }
    return out;
}

std::vector<FrameScore> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "time,j,f,jf") throw ParseError("per-frame CSV: bad header");
    std::vector<FrameScore> out;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        FrameScore s;
        char tail = 0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf%c", &s.time, &s.j, &s.f, &s.jf, &tail) != 4) {
            throw ParseError("per-frame CSV: malformed row " + std::to_string(row));
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace treemem::metrics
