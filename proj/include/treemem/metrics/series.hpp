#pragma once

#include "treemem/core/mask.hpp"

#include <span>
#include <string>
#include <vector>

namespace treemem::metrics {

struct FrameScore {
    int time = 0;
    double j = 0.0;
    double f = 0.0;
    double jf = 0.0;

    static FrameScore make(int time, double j, double f) { return {time, j, f, (j + f) / 2.0}; }
};

/// J, F and J&F for one frame, with F at `tolerance_px` (negative = default).
FrameScore score_frame(int time, const Mask& pred, const Mask& gt, int tolerance_px = -1);

struct SegmentMean {
    int first_time = 0;
    int last_time = 0;
    double j = 0.0;
    double f = 0.0;
    double jf = 0.0;
};

struct Summary {
    double mean_j = 0.0;
    double mean_f = 0.0;
    double mean_jf = 0.0;
    std::vector<SegmentMean> segments;
};

/// Equal-width partition of [0, n) into min(count, n) parts; the last part
/// absorbs the remainder. Returns [begin, end) index pairs.
std::vector<std::pair<int, int>> segment_bounds(int n, int count);

/// Arithmetic means over the series and over each temporal segment.
/// Throws DomainError on an empty series or segment_count < 1.
Summary summarize(std::span<const FrameScore> scores, int segment_count);

/// `time,j,f,jf` header plus one row per frame at 6 decimals.
std::string to_csv(std::span<const FrameScore> scores);

/// Parses to_csv output. Throws ParseError.
std::vector<FrameScore> parse_csv(const std::string& text);

}  // namespace treemem::metrics
