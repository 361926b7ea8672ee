#include "checkseg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "checkseg/error.hpp"

namespace checkseg {
namespace {

struct Run {
    int begin = 0;
    int end = 0;  // exclusive
};

std::vector<Run> runs_above(const std::vector<int>& counts, int floor) {
    std::vector<Run> runs;
    int start = -1;
    for (int i = 0; i < static_cast<int>(counts.size()); ++i) {
        if (counts[i] > floor) {
            if (start < 0) start = i;
        } else if (start >= 0) {
            runs.push_back({start, i});
            start = -1;
        }
    }
    if (start >= 0) runs.push_back({start, static_cast<int>(counts.size())});
    return runs;
}

}  // namespace

Profile profile(const BitMask& mask, Axis axis) {
    Profile p;
    p.axis = axis;
    const int w = mask.width();
    const int h = mask.height();
    if (axis == Axis::Rows) {
        p.counts.assign(h, 0);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            const std::uint8_t* r = mask.row(y);
            int n = 0;
            for (int x = 0; x < w; ++x) n += r[x];
            p.counts[y] = n;
        }
    } else {
        p.counts.assign(w, 0);
        constexpr int kChunk = 64;
        const int chunks = (w + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(static)
        for (int c = 0; c < chunks; ++c) {
            const int x0 = c * kChunk;
            const int x1 = std::min(w, x0 + kChunk);
            for (int y = 0; y < h; ++y) {
                const std::uint8_t* r = mask.row(y);
                for (int x = x0; x < x1; ++x) p.counts[x] += r[x];
            }
        }
    }
    return p;
}

int nominal_band_height(double dpi) {
    return static_cast<int>(std::lround(16.0 * dpi / 25.4));
}

BandGeometry locate_marking_band(const BitMask& mask, double dpi, const BandOptions& options) {
    if (!(dpi > 0.0)) throw Error(ErrorCode::InvalidArgument, "dpi must be positive");
    const int nominal = nominal_band_height(dpi);
    const Profile rows = profile(mask, Axis::Rows);
    const int floor = static_cast<int>(std::floor(options.noise_floor * mask.width()));
    const std::vector<Run> runs = runs_above(rows.counts, floor);
    if (runs.empty()) throw Error(ErrorCode::BandNotFound, "no inked rows");

    const int min_gap = static_cast<int>(std::ceil(options.min_gap * nominal));
    Run band = runs.back();
    for (int i = static_cast<int>(runs.size()) - 2; i >= 0; --i) {
        if (band.begin - runs[i].end >= min_gap) break;
        band.begin = runs[i].begin;
    }

    const int limit = static_cast<int>(std::floor((1.0 - options.bottom_fraction) * mask.height()));
    if (band.end <= limit) {
        throw Error(ErrorCode::BandNotFound, "no inked rows in the bottom part of the check");
    }
    const int height = band.end - band.begin;
    if (height > options.max_height * nominal) {
        throw Error(ErrorCode::BandTooTall, "band of " + std::to_string(height) + " rows exceeds nominal " +
                                                std::to_string(nominal));
    }
    if (height < options.min_height * nominal) {
        throw Error(ErrorCode::BandNotFound, "bottom run of " + std::to_string(height) + " rows is too short for a " +
                                                 std::to_string(nominal) + "-row band");
    }
    return {{0, band.begin, mask.width(), height}, nominal};
}

namespace {

// Twice the center of each run, so distances stay integral.
std::vector<int> doubled_centers(const std::vector<Run>& runs) {
    std::vector<int> c;
    c.reserve(runs.size());
    for (const Run& r : runs) c.push_back(r.begin + r.end - 1);
    return c;
}

// Where to divide [from, to): the middle of its widest fully blank run, so
// faint sticks (a stroke that only inks one row) stay with their glyph.
int split_column(const std::vector<int>& counts, int from, int to) {
    int best_begin = from, best_len = 0;
    for (int x = from; x < to;) {
        if (counts[x]) {
            ++x;
            continue;
        }
        const int begin = x;
        while (x < to && !counts[x]) ++x;
        if (x - begin > best_len) {
            best_begin = begin;
            best_len = x - begin;
        }
    }
    return best_len ? best_begin + best_len / 2 : (from + to) / 2;
}

}  // namespace

// Measured center to center: thickening from blur or a low threshold eats
// into the blank runs but leaves stick centers in place. Adjacent sticks
// one unit apart sit two units apart center to center.
double estimate_stick_gap(const Profile& columns, int floor) {
    const std::vector<Run> inked = runs_above(columns.counts, floor);
    if (inked.size() < 2) return 0.0;
    const std::vector<int> c = doubled_centers(inked);
    std::vector<int> d;
    d.reserve(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] - c[i - 1]);
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + mid, d.end());
    double median = d[mid];
    if (d.size() % 2 == 0) {
        const int lower = *std::max_element(d.begin(), d.begin() + mid);
        median = (median + lower) / 2.0;
    }
    return median / 4.0;
}

BandSegmentation segment_band_characters(const BitMask& band, double gap_factor, double column_floor) {
    const Profile columns = profile(band, Axis::Columns);
    if (runs_above(columns.counts, 0).empty()) throw Error(ErrorCode::EmptyBand, "marking band holds no ink");
    // Columns touched only by a speck must not split or bridge a gap.
    const int floor = static_cast<int>(column_floor * band.height());
    std::vector<Run> inked = runs_above(columns.counts, floor);
    if (inked.empty()) inked = runs_above(columns.counts, 0);

    BandSegmentation seg;
    seg.stick_gap = estimate_stick_gap(columns, floor);
    // A blank of gap_factor units between one-unit sticks.
    const double cut = 2.0 * (gap_factor + 1.0) * seg.stick_gap;
    const std::vector<int> centers = doubled_centers(inked);

    // Column strips between cut points; boxes are the ink bounds inside each.
    std::vector<int> bounds{0};
    for (std::size_t i = 1; i < inked.size(); ++i) {
        if (seg.stick_gap > 0.0 && centers[i] - centers[i - 1] >= cut) {
            bounds.push_back(split_column(columns.counts, inked[i - 1].end, inked[i].begin));
        }
    }
    bounds.push_back(band.width());

    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        int x0 = band.width(), x1 = -1, y0 = band.height(), y1 = -1;
        for (int y = 0; y < band.height(); ++y) {
            const std::uint8_t* r = band.row(y);
            for (int x = bounds[k]; x < bounds[k + 1]; ++x) {
                if (!r[x]) continue;
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = y;
            }
        }
        if (x1 < 0) continue;
        seg.boxes.push_back({{x0, y0, x1 - x0 + 1, y1 - y0 + 1}, static_cast<int>(seg.boxes.size())});
    }
    return seg;
}

}  // namespace checkseg
