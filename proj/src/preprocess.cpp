#include "checkseg/preprocess.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "checkseg/error.hpp"

namespace checkseg {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct InkCloud {
    std::vector<float> dx;
    std::vector<float> dy;
    double cy = 0.0;
    int height = 0;
};

InkCloud collect_ink(const BitMask& mask) {
    InkCloud cloud;
    cloud.height = mask.height();
    cloud.cy = (mask.height() - 1) / 2.0;
    const double cx = (mask.width() - 1) / 2.0;
    for (int y = 0; y < mask.height(); ++y) {
        const std::uint8_t* r = mask.row(y);
        for (int x = 0; x < mask.width(); ++x) {
            if (r[x]) {
                cloud.dx.push_back(static_cast<float>(x - cx));
                cloud.dy.push_back(static_cast<float>(y - cloud.cy));
            }
        }
    }
    return cloud;
}

double profile_variance(const InkCloud& cloud, double angle_deg, std::vector<int>& rows) {
    rows.assign(cloud.height, 0);
    const double s = std::sin(angle_deg * kDegToRad);
    const double c = std::cos(angle_deg * kDegToRad);
    // Row of each ink centre after rotating by -angle, halves rounding up.
    for (std::size_t i = 0; i < cloud.dx.size(); ++i) {
        const double v = std::floor(cloud.cy + cloud.dx[i] * s + cloud.dy[i] * c + 0.5);
        if (v >= 0.0 && v < cloud.height) ++rows[static_cast<int>(v)];
    }
    double sum = 0.0, sum_sq = 0.0;
    for (int v : rows) {
        sum += v;
        sum_sq += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(cloud.height);
    const double mean = sum / n;
    return sum_sq / n - mean * mean;
}

struct Candidate {
    int index = 0;
    double score = -1.0;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::abs(a.index) < std::abs(b.index);
}

Candidate search(const InkCloud& cloud, const std::vector<int>& indices, double step) {
    std::vector<double> scores(indices.size());
#pragma omp parallel
    {
        std::vector<int> rows;
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(indices.size()); ++i) {
            scores[i] = profile_variance(cloud, indices[i] * step, rows);
        }
    }
    Candidate best;
    best.index = indices.front();
    best.score = scores.front();
    for (std::size_t i = 1; i < indices.size(); ++i) {
        const Candidate c{indices[i], scores[i]};
        if (better(c, best)) best = c;
    }
    return best;
}

template <typename Sample>
void rotate_rows(int width, int height, double angle_deg, Sample&& sample) {
    const double s = std::sin(angle_deg * kDegToRad);
    const double c = std::cos(angle_deg * kDegToRad);
    const double cx = (width - 1) / 2.0;
    const double cy = (height - 1) / 2.0;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        const double yy = y - cy;
        for (int x = 0; x < width; ++x) {
            const double xx = x - cx;
            sample(x, y, cx + c * xx - s * yy, cy + s * xx + c * yy);
        }
    }
}

}  // namespace

double skew_objective(const BitMask& mask, double angle_deg) {
    const InkCloud cloud = collect_ink(mask);
    std::vector<int> rows;
    return profile_variance(cloud, angle_deg, rows);
}

SkewEstimate estimate_skew(const BitMask& mask, const SkewOptions& options) {
    if (!(options.step_deg > 0.0)) throw Error(ErrorCode::InvalidArgument, "skew step must be positive");
    if (options.half_range_deg < 0.0) throw Error(ErrorCode::InvalidArgument, "skew range must be non-negative");
    const InkCloud cloud = collect_ink(mask);
    if (cloud.dx.empty()) throw Error(ErrorCode::NoInk, "cannot estimate skew of an empty mask");

    const double step = options.step_deg;
    const int max_index = static_cast<int>(std::floor(options.half_range_deg / step + 1e-9));
    const int stride = std::max(1, static_cast<int>(std::lround(options.coarse_step_deg / step)));

    std::vector<int> coarse;
    for (int i = -(max_index / stride) * stride; i <= max_index; i += stride) coarse.push_back(i);
    const Candidate rough = search(cloud, coarse, step);

    std::vector<int> fine;
    for (int i = std::max(-max_index, rough.index - stride); i <= std::min(max_index, rough.index + stride); ++i) {
        fine.push_back(i);
    }
    Candidate best = search(cloud, fine, step);
    if (better(rough, best)) best = rough;
    return {best.index * step, best.score};
}

SkewEstimate estimate_skew(const BitMask& mask, double half_range_deg, double step_deg) {
    SkewOptions options;
    options.half_range_deg = half_range_deg;
    options.step_deg = step_deg;
    return estimate_skew(mask, options);
}

Raster rotate(const Raster& img, double angle_deg, Rgb fill) {
    if (!std::isfinite(angle_deg)) throw Error(ErrorCode::InvalidArgument, "rotation angle must be finite");
    if (angle_deg == 0.0) return img;
    Raster out(img.width(), img.height(), img.channels(), img.dpi());
    const int w = img.width();
    const int h = img.height();
    const int nc = img.channel_count();
    const std::uint8_t fill_px[3] = {fill.r, fill.g, fill.b};
    const std::uint8_t fill_gray = static_cast<std::uint8_t>((299 * fill.r + 587 * fill.g + 114 * fill.b + 500) / 1000);

    rotate_rows(w, h, angle_deg, [&](int x, int y, double sx, double sy) {
        const double fx0 = std::floor(sx);
        const double fy0 = std::floor(sy);
        const int x0 = static_cast<int>(fx0);
        const int y0 = static_cast<int>(fy0);
        const double fx = sx - fx0;
        const double fy = sy - fy0;
        std::uint8_t* dst = out.row(y) + static_cast<std::size_t>(x) * nc;
        if (x0 < -1 || y0 < -1 || x0 >= w || y0 >= h) {
            for (int k = 0; k < nc; ++k) dst[k] = nc == 1 ? fill_gray : fill_px[k];
            return;
        }
        for (int k = 0; k < nc; ++k) {
            auto at = [&](int px, int py) -> double {
                if (px < 0 || py < 0 || px >= w || py >= h) return nc == 1 ? fill_gray : fill_px[k];
                return img.row(py)[static_cast<std::size_t>(px) * nc + k];
            };
            const double top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
            const double bottom = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
            dst[k] = static_cast<std::uint8_t>(std::lround(top * (1.0 - fy) + bottom * fy));
        }
    });
    return out;
}

BitMask rotate(const BitMask& mask, double angle_deg) {
    if (!std::isfinite(angle_deg)) throw Error(ErrorCode::InvalidArgument, "rotation angle must be finite");
    if (angle_deg == 0.0) return mask;
    BitMask out(mask.width(), mask.height());
    rotate_rows(mask.width(), mask.height(), angle_deg, [&](int x, int y, double sx, double sy) {
        const long px = std::lround(sx);
        const long py = std::lround(sy);
        if (mask.get_or_zero(static_cast<int>(px), static_cast<int>(py))) out.set(x, y);
    });
    return out;
}

Rect trim_rect(const BitMask& ink, int margin) {
    const auto box = ink.bounding_box();
    if (!box) throw Error(ErrorCode::NoInk, "nothing to trim around");
    const Rect grown{box->x - margin, box->y - margin, box->w + 2 * margin, box->h + 2 * margin};
    return clamp_to(grown, ink.width(), ink.height());
}

Trimmed trim_margins(const Raster& img, const BitMask& ink, int margin) {
    if (img.width() != ink.width() || img.height() != ink.height()) {
        throw Error(ErrorCode::InvalidArgument, "image and ink mask sizes differ");
    }
    const Rect crop = trim_rect(ink, margin);
    return {img.crop(crop), crop};
}

}  // namespace checkseg
