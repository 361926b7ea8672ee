#include <cmath>
#include <cstdlib>
#include <numbers>

#include "checkseg/error.hpp"
#include "checkseg/reference.hpp"

namespace checkseg::reference {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double variance(const std::vector<int>& rows) {
    double sum = 0.0, sum_sq = 0.0;
    for (int v : rows) {
        sum += v;
        sum_sq += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(rows.size());
    const double mean = sum / n;
    return sum_sq / n - mean * mean;
}

}  // namespace

Raster to_grayscale(const Raster& img) {
    if (img.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "to_grayscale expects RGB8");
    Raster out(img.width(), img.height(), Channels::Gray8, img.dpi());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb c = img.rgb(x, y);
            out.set_gray(x, y, static_cast<std::uint8_t>((299 * c.r + 587 * c.g + 114 * c.b + 500) / 1000));
        }
    }
    return out;
}

ColorHistogram color_histogram(const Raster& img, int bits_per_channel) {
    if (img.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "color_histogram expects RGB8");
    ColorHistogram hist;
    hist.bits_per_channel = bits_per_channel;
    hist.counts.assign(std::size_t{1} << (3 * bits_per_channel), 0);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) ++hist.counts[hist.bin_of(img.rgb(x, y))];
    }
    return hist;
}

Profile profile(const BitMask& mask, Axis axis) {
    Profile p;
    p.axis = axis;
    p.counts.assign(axis == Axis::Rows ? mask.height() : mask.width(), 0);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.get(x, y)) ++p.counts[axis == Axis::Rows ? y : x];
        }
    }
    return p;
}

BitMask dilate(const BitMask& mask, const StructuringElement& se) {
    if (se.level < 0) throw Error(ErrorCode::InvalidArgument, "structuring element level must be >= 0");
    const int k = se.level;
    const int kx = se.shape == SeShape::VerticalSegment ? 0 : k;
    const int ky = se.shape == SeShape::HorizontalSegment ? 0 : k;
    BitMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            bool hit = false;
            for (int dy = -ky; dy <= ky && !hit; ++dy) {
                for (int dx = -kx; dx <= kx && !hit; ++dx) hit = mask.get_or_zero(x + dx, y + dy);
            }
            out.set(x, y, hit);
        }
    }
    return out;
}

Raster rotate(const Raster& img, double angle_deg, Rgb fill) {
    if (!std::isfinite(angle_deg)) throw Error(ErrorCode::InvalidArgument, "rotation angle must be finite");
    if (angle_deg == 0.0) return img;
    const int w = img.width();
    const int h = img.height();
    const int nc = img.channel_count();
    Raster out(w, h, img.channels(), img.dpi());
    const double s = std::sin(angle_deg * kDegToRad);
    const double c = std::cos(angle_deg * kDegToRad);
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;
    const std::uint8_t fill_px[3] = {fill.r, fill.g, fill.b};
    const std::uint8_t fill_gray = static_cast<std::uint8_t>((299 * fill.r + 587 * fill.g + 114 * fill.b + 500) / 1000);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double xx = x - cx, yy = y - cy;
            const double sx = cx + c * xx - s * yy;
            const double sy = cy + s * xx + c * yy;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - std::floor(sx);
            const double fy = sy - std::floor(sy);
            std::uint8_t* dst = out.row(y) + static_cast<std::size_t>(x) * nc;
            for (int k = 0; k < nc; ++k) {
                const double bg = nc == 1 ? fill_gray : fill_px[k];
                if (x0 < -1 || y0 < -1 || x0 >= w || y0 >= h) {
                    dst[k] = static_cast<std::uint8_t>(bg);
                    continue;
                }
                auto at = [&](int px, int py) -> double {
                    if (px < 0 || py < 0 || px >= w || py >= h) return bg;
                    return img.row(py)[static_cast<std::size_t>(px) * nc + k];
                };
                const double top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
                const double bottom = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
                dst[k] = static_cast<std::uint8_t>(std::lround(top * (1.0 - fy) + bottom * fy));
            }
        }
    }
    return out;
}

BitMask rotate(const BitMask& mask, double angle_deg) {
    if (!std::isfinite(angle_deg)) throw Error(ErrorCode::InvalidArgument, "rotation angle must be finite");
    if (angle_deg == 0.0) return mask;
    BitMask out(mask.width(), mask.height());
    const double s = std::sin(angle_deg * kDegToRad);
    const double c = std::cos(angle_deg * kDegToRad);
    const double cx = (mask.width() - 1) / 2.0;
    const double cy = (mask.height() - 1) / 2.0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const double xx = x - cx, yy = y - cy;
            const long px = std::lround(cx + c * xx - s * yy);
            const long py = std::lround(cy + s * xx + c * yy);
            if (mask.get_or_zero(static_cast<int>(px), static_cast<int>(py))) out.set(x, y);
        }
    }
    return out;
}

double skew_objective(const BitMask& mask, double angle_deg) {
    const double s = std::sin(angle_deg * kDegToRad);
    const double c = std::cos(angle_deg * kDegToRad);
    const double cx = (mask.width() - 1) / 2.0;
    const double cy = (mask.height() - 1) / 2.0;
    std::vector<int> rows(mask.height(), 0);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.get(x, y)) continue;
            // float offsets, as in the parallel kernel
            const float dx = static_cast<float>(x - cx);
            const float dy = static_cast<float>(y - cy);
            const double r = std::floor(cy + dx * s + dy * c + 0.5);
            if (r >= 0.0 && r < mask.height()) ++rows[static_cast<int>(r)];
        }
    }
    return variance(rows);
}

SkewEstimate estimate_skew(const BitMask& mask, const SkewOptions& options) {
    if (!mask.any()) throw Error(ErrorCode::NoInk, "cannot estimate skew of an empty mask");
    const double step = options.step_deg;
    const int max_index = static_cast<int>(std::floor(options.half_range_deg / step + 1e-9));
    const int stride = std::max(1, static_cast<int>(std::lround(options.coarse_step_deg / step)));
    auto better = [](int ia, double sa, int ib, double sb) {
        if (sa != sb) return sa > sb;
        return std::abs(ia) < std::abs(ib);
    };
    int best = 0;
    double best_score = -1.0;
    bool have = false;
    for (int i = -(max_index / stride) * stride; i <= max_index; i += stride) {
        const double sc = reference::skew_objective(mask, i * step);
        if (!have || better(i, sc, best, best_score)) {
            best = i;
            best_score = sc;
            have = true;
        }
    }
    const int centre = best;
    for (int i = std::max(-max_index, centre - stride); i <= std::min(max_index, centre + stride); ++i) {
        const double sc = reference::skew_objective(mask, i * step);
        if (better(i, sc, best, best_score)) {
            best = i;
            best_score = sc;
        }
    }
    return {best * step, best_score};
}

BitMask extract_ink_mask(const Raster& img, const InkColor& color) {
    BitMask mask(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb p = img.rgb(x, y);
            mask.set(x, y,
                     std::abs(p.r - color.center.r) <= color.tolerance[0] &&
                         std::abs(p.g - color.center.g) <= color.tolerance[1] &&
                         std::abs(p.b - color.center.b) <= color.tolerance[2]);
        }
    }
    return mask;
}

}  // namespace checkseg::reference
