#include "checkseg/raster.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "checkseg/error.hpp"

namespace checkseg {

Rect intersect(const Rect& a, const Rect& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.right(), b.right());
    const int y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
    return {x0, y0, x1 - x0, y1 - y0};
}

Rect unite(const Rect& a, const Rect& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const int x0 = std::min(a.x, b.x);
    const int y0 = std::min(a.y, b.y);
    return {x0, y0, std::max(a.right(), b.right()) - x0, std::max(a.bottom(), b.bottom()) - y0};
}

double iou(const Rect& a, const Rect& b) {
    const Rect i = intersect(a, b);
    const double inter = i.empty() ? 0.0 : static_cast<double>(i.area());
    const double uni = static_cast<double>(a.area() + b.area()) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

Rect clamp_to(const Rect& r, int width, int height) {
    return intersect(r, Rect{0, 0, width, height});
}

Raster::Raster(int width, int height, Channels channels, double dpi, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels), dpi_(dpi) {
    if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
    if (!(dpi > 0.0)) throw Error(ErrorCode::InvalidArgument, "dpi must be positive");
    pixels_.assign(static_cast<std::size_t>(width) * height * channel_count(), fill);
}

void Raster::set_dpi(double dpi) {
    if (!(dpi > 0.0)) throw Error(ErrorCode::InvalidArgument, "dpi must be positive");
    dpi_ = dpi;
}

Raster Raster::crop(const Rect& r) const {
    const Rect c = clamp_to(r, width_, height_);
    if (c.empty()) throw Error(ErrorCode::InvalidArgument, "crop rectangle outside the image");
    Raster out(c.w, c.h, channels_, dpi_);
    const std::size_t n = static_cast<std::size_t>(c.w) * channel_count();
    for (int y = 0; y < c.h; ++y) {
        std::copy_n(row(c.y + y) + static_cast<std::size_t>(c.x) * channel_count(), n, out.row(y));
    }
    return out;
}

std::size_t BitMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BitMask::any() const {
    return std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

BitMask BitMask::crop(const Rect& r) const {
    const Rect c = clamp_to(r, width_, height_);
    if (c.empty()) return BitMask(std::max(r.w, 1), std::max(r.h, 1));
    BitMask out(c.w, c.h);
    for (int y = 0; y < c.h; ++y) std::copy_n(row(c.y + y) + c.x, c.w, out.row(y));
    return out;
}

std::optional<Rect> BitMask::bounding_box() const {
    int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
    for (int y = 0; y < height_; ++y) {
        const std::uint8_t* r = row(y);
        for (int x = 0; x < width_; ++x) {
            if (r[x]) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        }
    }
    if (x1 < 0) return std::nullopt;
    return Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

std::uint64_t ColorHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::size_t ColorHistogram::bin_of(Rgb c) const {
    const int shift = 8 - bits_per_channel;
    return (static_cast<std::size_t>(c.r >> shift) << (2 * bits_per_channel)) |
           (static_cast<std::size_t>(c.g >> shift) << bits_per_channel) | static_cast<std::size_t>(c.b >> shift);
}

Rgb ColorHistogram::bin_center(std::size_t bin) const {
    const int shift = 8 - bits_per_channel;
    const std::size_t mask = (std::size_t{1} << bits_per_channel) - 1;
    const int half = shift > 0 ? 1 << (shift - 1) : 0;
    auto center = [&](std::size_t q) { return static_cast<std::uint8_t>((static_cast<int>(q) << shift) + half); };
    return {center((bin >> (2 * bits_per_channel)) & mask), center((bin >> bits_per_channel) & mask), center(bin & mask)};
}

Raster to_grayscale(const Raster& img) {
    if (img.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "to_grayscale expects RGB8");
    Raster out(img.width(), img.height(), Channels::Gray8, img.dpi());
    const int w = img.width();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* src = img.row(y);
        std::uint8_t* dst = out.row(y);
        for (int x = 0; x < w; ++x) {
            const int v = 299 * src[3 * x] + 587 * src[3 * x + 1] + 114 * src[3 * x + 2];
            dst[x] = static_cast<std::uint8_t>((v + 500) / 1000);
        }
    }
    return out;
}

std::optional<int> otsu_threshold(const Raster& gray) {
    if (gray.channels() != Channels::Gray8) throw Error(ErrorCode::InvalidArgument, "otsu expects Gray8");
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : gray.pixels()) ++hist[v];

    const double total = static_cast<double>(gray.pixels().size());
    double sum_all = 0.0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * static_cast<double>(hist[v]);

    // Class 0 = values below t, class 1 = values at or above t.
    double best = -1.0;
    int first = -1, last = -1;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 1; t < 256; ++t) {
        w0 += static_cast<double>(hist[t - 1]);
        sum0 += static_cast<double>(t - 1) * static_cast<double>(hist[t - 1]);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            first = last = t;
        } else if (between == best) {
            last = t;
        }
    }
    if (first < 0) return std::nullopt;
    return (first + last) / 2;
}

BitMask binarize(const Raster& gray, int threshold) {
    if (gray.channels() != Channels::Gray8) throw Error(ErrorCode::InvalidArgument, "binarize expects Gray8");
    BitMask out(gray.width(), gray.height());
    auto src = gray.pixels();
    auto dst = out.bits();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) dst[i] = src[i] < threshold ? 1 : 0;
    return out;
}

BitMask binarize_otsu(const Raster& gray) {
    const auto t = otsu_threshold(gray);
    if (!t) return BitMask(gray.width(), gray.height());
    return binarize(gray, *t);
}

Raster render_mask(const BitMask& mask, double dpi) {
    Raster out(mask.width(), mask.height(), Channels::Gray8, dpi);
    auto src = mask.bits();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 0 : 255;
    return out;
}

ColorHistogram color_histogram(const Raster& img, int bits_per_channel) {
    if (img.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "color_histogram expects RGB8");
    if (bits_per_channel < 1 || bits_per_channel > 8) {
        throw Error(ErrorCode::InvalidArgument, "bits_per_channel must lie in [1, 8]");
    }
    ColorHistogram hist;
    hist.bits_per_channel = bits_per_channel;
    const std::size_t bins = std::size_t{1} << (3 * bits_per_channel);
    hist.counts.assign(bins, 0);
    const int shift = 8 - bits_per_channel;
    const int h = img.height();
    const int w = img.width();

    auto bin_at = [&](const std::uint8_t* p) {
        return (static_cast<std::size_t>(p[0] >> shift) << (2 * bits_per_channel)) |
               (static_cast<std::size_t>(p[1] >> shift) << bits_per_channel) | static_cast<std::size_t>(p[2] >> shift);
    };

    // Per-thread partial histograms only while they stay small.
    if (bits_per_channel <= 6 && omp_get_max_threads() > 1) {
#pragma omp parallel
        {
            std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(static) nowait
            for (int y = 0; y < h; ++y) {
                const std::uint8_t* r = img.row(y);
                for (int x = 0; x < w; ++x) ++local[bin_at(r + 3 * x)];
            }
#pragma omp critical(checkseg_histogram_merge)
            for (std::size_t b = 0; b < bins; ++b) hist.counts[b] += local[b];
        }
    } else {
        for (int y = 0; y < h; ++y) {
            const std::uint8_t* r = img.row(y);
            for (int x = 0; x < w; ++x) ++hist.counts[bin_at(r + 3 * x)];
        }
    }
    return hist;
}

}  // namespace checkseg
