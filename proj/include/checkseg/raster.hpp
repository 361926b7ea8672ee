#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace checkseg {

inline constexpr double kDefaultDpi = 200.0;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Axis-aligned pixel rectangle. `x`, `y` are the top-left corner, `w`, `h`
/// the extent; right() and bottom() are exclusive.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long long area() const { return static_cast<long long>(w) * h; }
    bool empty() const { return w <= 0 || h <= 0; }
    bool contains(int px, int py) const { return px >= x && px < right() && py >= y && py < bottom(); }
    bool contains(const Rect& o) const {
        return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

Rect intersect(const Rect& a, const Rect& b);
Rect unite(const Rect& a, const Rect& b);
double iou(const Rect& a, const Rect& b);
/// Clamp `r` to the frame [0, width) x [0, height).
Rect clamp_to(const Rect& r, int width, int height);

enum class Channels : int { Gray8 = 1, RGB8 = 3 };

/// Row-major, channel-interleaved 8-bit image.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, Channels channels, double dpi = kDefaultDpi, std::uint8_t fill = 255);

    int width() const { return width_; }
    int height() const { return height_; }
    Channels channels() const { return channels_; }
    int channel_count() const { return static_cast<int>(channels_); }
    double dpi() const { return dpi_; }
    void set_dpi(double dpi);

    std::span<std::uint8_t> pixels() { return pixels_; }
    std::span<const std::uint8_t> pixels() const { return pixels_; }

    std::uint8_t* row(int y) { return pixels_.data() + static_cast<std::size_t>(y) * width_ * channel_count(); }
    const std::uint8_t* row(int y) const {
        return pixels_.data() + static_cast<std::size_t>(y) * width_ * channel_count();
    }

    std::uint8_t gray(int x, int y) const { return row(y)[x]; }
    void set_gray(int x, int y, std::uint8_t v) { row(y)[x] = v; }

    Rgb rgb(int x, int y) const {
        const std::uint8_t* p = row(y) + 3 * x;
        return {p[0], p[1], p[2]};
    }
    void set_rgb(int x, int y, Rgb c) {
        std::uint8_t* p = row(y) + 3 * x;
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }

    Rect frame() const { return {0, 0, width_, height_}; }
    Raster crop(const Rect& r) const;

    friend bool operator==(const Raster& a, const Raster& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.channels_ == b.channels_ && a.pixels_ == b.pixels_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    Channels channels_ = Channels::Gray8;
    double dpi_ = kDefaultDpi;
    std::vector<std::uint8_t> pixels_;
};

/// Binary image, one byte per position (1 = ink).
class BitMask {
public:
    BitMask() = default;
    BitMask(int width, int height) : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    Rect frame() const { return {0, 0, width_, height_}; }

    bool get(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v = true) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
    /// Out-of-frame reads return background.
    bool get_or_zero(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_ && get(x, y); }

    std::uint8_t* row(int y) { return bits_.data() + static_cast<std::size_t>(y) * width_; }
    const std::uint8_t* row(int y) const { return bits_.data() + static_cast<std::size_t>(y) * width_; }

    std::span<std::uint8_t> bits() { return bits_; }
    std::span<const std::uint8_t> bits() const { return bits_; }

    std::size_t count() const;
    bool any() const;
    BitMask crop(const Rect& r) const;
    /// Tight bounding box of the ink, or nullopt when empty.
    std::optional<Rect> bounding_box() const;

    friend bool operator==(const BitMask&, const BitMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Counts of pixels per quantized RGB bin. Bin index packs the top
/// `bits_per_channel` bits of R, G, B (R most significant).
struct ColorHistogram {
    int bits_per_channel = 5;
    std::vector<std::uint64_t> counts;

    std::size_t bin_count() const { return counts.size(); }
    std::uint64_t total() const;
    std::size_t bin_of(Rgb c) const;
    /// Centre of the bin in 8-bit units (rounded up at half).
    Rgb bin_center(std::size_t bin) const;
};

inline constexpr int kDefaultHistogramBits = 5;

Raster to_grayscale(const Raster& img);

/// Otsu threshold over the 256-bin histogram; ink is `gray < threshold`.
/// Returns nullopt when the image holds a single gray value. Ties in the
/// between-class variance resolve to the middle of the maximizing plateau.
std::optional<int> otsu_threshold(const Raster& gray);
BitMask binarize_otsu(const Raster& gray);
BitMask binarize(const Raster& gray, int threshold);
/// 0 for ink, 255 for background.
Raster render_mask(const BitMask& mask, double dpi = kDefaultDpi);

ColorHistogram color_histogram(const Raster& img, int bits_per_channel = kDefaultHistogramBits);

}  // namespace checkseg
