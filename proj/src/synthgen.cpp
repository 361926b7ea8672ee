#include "checkseg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include "checkseg/error.hpp"
#include "checkseg/image_io.hpp"
#include "checkseg/preprocess.hpp"

namespace checkseg {
namespace {

using nlohmann::json;

// Substream indices; zones use kZoneStream + ZoneKind.
constexpr std::uint64_t kPrintStream = 1;
constexpr std::uint64_t kBandStream = 2;
constexpr std::uint64_t kFilledNoiseStream = 3;
constexpr std::uint64_t kFilledSpeckStream = 4;
constexpr std::uint64_t kBlankNoiseStream = 5;
constexpr std::uint64_t kBlankSpeckStream = 6;
constexpr std::uint64_t kCorpusStream = 7;
constexpr std::uint64_t kOverflowDealStream = 8;
constexpr std::uint64_t kZoneStream = 10;

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Inclusive range.
    int integer(int lo, int hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

// Cheap per-row stream for pixel noise, where seeding a Mersenne
// Twister per row would dominate the cost.
class SplitMix64 {
public:
    SplitMix64(std::uint64_t seed, std::uint64_t stream, std::uint64_t row)
        : state_(seed ^ (stream * 0x9e3779b97f4a7c15ull) ^ (row * 0xd1b54a32d192ed03ull)) {
        next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

struct PointI {
    int x = 0;
    int y = 0;
};

void fill_rect(Raster& img, Rect r, Rgb c) {
    r = clamp_to(r, img.width(), img.height());
    for (int y = r.y; y < r.bottom(); ++y) {
        for (int x = r.x; x < r.right(); ++x) img.set_rgb(x, y, c);
    }
}

Rect offset(Rect r, int dx, int dy) {
    return {r.x + dx, r.y + dy, r.w, r.h};
}

Rect shrink(const Rect& r, int by) {
    return {r.x + by, r.y + by, std::max(0, r.w - 2 * by), std::max(0, r.h - 2 * by)};
}

// Row of letter-like blocks standing on a common baseline.
void print_text(Raster& img, Rng& rng, int x, int y, int width, int height, int gap) {
    const int right = x + width;
    while (x < right) {
        const int w = std::min(right - x, rng.integer(std::max(2, height / 2), std::max(3, height)));
        const int h = std::max(2, static_cast<int>(std::lround(height * rng.uniform(0.6, 1.0))));
        fill_rect(img, {x, y + height - h, w, h}, kPrintRgb);
        x += w + gap;
        if (rng.chance(0.15)) x += 2 * gap;  // word break
    }
}

void dashed_line(Raster& img, int x0, int x1, int y, int thickness, int dash, int space) {
    for (int x = x0; x < x1; x += dash + space) fill_rect(img, {x, y, std::min(dash, x1 - x), thickness}, kPrintRgb);
}

class Brush {
public:
    explicit Brush(int radius) : radius_(radius) {
        for (int dy = -radius; dy <= radius; ++dy) {
            for (int dx = -radius; dx <= radius; ++dx) {
                if (dx * dx + dy * dy <= radius * radius + radius) offsets_.push_back({dx, dy});
            }
        }
    }

    void stamp(BitMask& m, int cx, int cy) const {
        for (const PointI& o : offsets_) {
            const int x = cx + o.x, y = cy + o.y;
            if (x >= 0 && y >= 0 && x < m.width() && y < m.height()) m.set(x, y);
        }
    }

    void stroke(BitMask& m, PointI a, PointI b) const {
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            stamp(m, static_cast<int>(std::lround(a.x + t * (b.x - a.x))),
                  static_cast<int>(std::lround(a.y + t * (b.y - a.y))));
        }
    }

    void polyline(BitMask& m, const std::vector<PointI>& pts) const {
        if (pts.size() == 1) stamp(m, pts[0].x, pts[0].y);
        for (std::size_t i = 1; i < pts.size(); ++i) stroke(m, pts[i - 1], pts[i]);
    }

    int radius() const { return radius_; }

private:
    int radius_;
    std::vector<PointI> offsets_;
};

bool dotted(ZoneKind k) {
    return k == ZoneKind::LiteralAmount || k == ZoneKind::Conductor || k == ZoneKind::Date;
}

struct Paw {
    Rect box;
    std::vector<PointI> path;
};

std::vector<PointI> paw_path(Rng& rng, const Rect& box, int r, ZoneKind kind, double s2) {
    const int x0 = box.x + r, x1 = box.right() - r - 1;
    const int y0 = box.y + r, y1 = box.bottom() - r - 1;
    const bool scribble = kind == ZoneKind::Signature;
    const double spacing = (scribble ? 9.0 : 13.0) * s2;
    const int n = std::max(3, static_cast<int>((x1 - x0) / spacing) + 1);
    std::vector<PointI> pts;
    // Right to left, the writing direction.
    for (int i = 0; i < n; ++i) {
        double x = x1 - (x1 - x0) * static_cast<double>(i) / (n - 1);
        if (scribble && i > 0 && i + 1 < n) x += rng.uniform(-14.0, 14.0) * s2;
        const int y = rng.integer(y0, y1);
        pts.push_back({std::clamp(static_cast<int>(std::lround(x)), x0, x1), y});
    }
    return pts;
}

std::vector<Paw> layout_paws(Rng& rng, const Rect& body, int count, int r, ZoneKind kind, double s2) {
    std::vector<Paw> paws;
    if (body.w < 2 * r + 4 || body.h < 2 * r + 2) return paws;
    if (count == 1) {
        const int w = std::max(2 * r + 4, static_cast<int>(body.w * rng.uniform(0.55, 0.95)));
        const int x = body.right() - w - rng.integer(0, body.w - w);
        paws.push_back({{x, body.y, w, body.h}, {}});
    } else {
        const int min_gap = static_cast<int>(std::lround(14 * s2));
        const int max_gap = static_cast<int>(std::lround(34 * s2));
        const int min_w = std::max(2 * r + 6, static_cast<int>(std::lround(24 * s2)));
        std::vector<int> widths, gaps;
        for (int i = 0; i < count; ++i) {
            widths.push_back(static_cast<int>(std::lround(rng.uniform(30.0, 110.0) * s2)));
            gaps.push_back(rng.integer(min_gap, max_gap));
        }
        auto total = [&] {
            int t = 0;
            for (std::size_t i = 0; i < widths.size(); ++i) t += widths[i] + (i + 1 < widths.size() ? gaps[i] : 0);
            return t;
        };
        while (total() > body.w) {
            int gap_sum = 0, w_sum = 0;
            for (std::size_t i = 0; i < widths.size(); ++i) {
                w_sum += widths[i];
                if (i + 1 < widths.size()) gap_sum += gaps[i];
            }
            const double f = static_cast<double>(body.w - gap_sum) / w_sum;
            if (f * w_sum >= static_cast<double>(min_w) * widths.size()) {
                for (int& w : widths) w = std::max(min_w, static_cast<int>(std::floor(w * f)));
                if (total() <= body.w) break;
            }
            widths.pop_back();
            gaps.pop_back();
            if (widths.empty()) return paws;
        }
        const int slack = body.w - total();
        int right = body.right() - rng.integer(0, slack / 3);
        for (std::size_t i = 0; i < widths.size(); ++i) {
            paws.push_back({{right - widths[i], body.y, widths[i], body.h}, {}});
            right -= widths[i] + gaps[i];
        }
    }
    for (Paw& p : paws) p.path = paw_path(rng, p.box, r, kind, s2);
    return paws;
}

void add_dots(Rng& rng, BitMask& m, const Paw& paw, const Rect& inner, const Brush& brush) {
    const int r = brush.radius();
    static constexpr int kDotCounts[] = {0, 0, 1, 1, 2};
    const int n = kDotCounts[rng.integer(0, 4)];
    for (int d = 0; d < n; ++d) {
        if (paw.box.w < 2 * r + 4) return;
        const int x = rng.integer(paw.box.x + r + 1, paw.box.right() - r - 2);
        const bool above = rng.chance(0.5);
        const int gap = rng.integer(1, 2);
        int top = inner.bottom(), bottom = inner.y - 1;
        for (int cx = x - r - 1; cx <= x + r + 1; ++cx) {
            for (int y = inner.y; y < inner.bottom(); ++y) {
                if (m.get_or_zero(cx, y)) {
                    top = std::min(top, y);
                    bottom = std::max(bottom, y);
                }
            }
        }
        if (bottom < top) continue;
        const int cy = above ? top - gap - r - 1 : bottom + gap + r + 1;
        if (cy - r < inner.y || cy + r >= inner.bottom()) continue;
        brush.stamp(m, x, cy);
    }
}

// Stroke leaving the zone through one edge, reaching `depth` pixels past it.
bool add_overflow(Rng& rng, BitMask& m, const std::vector<Paw>& paws, const Rect& zone, const Rect& allowed,
                  const Brush& brush, double s2) {
    const int r = brush.radius();
    const int depth = static_cast<int>(std::lround(rng.integer(5, 20) * s2));
    const int tail = static_cast<int>(std::lround(rng.integer(10, 40) * s2));
    int edges[4] = {0, 1, 2, 3};  // top, bottom, left, right
    for (int i = 3; i > 0; --i) std::swap(edges[i], edges[rng.integer(0, i)]);

    for (int edge : edges) {
        PointI anchor = paws.front().path.front();
        for (const Paw& p : paws) {
            for (const PointI& q : p.path) {
                const bool closer = (edge == 0 && q.y < anchor.y) || (edge == 1 && q.y > anchor.y) ||
                                    (edge == 2 && q.x < anchor.x) || (edge == 3 && q.x > anchor.x);
                if (closer) anchor = q;
            }
        }
        PointI out = anchor;
        PointI along{0, 0};
        switch (edge) {
            case 0: out.y = zone.y - depth + r; along = {1, 0}; break;
            case 1: out.y = zone.bottom() - 1 + depth - r; along = {1, 0}; break;
            case 2: out.x = zone.x - depth + r; along = {0, 1}; break;
            default: out.x = zone.right() - 1 + depth - r; along = {0, 1}; break;
        }
        auto ok = [&](PointI p) {
            return p.x - r >= allowed.x && p.y - r >= allowed.y && p.x + r < allowed.right() && p.y + r < allowed.bottom();
        };
        if (!ok(out)) continue;
        const int sign = rng.chance(0.5) ? 1 : -1;
        PointI end{out.x + sign * along.x * tail, out.y + sign * along.y * tail};
        if (!ok(end)) end = {out.x - sign * along.x * tail, out.y - sign * along.y * tail};
        if (!ok(end)) end = out;
        brush.polyline(m, {anchor, out, end});
        return true;
    }
    return false;
}

std::uint64_t text_seed(const BankRecord& bank) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bank.code + bank.name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Rounded N(0, sigma) lookup indexed by 16 random bits.
std::vector<std::int16_t> noise_table(double sigma) {
    const int k_max = static_cast<int>(std::ceil(6.0 * sigma)) + 1;
    auto phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
    std::vector<std::int16_t> table(65536);
    int k = -k_max;
    double cdf = phi((k + 0.5) / sigma);
    for (int i = 0; i < 65536; ++i) {
        const double u = (i + 0.5) / 65536.0;
        while (cdf < u && k < k_max) {
            ++k;
            cdf = phi((k + 0.5) / sigma);
        }
        table[i] = static_cast<std::int16_t>(k);
    }
    return table;
}

json rgb_json(Rgb c) {
    return json::array({c.r, c.g, c.b});
}

Rgb rgb_from_json(const json& j) {
    return {j.at(0).get<std::uint8_t>(), j.at(1).get<std::uint8_t>(), j.at(2).get<std::uint8_t>()};
}

}  // namespace

void validate(const GenSpec& spec) {
    auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, why); };
    if (!(spec.dpi >= 50.0 && spec.dpi <= 1200.0)) fail("dpi must lie in [50, 1200]");
    if (!(spec.noise.sigma >= 0.0) || !(spec.noise.speckle_density >= 0.0)) fail("noise parameters must be >= 0");
    if (!(std::abs(spec.skew_deg) <= 5.0)) fail("|skew| must not exceed 5 degrees");
    for (double p : spec.overflow_prob) {
        if (!(p >= 0.0 && p <= 1.0)) fail("overflow probabilities must lie in [0, 1]");
    }
    for (const auto& [lo, hi] : spec.paw_count_range) {
        if (lo < 1 || hi < lo) fail("PAW count ranges need 1 <= lo <= hi");
    }
}

CheckGeometry check_geometry(const BankRecord& bank, double dpi) {
    CheckGeometry g;
    const ZoneTemplate& t = bank.zones;
    g.scale = dpi / t.template_dpi;
    g.frame_width = static_cast<int>(std::lround(t.frame_width * g.scale));
    g.frame_height = static_cast<int>(std::lround(t.frame_height * g.scale));
    g.body_bottom = static_cast<int>(std::lround(t.body_bottom * g.scale));
    g.border = std::max(1, static_cast<int>(std::lround(dpi / 100.0)));
    g.brush = std::max(2, static_cast<int>(std::lround(dpi / 100.0)));
    g.pad = static_cast<int>(std::lround(0.05 * g.frame_width)) + 8;
    g.canvas_width = g.frame_width + 2 * g.pad;
    g.canvas_height = g.frame_height + 2 * g.pad;
    g.glyph = band_glyph_geometry(dpi);
    g.band_y = g.frame_height - g.glyph.height;
    return g;
}

GeneratedCheck generate_template(const BankRecord& bank, const GenSpec& spec, const GlyphTable& glyphs) {
    validate(spec);
    if (bank.code != spec.bank_code) {
        throw Error(ErrorCode::UnknownBank, "spec asks for bank " + spec.bank_code + ", got " + bank.code);
    }
    const CheckGeometry g = check_geometry(bank, spec.dpi);
    GeneratedCheck out;
    out.image = Raster(g.canvas_width, g.canvas_height, Channels::RGB8, spec.dpi);
    fill_rect(out.image, out.image.frame(), kPaperRgb);
    const int ox = g.pad, oy = g.pad;
    const int t = g.border;
    auto px = [&](double v) { return static_cast<int>(std::lround(v * g.scale)); };

    // Body frame, closed by the rule above the marking band.
    fill_rect(out.image, {ox, oy, g.frame_width, t}, kPrintRgb);
    fill_rect(out.image, {ox, oy + g.body_bottom, g.frame_width, t}, kPrintRgb);
    fill_rect(out.image, {ox, oy, t, g.body_bottom + t}, kPrintRgb);
    fill_rect(out.image, {ox + g.frame_width - t, oy, t, g.body_bottom + t}, kPrintRgb);

    // Printed matter depends on the bank only.
    Rng print(text_seed(bank), kPrintStream);
    const int gap = std::max(1, px(3));
    print_text(out.image, print, ox + px(24), oy + px(14), px(220), px(24), gap);
    print_text(out.image, print, ox + px(420), oy + px(18), px(130), px(12), gap);
    print_text(out.image, print, ox + px(20), oy + px(400), px(180), px(9), gap);
    print_text(out.image, print, ox + px(760), oy + px(398), px(250), px(9), gap);
    for (const Zone& z : bank.zones.zones) {
        const Rect r = offset(scale_rect(z.rect, g.scale), ox, oy);
        print_text(out.image, print, r.x + px(6), r.y + px(4), std::min(px(70), r.w / 3), px(8), gap);
        dashed_line(out.image, r.x + px(4), r.right() - px(4), r.bottom() - px(3), t, px(8), px(5));
    }

    // Marking band.
    const BandLayout& layout = bank.band;
    std::vector<std::string> values = layout.glyph_values();
    Rng band(spec.seed, kBandStream);
    for (std::string& v : values) {
        if (v.size() == 1) v = std::string(1, static_cast<char>('0' + band.integer(0, 9)));
    }
    values[layout.code_positions[0]] = bank.code.substr(0, 1);
    values[layout.code_positions[1]] = bank.code.substr(1, 1);
    const int u = g.glyph.unit;
    int band_width = 0;
    for (const std::string& v : values) band_width += glyphs.find(v).width_units() * u;
    band_width += static_cast<int>(values.size() - 1) * kCharGapUnits * u;
    int x = (g.frame_width - band_width) / 2;

    CheckGroundTruth& gt = out.gt;
    for (const std::string& v : values) {
        const Cmc7Glyph& glyph = glyphs.find(v);
        for_each_glyph_pixel(glyph, g.glyph, ox + x, oy + g.band_y,
                             [&](int px_, int py_) { out.image.set_rgb(px_, py_, kBandRgb); });
        const int w = glyph.width_units() * u;
        gt.band_char_rects.push_back({x, g.band_y, w, g.glyph.height});
        gt.band_char_values.push_back(v);
        x += w + kCharGapUnits * u;
    }
    gt.bank_code = bank.code;
    gt.bank_name = bank.name;
    gt.code_digits = {bank.code[0] - '0', bank.code[1] - '0'};
    gt.dpi = spec.dpi;
    gt.skew_deg = 0.0;
    gt.ink_rgb = spec.ink_rgb;
    gt.frame = g.frame();
    gt.band_rect = {0, g.band_y, g.frame_width, g.glyph.height};
    gt.spec = spec;
    return out;
}

Handwriting render_handwriting(const BankRecord& bank, const GenSpec& spec) {
    validate(spec);
    const CheckGeometry g = check_geometry(bank, spec.dpi);
    const double s2 = spec.dpi / 200.0;
    const Brush brush(g.brush);
    const int r = g.brush;
    const Rect allowed{g.border + 1, g.border + 1, g.frame_width - 2 * g.border - 2, g.body_bottom - g.border - 2};

    Handwriting hw;
    hw.ink = BitMask(g.frame_width, g.frame_height);
    hw.zone_of.assign(static_cast<std::size_t>(g.frame_width) * g.frame_height, 0);
    for (std::size_t zi = 0; zi < bank.zones.zones.size(); ++zi) {
        const Zone& z = bank.zones.zones[zi];
        const int k = static_cast<int>(z.kind);
        Rng rng(spec.seed, kZoneStream + static_cast<std::uint64_t>(k));
        const Rect zone = scale_rect(z.rect, g.scale);
        const Rect inner = intersect(shrink(zone, std::max(3, static_cast<int>(std::lround(4 * s2)))), allowed);

        int dot_room = dotted(z.kind) ? 2 * r + 4 : 0;
        if (inner.h - 2 * dot_room < 2 * r + 6) dot_room = 0;
        const Rect body{inner.x, inner.y + dot_room, inner.w, inner.h - 2 * dot_room};
        const auto [lo, hi] = spec.paw_count_range[k];
        const std::vector<Paw> paws = layout_paws(rng, body, rng.integer(lo, hi), r, z.kind, s2);

        BitMask m(g.frame_width, g.frame_height);
        for (const Paw& p : paws) brush.polyline(m, p.path);
        if (dotted(z.kind) && dot_room > 0) {
            for (const Paw& p : paws) add_dots(rng, m, p, inner, brush);
        }
        GtZone gz;
        gz.kind = z.kind;
        gz.template_rect = zone;
        gz.paw_count = static_cast<int>(paws.size());
        if (!paws.empty() && rng.chance(spec.overflow_prob[k])) {
            gz.overflowed = add_overflow(rng, m, paws, zone, allowed, brush, s2);
        }
        gz.ink_pixels = m.count();
        if (const auto box = m.bounding_box()) gz.ink_bbox = *box;

        auto src = m.bits();
        auto dst = hw.ink.bits();
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (!src[i]) continue;
            dst[i] = 1;
            hw.zone_of[i] = static_cast<std::uint8_t>(zi + 1);
        }
        hw.zones.push_back(gz);
    }
    return hw;
}

GeneratedCheck fill_check(const GeneratedCheck& blank, const BankRecord& bank, const GenSpec& spec) {
    const Handwriting hw = render_handwriting(bank, spec);
    GeneratedCheck out = blank;
    const Rect frame = blank.gt.frame;
    for (int y = 0; y < hw.ink.height(); ++y) {
        for (int x = 0; x < hw.ink.width(); ++x) {
            if (hw.ink.get(x, y)) out.image.set_rgb(frame.x + x, frame.y + y, spec.ink_rgb);
        }
    }
    if (spec.skew_deg != 0.0) out.image = rotate(out.image, spec.skew_deg, kPaperRgb);
    add_gaussian_noise(out.image, spec.noise.sigma, spec.seed, kFilledNoiseStream);
    add_speckle(out.image, spec.noise.speckle_density, spec.seed, kFilledSpeckStream);
    out.gt.skew_deg = spec.skew_deg;
    out.gt.ink_rgb = spec.ink_rgb;
    out.gt.zones = hw.zones;
    out.gt.spec = spec;
    return out;
}

Raster scan_template(const GeneratedCheck& blank, const GenSpec& spec) {
    Raster img = blank.image;
    add_gaussian_noise(img, spec.noise.sigma, spec.seed, kBlankNoiseStream);
    add_speckle(img, spec.noise.speckle_density, spec.seed, kBlankSpeckStream);
    return img;
}

void add_gaussian_noise(Raster& img, double sigma, std::uint64_t seed, std::uint64_t stream) {
    if (!(sigma > 0.0)) return;
    const std::vector<std::int16_t> table = noise_table(sigma);
    const int n = img.width() * img.channel_count();
    // One generator per row keeps the result independent of thread count.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height(); ++y) {
        SplitMix64 rng(seed, stream, static_cast<std::uint64_t>(y));
        std::uint8_t* row = img.row(y);
        std::uint64_t bits = 0;
        for (int i = 0; i < n; ++i) {
            if (i % 4 == 0) bits = rng.next();
            const int v = row[i] + table[bits & 0xffff];
            bits >>= 16;
            row[i] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        }
    }
}

void add_speckle(Raster& img, double density, std::uint64_t seed, std::uint64_t stream) {
    const long count = std::lround(density * img.width() * img.height());
    Rng rng(seed, stream);
    for (long i = 0; i < count; ++i) {
        const int size = rng.integer(1, 2);
        const int x = rng.integer(0, img.width() - size);
        const int y = rng.integer(0, img.height() - size);
        fill_rect(img, {x, y, size, size}, kSpeckRgb);
    }
}

std::pair<double, double> map_frame_point(const CheckGroundTruth& gt, int canvas_width, int canvas_height, double x,
                                          double y, double correction_deg) {
    const double cx = (canvas_width - 1) / 2.0;
    const double cy = (canvas_height - 1) / 2.0;
    const double deg = std::numbers::pi / 180.0;
    const double a = gt.skew_deg * deg;
    const double dx = x + gt.frame.x - cx;
    const double dy = y + gt.frame.y - cy;
    // Inverse of rotate()'s sampling map, once per rotation.
    const double qx = std::cos(a) * dx + std::sin(a) * dy;
    const double qy = -std::sin(a) * dx + std::cos(a) * dy;
    const double e = correction_deg * deg;
    return {cx + std::cos(e) * qx - std::sin(e) * qy, cy + std::sin(e) * qx + std::cos(e) * qy};
}

std::vector<GenSpec> corpus_specs(const Registry& registry, const CorpusOptions& options) {
    std::vector<const BankRecord*> banks;
    if (options.banks.empty()) {
        for (const BankRecord& b : registry.banks) banks.push_back(&b);
    } else {
        for (const std::string& name : options.banks) {
            const BankRecord* b = registry.find_name(name);
            if (!b) b = registry.find_code(name);
            if (!b) throw Error(ErrorCode::UnknownBank, "no bank named or coded '" + name + "'");
            banks.push_back(b);
        }
    }
    static constexpr Rgb kInks[] = {{20, 52, 164}, {28, 36, 108}, {92, 44, 140}};
    std::vector<GenSpec> specs;
    for (const BankRecord* b : banks) {
        const auto index = static_cast<std::uint64_t>(b - registry.banks.data());
        // Overflows are dealt out, not drawn: round(p * count) checks per bank
        // and zone get one, so corpus rates hit the profile exactly.
        std::vector<PerZone> overflow(static_cast<std::size_t>(options.count), PerZone{});
        Rng deal(options.base_seed + 1000 * index, kOverflowDealStream);
        for (std::size_t k = 0; k < kAllZoneKinds.size(); ++k) {
            std::vector<int> order(static_cast<std::size_t>(options.count));
            std::iota(order.begin(), order.end(), 0);
            for (int i = options.count - 1; i > 0; --i) std::swap(order[i], order[deal.integer(0, i)]);
            const auto n = static_cast<int>(std::lround(options.overflow_prob[k] * options.count));
            for (int i = 0; i < n; ++i) overflow[order[i]][k] = 1.0;
        }
        for (int i = 0; i < options.count; ++i) {
            GenSpec s;
            s.bank_code = b->code;
            s.dpi = options.dpi;
            s.seed = options.base_seed + 1000 * index + static_cast<std::uint64_t>(i);
            s.noise = options.noise;
            s.overflow_prob = overflow[i];
            Rng rng(s.seed, kCorpusStream);
            s.skew_deg = std::round(rng.uniform(-options.max_skew_deg, options.max_skew_deg) * 100.0) / 100.0;
            s.ink_rgb = kInks[rng.integer(0, 2)];
            validate(s);
            specs.push_back(s);
        }
    }
    return specs;
}

CorpusEntry write_corpus_entry(const Registry& registry, const GenSpec& spec, const std::filesystem::path& out_dir) {
    const BankRecord* bank = registry.find_code(spec.bank_code);
    if (!bank) throw Error(ErrorCode::UnknownBank, "no bank with code " + spec.bank_code);
    const GeneratedCheck blank = generate_template(*bank, spec);
    const GeneratedCheck filled = fill_check(blank, *bank, spec);
    const std::filesystem::path dir = out_dir / bank->name / std::to_string(spec.seed);
    std::filesystem::create_directories(dir);
    write_png(scan_template(blank, spec), dir / "template.png");
    write_png(filled.image, dir / "filled.png");
    std::ofstream out(dir / "gt.json");
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / "gt.json").string());
    out << to_json(filled.gt).dump(1) << '\n';
    return {bank->name, dir};
}

json rect_json(const Rect& r) {
    return json::array({r.x, r.y, r.w, r.h});
}

Rect rect_from_json_array(const json& j) {
    return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

json to_json(const GenSpec& spec) {
    json overflow = json::object(), paws = json::object();
    for (ZoneKind k : kAllZoneKinds) {
        const std::string key(to_string(k));
        overflow[key] = spec.overflow_prob[static_cast<int>(k)];
        const auto& [lo, hi] = spec.paw_count_range[static_cast<int>(k)];
        paws[key] = json::array({lo, hi});
    }
    return {{"bank_code", spec.bank_code},
            {"dpi", spec.dpi},
            {"seed", spec.seed},
            {"noise", {{"sigma", spec.noise.sigma}, {"speckle_density", spec.noise.speckle_density}}},
            {"skew_deg", spec.skew_deg},
            {"ink_rgb", rgb_json(spec.ink_rgb)},
            {"overflow_prob", overflow},
            {"paw_count_range", paws}};
}

GenSpec gen_spec_from_json(const json& j) {
    GenSpec s;
    s.bank_code = j.at("bank_code").get<std::string>();
    s.dpi = j.at("dpi").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.noise.sigma = j.at("noise").at("sigma").get<double>();
    s.noise.speckle_density = j.at("noise").at("speckle_density").get<double>();
    s.skew_deg = j.at("skew_deg").get<double>();
    s.ink_rgb = rgb_from_json(j.at("ink_rgb"));
    for (ZoneKind k : kAllZoneKinds) {
        const std::string key(to_string(k));
        s.overflow_prob[static_cast<int>(k)] = j.at("overflow_prob").at(key).get<double>();
        const json& p = j.at("paw_count_range").at(key);
        s.paw_count_range[static_cast<int>(k)] = {p.at(0).get<int>(), p.at(1).get<int>()};
    }
    return s;
}

json to_json(const CheckGroundTruth& gt) {
    json chars = json::array();
    for (std::size_t i = 0; i < gt.band_char_rects.size(); ++i) {
        chars.push_back({{"value", gt.band_char_values[i]}, {"rect", rect_json(gt.band_char_rects[i])}});
    }
    json zones = json::array();
    for (const GtZone& z : gt.zones) {
        zones.push_back({{"kind", std::string(to_string(z.kind))},
                         {"template_rect", rect_json(z.template_rect)},
                         {"ink_bbox", rect_json(z.ink_bbox)},
                         {"paw_count", z.paw_count},
                         {"overflowed", z.overflowed},
                         {"ink_pixels", z.ink_pixels}});
    }
    return {{"schema", 1},
            {"bank_code", gt.bank_code},
            {"bank_name", gt.bank_name},
            {"code_digits", gt.code_digits},
            {"dpi", gt.dpi},
            {"skew_deg", gt.skew_deg},
            {"ink_rgb", rgb_json(gt.ink_rgb)},
            {"frame", rect_json(gt.frame)},
            {"band_rect", rect_json(gt.band_rect)},
            {"band_chars", chars},
            {"zones", zones},
            {"spec", to_json(gt.spec)}};
}

CheckGroundTruth ground_truth_from_json(const json& j) {
    CheckGroundTruth gt;
    gt.bank_code = j.at("bank_code").get<std::string>();
    gt.bank_name = j.value("bank_name", "");
    const auto digits = j.at("code_digits").get<std::vector<int>>();
    gt.code_digits = {digits.at(0), digits.at(1)};
    gt.dpi = j.at("dpi").get<double>();
    gt.skew_deg = j.at("skew_deg").get<double>();
    gt.ink_rgb = rgb_from_json(j.at("ink_rgb"));
    gt.frame = rect_from_json_array(j.at("frame"));
    gt.band_rect = rect_from_json_array(j.at("band_rect"));
    for (const json& c : j.at("band_chars")) {
        gt.band_char_values.push_back(c.at("value").get<std::string>());
        gt.band_char_rects.push_back(rect_from_json_array(c.at("rect")));
    }
    for (const json& z : j.at("zones")) {
        GtZone gz;
        gz.kind = zone_kind_from_string(z.at("kind").get<std::string>());
        gz.template_rect = rect_from_json_array(z.at("template_rect"));
        gz.ink_bbox = rect_from_json_array(z.at("ink_bbox"));
        gz.paw_count = z.at("paw_count").get<int>();
        gz.overflowed = z.at("overflowed").get<bool>();
        gz.ink_pixels = z.at("ink_pixels").get<std::size_t>();
        gt.zones.push_back(gz);
    }
    gt.spec = gen_spec_from_json(j.at("spec"));
    return gt;
}

}  // namespace checkseg
