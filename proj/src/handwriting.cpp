#include "checkseg/handwriting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "checkseg/error.hpp"

namespace checkseg {

InkColor handwriting_color(const ColorHistogram& filled, const ColorHistogram& blank, std::uint64_t noise_floor) {
    if (filled.bits_per_channel != blank.bits_per_channel || filled.counts.size() != blank.counts.size()) {
        throw Error(ErrorCode::InvalidArgument, "histograms use different quantizations");
    }
    auto luma = [&](std::size_t bin) {
        const Rgb c = filled.bin_center(bin);
        return 299 * c.r + 587 * c.g + 114 * c.b;
    };
    std::uint64_t best_diff = 0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < filled.counts.size(); ++i) {
        const std::uint64_t diff = filled.counts[i] > blank.counts[i] ? filled.counts[i] - blank.counts[i] : 0;
        if (diff > best_diff || (diff == best_diff && diff > 0 && luma(i) < luma(best))) {
            best_diff = diff;
            best = i;
        }
    }
    if (best_diff <= noise_floor) {
        throw Error(ErrorCode::NoDifference, "no color is more frequent in the filled check than in the template");
    }
    const int step = 1 << (8 - filled.bits_per_channel);
    return {filled.bin_center(best), {step, step, step}};
}

ColorHistogram rescale(const ColorHistogram& hist, std::uint64_t total) {
    ColorHistogram out = hist;
    const std::uint64_t have = hist.total();
    if (have == 0 || have == total) return out;
    const double f = static_cast<double>(total) / static_cast<double>(have);
    for (auto& c : out.counts) c = static_cast<std::uint64_t>(std::llround(static_cast<double>(c) * f));
    return out;
}

BitMask extract_ink_mask(const Raster& img, const InkColor& color) {
    if (img.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "ink extraction needs RGB8");
    BitMask mask(img.width(), img.height());
    const int c0 = color.center.r, c1 = color.center.g, c2 = color.center.b;
    const int t0 = color.tolerance[0], t1 = color.tolerance[1], t2 = color.tolerance[2];
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* p = img.row(y);
        std::uint8_t* m = mask.row(y);
        for (int x = 0; x < img.width(); ++x, p += 3) {
            m[x] = std::abs(p[0] - c0) <= t0 && std::abs(p[1] - c1) <= t1 && std::abs(p[2] - c2) <= t2;
        }
    }
    return mask;
}

std::vector<Zone> clip_zones(const BitMask& mask, const BankRecord& bank, double image_dpi, int origin_x,
                             int origin_y) {
    if (!(image_dpi > 0.0)) throw Error(ErrorCode::InvalidArgument, "dpi must be positive");
    const double scale = image_dpi / bank.zones.template_dpi;
    std::vector<Zone> out;
    for (const Zone& z : bank.zones.zones) {
        Rect r = scale_rect(z.rect, scale);
        r.x += origin_x;
        r.y += origin_y;
        r = clamp_to(r, mask.width(), mask.height());
        if (!r.empty()) out.push_back({z.kind, r});
    }
    return out;
}

Rect improve_zone_bounds(const BitMask& mask, const Rect& rect, const LabelMap& labels) {
    if (mask.width() != labels.width || mask.height() != labels.height) {
        throw Error(ErrorCode::InvalidArgument, "mask and label map sizes differ");
    }
    Rect r = clamp_to(rect, mask.width(), mask.height());
    if (r.empty()) return r;
    std::vector<char> inside(static_cast<std::size_t>(labels.count()) + 1, 0);

    auto mark = [&](int x0, int x1, int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) inside[labels.at(x, y)] = 1;
        }
    };
    // Does the outer line [x0, x1) x [y0, y1) touch a component already inside?
    auto crossed = [&](int x0, int x1, int y0, int y1) {
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        x1 = std::min(x1, mask.width());
        y1 = std::min(y1, mask.height());
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const int l = labels.at(x, y);
                if (l && inside[l]) return true;
            }
        }
        return false;
    };

    mark(r.x, r.right(), r.y, r.bottom());
    inside[0] = 0;
    for (bool grew = true; grew;) {
        grew = false;
        if (r.y > 0 && crossed(r.x - 1, r.right() + 1, r.y - 1, r.y)) {
            --r.y;
            ++r.h;
            mark(r.x, r.right(), r.y, r.y + 1);
            grew = true;
        }
        if (r.bottom() < mask.height() && crossed(r.x - 1, r.right() + 1, r.bottom(), r.bottom() + 1)) {
            ++r.h;
            mark(r.x, r.right(), r.bottom() - 1, r.bottom());
            grew = true;
        }
        if (r.x > 0 && crossed(r.x - 1, r.x, r.y - 1, r.bottom() + 1)) {
            --r.x;
            ++r.w;
            mark(r.x, r.x + 1, r.y, r.bottom());
            grew = true;
        }
        if (r.right() < mask.width() && crossed(r.right(), r.right() + 1, r.y - 1, r.bottom() + 1)) {
            ++r.w;
            mark(r.right() - 1, r.right(), r.y, r.bottom());
            grew = true;
        }
        inside[0] = 0;
    }
    return r;
}

std::vector<PawGroup> group_paws(const BitMask& mask, const Rect& rect, int h_level, int v_level) {
    if (h_level < 0 || v_level < 0) throw Error(ErrorCode::InvalidArgument, "dilation levels must be >= 0");
    const Rect r = clamp_to(rect, mask.width(), mask.height());
    if (r.empty()) return {};
    const BitMask clip = mask.crop(r);
    BitMask grown = dilate(clip, StructuringElement::horizontal(h_level));
    grown = dilate(grown, StructuringElement::vertical(v_level));
    const LabelMap lm = label_components(grown, 8);

    const int n = lm.count();
    std::vector<int> x0(n, clip.width()), y0(n, clip.height()), x1(n, -1), y1(n, -1);
    std::vector<std::size_t> pixels(n, 0);
    for (int y = 0; y < clip.height(); ++y) {
        const std::uint8_t* row = clip.row(y);
        for (int x = 0; x < clip.width(); ++x) {
            if (!row[x]) continue;
            const int g = lm.at(x, y) - 1;
            x0[g] = std::min(x0[g], x);
            y0[g] = std::min(y0[g], y);
            x1[g] = std::max(x1[g], x);
            y1[g] = std::max(y1[g], y);
            ++pixels[g];
        }
    }

    std::vector<PawGroup> groups;
    for (int g = 0; g < n; ++g) {
        if (!pixels[g]) continue;
        const Rect local{x0[g], y0[g], x1[g] - x0[g] + 1, y1[g] - y0[g] + 1};
        PawGroup pg;
        pg.box = {local.x + r.x, local.y + r.y, local.w, local.h};
        pg.pixels = pixels[g];
        pg.clip = BitMask(local.w, local.h);
        for (int y = 0; y < local.h; ++y) {
            for (int x = 0; x < local.w; ++x) {
                const int cx = local.x + x, cy = local.y + y;
                if (clip.get(cx, cy) && lm.at(cx, cy) == g + 1) pg.clip.set(x, y);
            }
        }
        groups.push_back(std::move(pg));
    }
    std::stable_sort(groups.begin(), groups.end(), [](const PawGroup& a, const PawGroup& b) {
        if (a.box.right() != b.box.right()) return a.box.right() > b.box.right();
        return a.box.y < b.box.y;
    });
    return groups;
}

std::vector<int> assign_components_to_zones(const LabelMap& labels, const std::vector<Zone>& zones) {
    const int n = labels.count();
    const std::size_t z = zones.size();
    std::vector<std::size_t> counts(static_cast<std::size_t>(n) * z, 0);
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const int l = labels.at(x, y);
            if (!l) continue;
            for (std::size_t k = 0; k < z; ++k) {
                if (zones[k].rect.contains(x, y)) ++counts[(l - 1) * z + k];
            }
        }
    }
    std::vector<int> out(n, -1);
    for (int l = 0; l < n; ++l) {
        int best = -1;
        std::size_t best_count = 0;
        long long best_area = 0;
        for (std::size_t k = 0; k < z; ++k) {
            const std::size_t c = counts[l * z + k];
            if (c == 0) continue;
            const long long area = intersect(labels.boxes[l], zones[k].rect).area();
            if (best < 0 || c > best_count || (c == best_count && area > best_area)) {
                best = static_cast<int>(k);
                best_count = c;
                best_area = area;
            }
        }
        out[l] = best;
    }
    return out;
}

}  // namespace checkseg
