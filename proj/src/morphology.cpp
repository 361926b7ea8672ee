#include "checkseg/morphology.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "checkseg/error.hpp"

namespace checkseg {
namespace {

void dilate_rows(const BitMask& in, BitMask& out, int k) {
    const int w = in.width();
#pragma omp parallel
    {
        std::vector<int> prefix(static_cast<std::size_t>(w) + 1);
#pragma omp for schedule(static)
        for (int y = 0; y < in.height(); ++y) {
            const std::uint8_t* src = in.row(y);
            std::uint8_t* dst = out.row(y);
            prefix[0] = 0;
            for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + src[x];
            for (int x = 0; x < w; ++x) {
                const int lo = std::max(0, x - k);
                const int hi = std::min(w, x + k + 1);
                dst[x] = prefix[hi] - prefix[lo] > 0 ? 1 : 0;
            }
        }
    }
}

void dilate_columns(const BitMask& in, BitMask& out, int k) {
    const int w = in.width();
    const int h = in.height();
    constexpr int kChunk = 64;
    const int chunks = (w + kChunk - 1) / kChunk;
#pragma omp parallel
    {
        std::vector<int> window(kChunk);
#pragma omp for schedule(static)
        for (int chunk = 0; chunk < chunks; ++chunk) {
            const int x0 = chunk * kChunk;
            const int x1 = std::min(w, x0 + kChunk);
            std::fill(window.begin(), window.end(), 0);
            // Window covers rows [y - k, y + k]; prime it with [0, k - 1].
            for (int y = 0; y < std::min(k, h); ++y) {
                const std::uint8_t* src = in.row(y);
                for (int x = x0; x < x1; ++x) window[x - x0] += src[x];
            }
            for (int y = 0; y < h; ++y) {
                if (y + k < h) {
                    const std::uint8_t* add = in.row(y + k);
                    for (int x = x0; x < x1; ++x) window[x - x0] += add[x];
                }
                if (y - k - 1 >= 0) {
                    const std::uint8_t* drop = in.row(y - k - 1);
                    for (int x = x0; x < x1; ++x) window[x - x0] -= drop[x];
                }
                std::uint8_t* dst = out.row(y);
                for (int x = x0; x < x1; ++x) dst[x] = window[x - x0] > 0 ? 1 : 0;
            }
        }
    }
}

class DisjointSet {
public:
    int make() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent_[a] = b;
    }
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<int> parent_;
};

}  // namespace

BitMask LabelMap::component_mask(int label) const {
    BitMask out(width, height);
    auto bits = out.bits();
    for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = labels[i] == label ? 1 : 0;
    return out;
}

int LabelMap::largest() const {
    int best = 0;
    std::size_t best_size = 0;
    for (int l = 1; l <= count(); ++l) {
        if (size(l) > best_size) {
            best_size = size(l);
            best = l;
        }
    }
    return best;
}

BitMask dilate(const BitMask& mask, const StructuringElement& se) {
    if (se.level < 0) throw Error(ErrorCode::InvalidArgument, "structuring element level must be >= 0");
    if (se.level == 0) return mask;
    BitMask out(mask.width(), mask.height());
    switch (se.shape) {
        case SeShape::HorizontalSegment:
            dilate_rows(mask, out, se.level);
            break;
        case SeShape::VerticalSegment:
            dilate_columns(mask, out, se.level);
            break;
        case SeShape::Square: {
            BitMask tmp(mask.width(), mask.height());
            dilate_rows(mask, tmp, se.level);
            dilate_columns(tmp, out, se.level);
            break;
        }
    }
    return out;
}

LabelMap label_components(const BitMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8) {
        throw Error(ErrorCode::InvalidArgument, "connectivity must be 4 or 8");
    }
    const int w = mask.width();
    const int h = mask.height();
    LabelMap lm;
    lm.width = w;
    lm.height = h;
    lm.connectivity = connectivity;
    lm.labels.assign(static_cast<std::size_t>(w) * h, 0);

    // Pass 1: provisional labels (1-based) with equivalences.
    DisjointSet sets;
    sets.make();  // slot 0 = background
    auto prov = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= w) return 0;
        return lm.labels[static_cast<std::size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* r = mask.row(y);
        for (int x = 0; x < w; ++x) {
            if (!r[x]) continue;
            int neighbours[4];
            int n = 0;
            if (int l = prov(x - 1, y)) neighbours[n++] = l;
            if (int l = prov(x, y - 1)) neighbours[n++] = l;
            if (connectivity == 8) {
                if (int l = prov(x - 1, y - 1)) neighbours[n++] = l;
                if (int l = prov(x + 1, y - 1)) neighbours[n++] = l;
            }
            int label;
            if (n == 0) {
                label = sets.make();
            } else {
                label = *std::min_element(neighbours, neighbours + n);
                for (int i = 0; i < n; ++i) sets.unite(label, neighbours[i]);
            }
            lm.labels[static_cast<std::size_t>(y) * w + x] = label;
        }
    }

    // Pass 2: resolve roots, renumber by first encounter, collect stats.
    std::vector<std::int32_t> final_of(sets.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto& l = lm.labels[static_cast<std::size_t>(y) * w + x];
            if (!l) continue;
            const int root = sets.find(l);
            if (!final_of[root]) {
                lm.boxes.push_back({x, y, 1, 1});
                lm.sizes.push_back(0);
                final_of[root] = static_cast<std::int32_t>(lm.boxes.size());
            }
            l = final_of[root];
            Rect& b = lm.boxes[l - 1];
            const int x0 = std::min(b.x, x);
            const int x1 = std::max(b.right(), x + 1);
            b.x = x0;
            b.w = x1 - x0;
            b.h = std::max(b.bottom(), y + 1) - b.y;
            ++lm.sizes[l - 1];
        }
    }
    return lm;
}

int count_components(const BitMask& mask, int connectivity) {
    return label_components(mask, connectivity).count();
}

UltimateDilation ultimate_dilate(const BitMask& mask, const StructuringElement& se, int max_iter) {
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
    int count = count_components(mask);
    if (count <= 1) return {mask, 0, count};
    BitMask current = mask;
    for (int it = 1; it <= max_iter; ++it) {
        BitMask next = dilate(current, se);
        const int next_count = count_components(next);
        if (next_count == 1) return {std::move(next), it, 1};
        if (next_count >= count) return {std::move(current), it - 1, count};
        current = std::move(next);
        count = next_count;
    }
    throw Error(ErrorCode::DidNotConverge,
                std::to_string(count) + " components left after " + std::to_string(max_iter) + " dilations");
}

BitMask remove_small_components(const BitMask& mask, std::size_t min_size) {
    if (min_size <= 1) return mask;
    const LabelMap lm = label_components(mask, 8);
    BitMask out(mask.width(), mask.height());
    auto bits = out.bits();
    for (std::size_t i = 0; i < lm.labels.size(); ++i) {
        const auto l = lm.labels[i];
        bits[i] = (l && lm.sizes[l - 1] >= min_size) ? 1 : 0;
    }
    return out;
}

}  // namespace checkseg
