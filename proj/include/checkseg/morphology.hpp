#pragma once

#include <cstdint>
#include <vector>

#include "checkseg/raster.hpp"

namespace checkseg {

enum class SeShape { HorizontalSegment, VerticalSegment, Square };

/// Centred structuring element. `level` k spans 2k+1 pixels along the
/// segment axis (or a (2k+1)^2 square).
struct StructuringElement {
    SeShape shape = SeShape::HorizontalSegment;
    int level = 1;

    static StructuringElement horizontal(int level) { return {SeShape::HorizontalSegment, level}; }
    static StructuringElement vertical(int level) { return {SeShape::VerticalSegment, level}; }
    static StructuringElement square(int level) { return {SeShape::Square, level}; }
};

/// Connected components. Label 0 is background; labels run 1..K in
/// raster-scan order of first encounter.
struct LabelMap {
    int width = 0;
    int height = 0;
    int connectivity = 8;
    std::vector<std::int32_t> labels;
    /// Indexed by label - 1.
    std::vector<Rect> boxes;
    std::vector<std::size_t> sizes;

    int count() const { return static_cast<int>(boxes.size()); }
    std::int32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    const Rect& box(int label) const { return boxes.at(static_cast<std::size_t>(label) - 1); }
    std::size_t size(int label) const { return sizes.at(static_cast<std::size_t>(label) - 1); }
    /// Ink of one component as a full-frame mask.
    BitMask component_mask(int label) const;
    /// Label of the largest component (lowest label on ties), or 0 when empty.
    int largest() const;
};

/// Binary dilation; borders clamp (no wraparound).
BitMask dilate(const BitMask& mask, const StructuringElement& se);

/// Two-pass union-find labeling; `connectivity` is 4 or 8.
LabelMap label_components(const BitMask& mask, int connectivity = 8);
int count_components(const BitMask& mask, int connectivity = 8);

struct UltimateDilation {
    BitMask mask;
    int iterations = 0;
    int components = 0;
};

/// Dilates repeatedly until the 8-connected component count reaches one or
/// stops decreasing. The step that fails to reduce the count is discarded.
/// Throws DidNotConverge when `max_iter` dilations were spent and the count
/// was still above one and still falling.
UltimateDilation ultimate_dilate(const BitMask& mask, const StructuringElement& se, int max_iter);

/// Clears 8-connected components with fewer than `min_size` pixels.
BitMask remove_small_components(const BitMask& mask, std::size_t min_size);

}  // namespace checkseg
