#pragma once

#include <array>
#include <optional>
#include <vector>

#include "checkseg/morphology.hpp"
#include "checkseg/raster.hpp"
#include "checkseg/registry.hpp"

namespace checkseg {

struct InkColor {
    Rgb center;
    std::array<int, 3> tolerance{8, 8, 8};
};

inline constexpr std::uint64_t kDefaultNoiseFloor = 10;

/// Per-bin max(filled - template, 0); the ink is the bin with the largest
/// difference, ties going to the darker bin. Tolerance defaults to one
/// quantization step. Throws NoDifference when no bin exceeds the floor,
/// InvalidArgument when the quantizations differ.
InkColor handwriting_color(const ColorHistogram& filled, const ColorHistogram& blank,
                           std::uint64_t noise_floor = kDefaultNoiseFloor);

/// Scales every bin so the histogram totals `total` pixels (rounded).
ColorHistogram rescale(const ColorHistogram& hist, std::uint64_t total);

/// Per-pixel band test: every channel within tolerance of the ink centre.
BitMask extract_ink_mask(const Raster& img, const InkColor& color);

/// Template zones scaled to `image_dpi`, shifted by the frame origin and
/// clamped to the mask. Zones that fall entirely outside are dropped.
std::vector<Zone> clip_zones(const BitMask& mask, const BankRecord& bank, double image_dpi, int origin_x = 0,
                             int origin_y = 0);

/// Pushes each edge outward while a component with ink inside the rect
/// still has ink just beyond that edge. The result is the smallest rect
/// containing `rect` that no component crosses (clamped to the frame).
Rect improve_zone_bounds(const BitMask& mask, const Rect& rect, const LabelMap& labels);

struct PawGroup {
    /// Bounding box of the group's original ink, image coordinates.
    Rect box;
    /// Original ink of the group, cropped to `box`.
    BitMask clip;
    std::size_t pixels = 0;
};

inline constexpr int kDefaultPawHLevel = 3;
inline constexpr int kDefaultPawVLevel = 1;

/// Groups the ink inside `rect` into pieces of words: components of the
/// mask dilated horizontally (h_level) then vertically (v_level). Groups
/// are ordered right-to-left, then top-to-bottom.
std::vector<PawGroup> group_paws(const BitMask& mask, const Rect& rect, int h_level = kDefaultPawHLevel,
                                 int v_level = kDefaultPawVLevel);

/// Zone index (into `zones`) per component, indexed by label - 1; -1 when
/// the component overlaps no zone. Majority of pixels wins; ties go to the
/// larger box overlap, then to the earlier zone.
std::vector<int> assign_components_to_zones(const LabelMap& labels, const std::vector<Zone>& zones);

}  // namespace checkseg
