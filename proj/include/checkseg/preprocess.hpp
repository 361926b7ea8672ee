#pragma once

#include "checkseg/raster.hpp"

namespace checkseg {

/// Angles are in degrees, positive = counterclockwise as displayed
/// (image y axis pointing down).
struct SkewEstimate {
    double angle_deg = 0.0;
    /// Variance of the row profile after undoing `angle_deg`.
    double score = 0.0;
};

struct SkewOptions {
    double half_range_deg = 5.0;
    double step_deg = 0.1;
    /// First pass step; the fine pass searches +-coarse_step_deg around the winner.
    double coarse_step_deg = 0.5;
};

inline constexpr int kDefaultTrimMargin = 2;

/// Variance of the row profile of `mask` rotated by `-angle_deg` about its
/// centre. Ink is projected by pixel centre; rows falling off the frame are
/// dropped.
double skew_objective(const BitMask& mask, double angle_deg);

/// Grid search (coarse then fine) for the angle maximizing skew_objective.
/// Throws NoInk on an empty mask.
SkewEstimate estimate_skew(const BitMask& mask, const SkewOptions& options = {});
SkewEstimate estimate_skew(const BitMask& mask, double half_range_deg, double step_deg);

/// Rotation about the image centre with bilinear sampling; dimensions are
/// preserved and uncovered pixels take `fill`.
Raster rotate(const Raster& img, double angle_deg, Rgb fill = {255, 255, 255});
/// Nearest-neighbour rotation; uncovered positions are background.
BitMask rotate(const BitMask& mask, double angle_deg);

/// Crop box: ink bounding box grown by `margin`, clamped to the frame.
Rect trim_rect(const BitMask& ink, int margin = kDefaultTrimMargin);

struct Trimmed {
    Raster image;
    /// Crop in the coordinates of the input image.
    Rect crop;
};

Trimmed trim_margins(const Raster& img, const BitMask& ink, int margin = kDefaultTrimMargin);

}  // namespace checkseg
