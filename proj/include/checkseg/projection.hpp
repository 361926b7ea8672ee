#pragma once

#include <vector>

#include "checkseg/raster.hpp"

namespace checkseg {

enum class Axis { Rows, Columns };

/// Ink counts per row (Axis::Rows) or per column (Axis::Columns).
struct Profile {
    Axis axis = Axis::Rows;
    std::vector<int> counts;
};

Profile profile(const BitMask& mask, Axis axis);

/// Height of the 16 mm marking band at `dpi`, in pixels.
int nominal_band_height(double dpi);

struct BandGeometry {
    /// Full-width strip of the band rows.
    Rect rows;
    int nominal_height_px = 0;
};

struct BandOptions {
    /// Minimum row count, as a fraction of the mask width, for a row to count as inked.
    double noise_floor = 0.005;
    /// Blank rows separating the band from the body, as a fraction of the nominal height.
    double min_gap = 0.15;
    /// Accepted band height range, as fractions of the nominal height.
    double min_height = 0.5;
    double max_height = 1.5;
    /// The band must end inside this bottom fraction of the image.
    double bottom_fraction = 0.25;
};

/// Finds the marking band at the bottom of a deskewed, trimmed check.
/// Inked rows closer than `min_gap` are merged; the bottom-most cluster is
/// the band. Throws BandNotFound or BandTooTall.
BandGeometry locate_marking_band(const BitMask& mask, double dpi, const BandOptions& options = {});

struct CharBox {
    Rect rect;
    int index = 0;
};

struct BandSegmentation {
    std::vector<CharBox> boxes;
    /// Estimated stick unit, in pixels.
    double stick_gap = 0.0;
};

inline constexpr double kDefaultCharGapFactor = 2.5;
/// Columns with at most this fraction of the band height inked count as blank.
inline constexpr double kDefaultBandColumnFloor = 0.1;

/// Cuts the band into characters. Sticks are one unit u wide; a blank of
/// at least `gap_factor * u` between two sticks (judged from their centers)
/// is a character boundary. Boxes are in band coordinates, left to right.
/// Throws EmptyBand.
BandSegmentation segment_band_characters(const BitMask& band, double gap_factor = kDefaultCharGapFactor,
                                         double column_floor = kDefaultBandColumnFloor);

/// Half the median center distance between adjacent column runs with more
/// than `floor` ink pixels; 0 when fewer than two runs.
double estimate_stick_gap(const Profile& columns, int floor = 0);

}  // namespace checkseg
