#pragma once

#include <vector>

#include "checkseg/morphology.hpp"
#include "checkseg/raster.hpp"

namespace checkseg {

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
    double x = 0.0;
    double y = 0.0;
};

/// Closed outer boundary of one component, counterclockwise as displayed,
/// starting at its topmost-then-leftmost pixel. Consecutive points are
/// 8-adjacent and the last point is 8-adjacent to the first.
struct ContourChain {
    std::vector<Point> points;
};

/// Moore-neighbour trace of the outer boundary of `label`.
/// Throws UnknownLabel.
ContourChain trace_contour(const LabelMap& labels, int label);
ContourChain trace_contour(const BitMask& mask, int label, const LabelMap& labels);

struct Harmonic {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

/// Elliptic Fourier descriptors of a closed contour:
///   x(t) = A0 + sum_n a_n cos(2 pi n t) + b_n sin(2 pi n t)
///   y(t) = C0 + sum_n c_n cos(2 pi n t) + d_n sin(2 pi n t),  t in [0, 1).
struct EfdSet {
    double a0 = 0.0;
    double c0 = 0.0;
    std::vector<Harmonic> harmonics;
    bool normalized = false;

    int order() const { return static_cast<int>(harmonics.size()); }
};

inline constexpr int kDefaultHarmonics = 30;

/// Equal-weight discrete projection of the K contour samples onto the
/// first `harmonics` orders (computed with a real FFT). Requires K >= 2N+1,
/// otherwise throws TooFewPoints.
EfdSet compute_efd(const ContourChain& contour, int harmonics = kDefaultHarmonics);
EfdSet compute_efd(const std::vector<PointF>& samples, int harmonics);

/// Removes position, start point, orientation and size: A0 = C0 = 0, the
/// first harmonic starts at its semi-major axis, which lies on +x with unit
/// length. The leftover half-turn ambiguity is fixed by making the
/// largest-magnitude even-order coefficient positive. Throws DegenerateShape.
EfdSet normalize_efd(const EfdSet& efd);

/// Evaluates the first `harmonics` orders at `samples` evenly spaced t.
std::vector<PointF> reconstruct(const EfdSet& efd, int harmonics, int samples);

/// Normalized squared-difference distance between two normalized sets of
/// equal order; 0 for identical sets, symmetric, in [0, 2].
double efd_distance(const EfdSet& probe, const EfdSet& reference);

}  // namespace checkseg
