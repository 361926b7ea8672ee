#pragma once

// Single-threaded reference versions of the OpenMP kernels. They share the
// arithmetic of the parallel code, so results must match bit for bit; the
// tests compare both and the benchmark times both.

#include "checkseg/handwriting.hpp"
#include "checkseg/morphology.hpp"
#include "checkseg/preprocess.hpp"
#include "checkseg/projection.hpp"
#include "checkseg/raster.hpp"

namespace checkseg::reference {

Raster to_grayscale(const Raster& img);
ColorHistogram color_histogram(const Raster& img, int bits_per_channel = kDefaultHistogramBits);
Profile profile(const BitMask& mask, Axis axis);
BitMask dilate(const BitMask& mask, const StructuringElement& se);
Raster rotate(const Raster& img, double angle_deg, Rgb fill = {255, 255, 255});
BitMask rotate(const BitMask& mask, double angle_deg);
double skew_objective(const BitMask& mask, double angle_deg);
/// Same search grid and tie rule as checkseg::estimate_skew.
SkewEstimate estimate_skew(const BitMask& mask, const SkewOptions& options = {});
BitMask extract_ink_mask(const Raster& img, const InkColor& color);

}  // namespace checkseg::reference
