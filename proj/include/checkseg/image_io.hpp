#pragma once

#include <filesystem>
#include <optional>

#include "checkseg/raster.hpp"

namespace checkseg {

/// Reads PNG or binary PNM (P5/P6), chosen by magic bytes. PNG inputs are
/// normalized to Gray8 or RGB8 (alpha dropped, palettes expanded, 16-bit
/// stripped). DPI comes from the PNG pHYs chunk when present, otherwise
/// `fallback_dpi`.
Raster read_image(const std::filesystem::path& path, double fallback_dpi = kDefaultDpi);

/// Like read_image but always returns RGB8.
Raster read_rgb(const std::filesystem::path& path, double fallback_dpi = kDefaultDpi);

/// Writes a PNG with a pHYs chunk carrying the raster's DPI.
void write_png(const Raster& img, const std::filesystem::path& path);
void write_png(const BitMask& mask, const std::filesystem::path& path, double dpi = kDefaultDpi);

/// Writes binary PPM (P6) for RGB8 or PGM (P5) for Gray8.
void write_pnm(const Raster& img, const std::filesystem::path& path);

Raster gray_to_rgb(const Raster& gray);

}  // namespace checkseg
