#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "checkseg/raster.hpp"

namespace checkseg {

inline constexpr int kBarsPerGlyph = 7;
inline constexpr int kGapsPerGlyph = kBarsPerGlyph - 1;
/// Blank units between two characters.
inline constexpr int kCharGapUnits = 3;

/// One CMC7 character: seven vertical sticks whose six gaps are 1 or 2
/// units wide. `rows` is the outline each stick follows, top to bottom,
/// one character per stick ('#' = inked); after the gaps are closed the
/// sticks fuse into this shape.
struct Cmc7Glyph {
    std::string value;  // "0".."9" or "SI".."SV"
    std::array<int, kGapsPerGlyph> gaps{};
    std::vector<std::string> rows;

    bool is_digit() const { return value.size() == 1 && value[0] >= '0' && value[0] <= '9'; }
    int digit() const { return value[0] - '0'; }
    /// Width in units: 7 sticks plus the gap units.
    int width_units() const;
};

struct GlyphTable {
    std::vector<Cmc7Glyph> glyphs;

    const Cmc7Glyph& find(std::string_view value) const;
    const Cmc7Glyph& digit(int d) const;
};

/// The shipped 15-glyph table (10 digits, separators SI..SV).
const GlyphTable& default_glyph_table();

/// Checks the glyph invariants: 7 sticks, gaps in {1, 2}, every stick inked,
/// 8-connected outline, pairwise-distinct gap patterns, all ten digits present.
/// Throws InvalidArgument.
void validate(const GlyphTable& table);

GlyphTable load_glyph_table(const std::filesystem::path& path);
void save_glyph_table(const GlyphTable& table, const std::filesystem::path& path);
/// Stable 64-bit fingerprint of the table contents.
std::uint64_t fingerprint(const GlyphTable& table);

/// Pixel geometry of band glyphs at a given resolution.
struct GlyphGeometry {
    /// Stick width and one gap unit, in pixels.
    int unit = 2;
    /// Glyph height in pixels (fills the marking band).
    int height = 126;
};

GlyphGeometry band_glyph_geometry(double dpi);
/// Pitch-proportional geometry: height = 45 units, about the band ratio.
GlyphGeometry proportional_glyph_geometry(int unit);

/// Calls `paint(x, y)` for every inked pixel of `glyph` drawn with its
/// top-left corner at (x0, y0).
template <typename Paint>
void for_each_glyph_pixel(const Cmc7Glyph& glyph, const GlyphGeometry& geom, int x0, int y0, Paint&& paint) {
    const int rows = static_cast<int>(glyph.rows.size());
    int x = x0;
    for (int bar = 0; bar < kBarsPerGlyph; ++bar) {
        for (int r = 0; r < rows; ++r) {
            if (glyph.rows[r][bar] != '#') continue;
            const int top = y0 + (r * geom.height + rows / 2) / rows;
            const int bottom = y0 + ((r + 1) * geom.height + rows / 2) / rows;
            for (int y = top; y < bottom; ++y) {
                for (int dx = 0; dx < geom.unit; ++dx) paint(x + dx, y);
            }
        }
        x += geom.unit;
        if (bar < kGapsPerGlyph) x += glyph.gaps[bar] * geom.unit;
    }
}

/// Isolated glyph on a blank mask with `pad` pixels of margin.
BitMask render_glyph(const Cmc7Glyph& glyph, const GlyphGeometry& geom, int pad = 4);

}  // namespace checkseg
