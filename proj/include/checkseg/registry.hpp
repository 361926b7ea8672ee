#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "checkseg/raster.hpp"

namespace checkseg {

enum class ZoneKind { DigitalAmount, LiteralAmount, Conductor, Date, Signature };

inline constexpr std::array<ZoneKind, 5> kAllZoneKinds = {ZoneKind::DigitalAmount, ZoneKind::LiteralAmount,
                                                          ZoneKind::Conductor, ZoneKind::Date, ZoneKind::Signature};

std::string_view to_string(ZoneKind kind);
/// Throws InvalidArgument for unknown names.
ZoneKind zone_kind_from_string(std::string_view name);

struct Zone {
    ZoneKind kind = ZoneKind::DigitalAmount;
    Rect rect;
};

/// Zone rectangles in template pixels, relative to the top-left corner of
/// the check frame.
struct ZoneTemplate {
    double template_dpi = 150.0;
    int frame_width = 1050;
    int frame_height = 540;
    /// Bottom rule of the printed body; the marking band lies below it.
    int body_bottom = 415;
    std::vector<Zone> zones;

    const Zone* find(ZoneKind kind) const;
};

/// Maps a template rect to an image at `dpi`. Edges are scaled and rounded
/// independently so adjacent rects stay adjacent.
Rect scale_rect(const Rect& r, double scale);

/// One band field: `digits` numeric characters, or a single separator glyph.
struct BandField {
    std::string name;
    int digits = 0;
    std::string separator;

    friend bool operator==(const BandField&, const BandField&) = default;
};

struct BandLayout {
    std::vector<BandField> fields;
    /// 0-based character indices of the two bank-code digits.
    std::array<int, 2> code_positions{20, 21};

    int length() const;
    /// Glyph value at every band position, with `digit_fill` for digit slots.
    std::vector<std::string> glyph_values(char digit_fill = '0') const;
    friend bool operator==(const BandLayout&, const BandLayout&) = default;
};

BandLayout default_band_layout();

struct BankRecord {
    std::string code;  // two decimal digits
    std::string name;
    ZoneTemplate zones;
    BandLayout band;
};

struct Registry {
    std::vector<BankRecord> banks;

    /// nullptr when absent.
    const BankRecord* find_code(std::string_view code) const;
    const BankRecord* find_name(std::string_view name) const;
};

/// Validates codes (two digits, unique), zone rects (inside the frame,
/// kinds unique) and band layouts. Throws InvalidArgument.
void validate(const Registry& registry);

/// The six shipped banks.
const Registry& default_registry();

Registry load_registry(const std::filesystem::path& path);
void save_registry(const Registry& registry, const std::filesystem::path& path);

/// Data files installed with the source tree (registry, glyph table).
std::filesystem::path default_data_dir();

}  // namespace checkseg
