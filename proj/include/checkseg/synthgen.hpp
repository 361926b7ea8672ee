#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "checkseg/cmc7.hpp"
#include "checkseg/raster.hpp"
#include "checkseg/registry.hpp"

namespace checkseg {

struct NoiseSpec {
    /// Per-channel Gaussian sigma, 8-bit units.
    double sigma = 2.5;
    /// Dark specks per pixel.
    double speckle_density = 5e-5;
};

using PerZone = std::array<double, 5>;
using PerZoneRange = std::array<std::pair<int, int>, 5>;

/// Indexed by ZoneKind.
inline constexpr PerZone kDefaultOverflowProb = {0.0, 0.06, 0.06, 0.0, 0.11};
inline constexpr PerZoneRange kDefaultPawCounts = {{{1, 1}, {4, 9}, {2, 6}, {2, 3}, {1, 1}}};

struct GenSpec {
    std::string bank_code = "10";
    double dpi = 200.0;
    std::uint64_t seed = 1;
    NoiseSpec noise;
    double skew_deg = 0.0;
    Rgb ink_rgb{20, 52, 164};
    PerZone overflow_prob = kDefaultOverflowProb;
    PerZoneRange paw_count_range = kDefaultPawCounts;
};

/// Throws InvalidArgument.
void validate(const GenSpec& spec);

/// Layout of a rendered check at one resolution. Frame coordinates have
/// their origin at the outer top-left corner of the printed border.
struct CheckGeometry {
    double scale = 1.0;
    int frame_width = 0;
    int frame_height = 0;
    int body_bottom = 0;
    int border = 2;
    int brush = 2;
    /// Blank paper around the frame on every side.
    int pad = 0;
    int canvas_width = 0;
    int canvas_height = 0;
    GlyphGeometry glyph;
    int band_y = 0;

    Rect frame() const { return {pad, pad, frame_width, frame_height}; }
};

CheckGeometry check_geometry(const BankRecord& bank, double dpi);

inline constexpr Rgb kPaperRgb{252, 252, 244};
inline constexpr Rgb kPrintRgb{84, 84, 84};
inline constexpr Rgb kBandRgb{28, 28, 28};
inline constexpr Rgb kSpeckRgb{60, 60, 60};

struct GtZone {
    ZoneKind kind = ZoneKind::DigitalAmount;
    /// Template rect scaled to the image, frame coordinates.
    Rect template_rect;
    /// Handwriting bounding box, frame coordinates (empty when no ink).
    Rect ink_bbox;
    int paw_count = 0;
    bool overflowed = false;
    std::size_t ink_pixels = 0;
};

struct CheckGroundTruth {
    std::string bank_code;
    std::string bank_name;
    std::array<int, 2> code_digits{};
    double dpi = 200.0;
    double skew_deg = 0.0;
    Rgb ink_rgb;
    /// Frame inside the unrotated canvas.
    Rect frame;
    /// Band strip and glyph boxes, frame coordinates.
    Rect band_rect;
    std::vector<Rect> band_char_rects;
    std::vector<std::string> band_char_values;
    std::vector<GtZone> zones;
    GenSpec spec;
};

/// Synthetic handwriting for every zone, frame-sized.
struct Handwriting {
    BitMask ink;
    /// Per frame pixel: 0, or 1 + index into `zones`.
    std::vector<std::uint8_t> zone_of;
    std::vector<GtZone> zones;
};

struct GeneratedCheck {
    Raster image;
    CheckGroundTruth gt;
};

/// Printed blank check (no noise, no skew). Deterministic in (bank, spec).
GeneratedCheck generate_template(const BankRecord& bank, const GenSpec& spec,
                                 const GlyphTable& glyphs = default_glyph_table());

/// Handwriting only; what fill_check paints. Deterministic in (bank, spec).
Handwriting render_handwriting(const BankRecord& bank, const GenSpec& spec);

/// Paints handwriting into the template, then rotates by spec.skew_deg and
/// adds noise and specks.
GeneratedCheck fill_check(const GeneratedCheck& blank, const BankRecord& bank, const GenSpec& spec);

/// The blank template as a scanner would deliver it: noise and specks with
/// an independent realization, no skew.
Raster scan_template(const GeneratedCheck& blank, const GenSpec& spec);

/// Adds rounded Gaussian noise to every channel in place.
void add_gaussian_noise(Raster& img, double sigma, std::uint64_t seed, std::uint64_t stream);
void add_speckle(Raster& img, double density, std::uint64_t seed, std::uint64_t stream);

/// Where frame point (x, y) lands in the filled canvas after the skew and
/// a later rotate(canvas, -correction_deg).
std::pair<double, double> map_frame_point(const CheckGroundTruth& gt, int canvas_width, int canvas_height, double x,
                                          double y, double correction_deg);

struct CorpusOptions {
    /// Bank names or codes; empty = every registry bank.
    std::vector<std::string> banks;
    int count = 20;
    std::uint64_t base_seed = 2024;
    double dpi = 200.0;
    NoiseSpec noise;
    double max_skew_deg = 3.0;
    PerZone overflow_prob = kDefaultOverflowProb;
};

/// One spec per check: banks in registry order, `count` each. Skew and ink
/// colour are drawn from each check's own seed. Throws UnknownBank.
std::vector<GenSpec> corpus_specs(const Registry& registry, const CorpusOptions& options);

struct CorpusEntry {
    std::string bank_name;
    std::filesystem::path dir;
};

/// Writes <out>/<bank>/<seed>/{template.png, filled.png, gt.json}.
CorpusEntry write_corpus_entry(const Registry& registry, const GenSpec& spec, const std::filesystem::path& out_dir);

nlohmann::json to_json(const GenSpec& spec);
GenSpec gen_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CheckGroundTruth& gt);
CheckGroundTruth ground_truth_from_json(const nlohmann::json& j);
nlohmann::json rect_json(const Rect& r);
Rect rect_from_json_array(const nlohmann::json& j);

}  // namespace checkseg
