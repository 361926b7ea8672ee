#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "checkseg/cmc7.hpp"
#include "checkseg/efd.hpp"
#include "checkseg/projection.hpp"
#include "checkseg/registry.hpp"

namespace checkseg {

/// Normalized descriptors of the ten dilated digit glyphs.
struct ReferenceSet {
    std::array<EfdSet, 10> digits;
    int harmonics = kDefaultHarmonics;
    std::uint64_t table_fingerprint = 0;
};

/// Probes are resampled to this stick pitch before dilation, so every
/// glyph is compared at the same scale and aspect.
inline constexpr int kCanonicalUnit = 3;

struct RecognitionOptions {
    int harmonics = kDefaultHarmonics;
    int max_iter = 8;
};

/// ink clip -> canonical resample -> ultimate horizontal dilation ->
/// largest component -> outer contour -> normalized EFD.
/// Throws EmptyGlyph, DidNotConverge, TooFewPoints, DegenerateShape.
EfdSet glyph_descriptor(const BitMask& clip, const RecognitionOptions& options = {});

ReferenceSet build_references(const GlyphTable& table, const RecognitionOptions& options = {});

/// Reads `<table>.refs.json` when its fingerprint matches the table,
/// otherwise rebuilds the set and rewrites the cache (best effort).
ReferenceSet load_or_build_references(const std::filesystem::path& table_path, const RecognitionOptions& options = {});
/// References for the compiled-in table, built once per process.
const ReferenceSet& default_references();

void save_references(const ReferenceSet& refs, const std::filesystem::path& path);
/// Throws Io or Format.
ReferenceSet load_references(const std::filesystem::path& path);

struct DigitRecognition {
    int digit = -1;
    std::array<double, 10> distances{};
};

DigitRecognition recognize_digit(const BitMask& glyph_mask, const ReferenceSet& refs,
                                 const RecognitionOptions& options = {});

/// 10x10 matrix of reference-to-reference distances, row = probe.
std::array<std::array<double, 10>, 10> reference_distance_matrix(const ReferenceSet& refs);

/// Recognizes the glyphs at the layout's code positions. `band_chars` are
/// in `band` coordinates. Throws BandTooShort.
std::array<int, 2> extract_bank_code(const std::vector<CharBox>& band_chars, const BitMask& band,
                                     const BandLayout& layout, const ReferenceSet& refs,
                                     const RecognitionOptions& options = {});

std::string code_string(const std::array<int, 2>& code);

/// Throws UnknownBank.
const BankRecord& lookup_bank(std::string_view code, const Registry& registry);
const BankRecord& lookup_bank(const std::array<int, 2>& code, const Registry& registry);

}  // namespace checkseg
