#include "checkseg/bankid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "checkseg/error.hpp"
#include "checkseg/morphology.hpp"

namespace checkseg {
namespace {

using nlohmann::json;

// Seven sticks, four short gaps, two long ones.
constexpr int kGlyphWidthUnits = 15;

// Every glyph is the same number of units wide, so the ink bounds fix the
// scale in both axes; stick thickening only shifts them by a pixel.
BitMask canonical_resample(const BitMask& clip, int pad) {
    const Rect box = *clip.bounding_box();
    const BitMask glyph = clip.crop(box);
    const GlyphGeometry geom = proportional_glyph_geometry(kCanonicalUnit);
    const int tw = kGlyphWidthUnits * geom.unit;
    const int th = geom.height;
    BitMask out(tw + 2 * pad, th + 2 * pad);
    for (int y = 0; y < th; ++y) {
        const int sy = std::min(glyph.height() - 1, static_cast<int>((y + 0.5) * glyph.height() / th));
        const std::uint8_t* src = glyph.row(sy);
        std::uint8_t* dst = out.row(y + pad) + pad;
        for (int x = 0; x < tw; ++x) {
            const int sx = std::min(glyph.width() - 1, static_cast<int>((x + 0.5) * glyph.width() / tw));
            dst[x] = src[sx];
        }
    }
    return out;
}

json efd_to_json(const EfdSet& e) {
    json h = json::array();
    for (const Harmonic& c : e.harmonics) h.push_back({c.a, c.b, c.c, c.d});
    return {{"a0", e.a0}, {"c0", e.c0}, {"normalized", e.normalized}, {"harmonics", h}};
}

EfdSet efd_from_json(const json& j) {
    EfdSet e;
    e.a0 = j.at("a0").get<double>();
    e.c0 = j.at("c0").get<double>();
    e.normalized = j.at("normalized").get<bool>();
    for (const json& c : j.at("harmonics")) {
        e.harmonics.push_back({c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>(), c.at(3).get<double>()});
    }
    return e;
}

std::string hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << v;
    return s.str();
}

}  // namespace

EfdSet glyph_descriptor(const BitMask& clip, const RecognitionOptions& options) {
    if (!clip.any()) throw Error(ErrorCode::EmptyGlyph, "glyph clip holds no ink");
    const int level = (kCanonicalUnit + 1) / 2;
    const BitMask canon = canonical_resample(clip, level * options.max_iter + 2);
    const UltimateDilation ud = ultimate_dilate(canon, StructuringElement::horizontal(level), options.max_iter);
    const LabelMap lm = label_components(ud.mask, 8);
    const ContourChain contour = trace_contour(lm, lm.largest());
    return normalize_efd(compute_efd(contour, options.harmonics));
}

ReferenceSet build_references(const GlyphTable& table, const RecognitionOptions& options) {
    ReferenceSet refs;
    refs.harmonics = options.harmonics;
    refs.table_fingerprint = fingerprint(table);
    const GlyphGeometry geom = proportional_glyph_geometry(kCanonicalUnit);
    for (int d = 0; d < 10; ++d) refs.digits[d] = glyph_descriptor(render_glyph(table.digit(d), geom), options);
    return refs;
}

void save_references(const ReferenceSet& refs, const std::filesystem::path& path) {
    json digits = json::array();
    for (const EfdSet& e : refs.digits) digits.push_back(efd_to_json(e));
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << json{{"schema", 1}, {"fingerprint", hex(refs.table_fingerprint)}, {"harmonics", refs.harmonics},
                {"digits", digits}}
               .dump(1)
        << '\n';
}

ReferenceSet load_references(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    ReferenceSet refs;
    try {
        const json j = json::parse(in);
        refs.table_fingerprint = std::stoull(j.at("fingerprint").get<std::string>(), nullptr, 16);
        refs.harmonics = j.at("harmonics").get<int>();
        const json& digits = j.at("digits");
        if (digits.size() != 10) throw Error(ErrorCode::Format, "reference set needs 10 digits");
        for (int d = 0; d < 10; ++d) refs.digits[d] = efd_from_json(digits.at(d));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    }
    return refs;
}

ReferenceSet load_or_build_references(const std::filesystem::path& table_path, const RecognitionOptions& options) {
    const GlyphTable table = load_glyph_table(table_path);
    const std::filesystem::path cache = table_path.string() + ".refs.json";
    try {
        ReferenceSet cached = load_references(cache);
        if (cached.table_fingerprint == fingerprint(table) && cached.harmonics == options.harmonics) return cached;
    } catch (const Error&) {
    }
    ReferenceSet refs = build_references(table, options);
    try {
        save_references(refs, cache);
    } catch (const Error&) {
        // read-only data directory; the set is still usable
    }
    return refs;
}

const ReferenceSet& default_references() {
    static const ReferenceSet refs = build_references(default_glyph_table());
    return refs;
}

DigitRecognition recognize_digit(const BitMask& glyph_mask, const ReferenceSet& refs,
                                 const RecognitionOptions& options) {
    RecognitionOptions opts = options;
    opts.harmonics = refs.harmonics;
    const EfdSet probe = glyph_descriptor(glyph_mask, opts);
    DigitRecognition r;
    for (int d = 0; d < 10; ++d) {
        r.distances[d] = efd_distance(probe, refs.digits[d]);
        if (r.digit < 0 || r.distances[d] < r.distances[r.digit]) r.digit = d;
    }
    return r;
}

std::array<std::array<double, 10>, 10> reference_distance_matrix(const ReferenceSet& refs) {
    std::array<std::array<double, 10>, 10> m{};
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) m[i][j] = efd_distance(refs.digits[i], refs.digits[j]);
    }
    return m;
}

std::array<int, 2> extract_bank_code(const std::vector<CharBox>& band_chars, const BitMask& band,
                                     const BandLayout& layout, const ReferenceSet& refs,
                                     const RecognitionOptions& options) {
    const int needed = std::max(layout.code_positions[0], layout.code_positions[1]) + 1;
    if (static_cast<int>(band_chars.size()) < needed) {
        throw Error(ErrorCode::BandTooShort, "band has " + std::to_string(band_chars.size()) +
                                                 " characters, bank code needs " + std::to_string(needed));
    }
    std::array<int, 2> code{};
    for (int i = 0; i < 2; ++i) {
        const Rect r = band_chars[layout.code_positions[i]].rect;
        code[i] = recognize_digit(band.crop(r), refs, options).digit;
    }
    return code;
}

std::string code_string(const std::array<int, 2>& code) {
    return {static_cast<char>('0' + code[0]), static_cast<char>('0' + code[1])};
}

const BankRecord& lookup_bank(std::string_view code, const Registry& registry) {
    if (const BankRecord* b = registry.find_code(code)) return *b;
    throw Error(ErrorCode::UnknownBank, "no bank with code " + std::string(code));
}

const BankRecord& lookup_bank(const std::array<int, 2>& code, const Registry& registry) {
    return lookup_bank(code_string(code), registry);
}

}  // namespace checkseg
