#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "checkseg/bankid.hpp"
#include "checkseg/error.hpp"
#include "checkseg/handwriting.hpp"
#include "fixtures.hpp"

using namespace checkseg;
namespace fs = std::filesystem;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("checkseg_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

BitMask glyph_at_unit(int digit, int unit) {
    return render_glyph(default_glyph_table().digit(digit), proportional_glyph_geometry(unit));
}

}  // namespace

TEST(GlyphTable, DefaultIsValid) {
    const GlyphTable& t = default_glyph_table();
    EXPECT_NO_THROW(validate(t));
    EXPECT_EQ(t.glyphs.size(), 15u);
    for (const Cmc7Glyph& g : t.glyphs) {
        for (int gap : g.gaps) EXPECT_TRUE(gap == 1 || gap == 2);
    }
}

TEST(GlyphTable, DuplicatePatternRejected) {
    GlyphTable t = default_glyph_table();
    t.glyphs[1].gaps = t.glyphs[0].gaps;
    EXPECT_EQ(code_of([&] { validate(t); }), ErrorCode::InvalidArgument);
    GlyphTable u = default_glyph_table();
    u.glyphs[2].gaps[0] = 3;
    EXPECT_EQ(code_of([&] { validate(u); }), ErrorCode::InvalidArgument);
}

TEST(GlyphTable, ShippedFileMatchesDefault) {
    const GlyphTable t = load_glyph_table(default_data_dir() / "cmc7_glyphs.json");
    EXPECT_EQ(fingerprint(t), fingerprint(default_glyph_table()));
    const fs::path p = scratch("glyphs.json");
    save_glyph_table(default_glyph_table(), p);
    EXPECT_EQ(fingerprint(load_glyph_table(p)), fingerprint(default_glyph_table()));
}

TEST(GlyphGeometry, StickUnitAndHeight) {
    EXPECT_EQ(band_glyph_geometry(150).unit, 2);
    EXPECT_EQ(band_glyph_geometry(200).unit, 3);
    EXPECT_EQ(band_glyph_geometry(300).unit, 4);
    EXPECT_EQ(band_glyph_geometry(200).height, 126);
    EXPECT_EQ(proportional_glyph_geometry(3).height, 135);
}

TEST(Registry, ShippedFileMatchesDefault) {
    const fs::path a = scratch("reg_a.json"), b = scratch("reg_b.json");
    save_registry(default_registry(), a);
    save_registry(load_registry(default_data_dir() / "registry.json"), b);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Registry, DefaultIsValidWithSixBanks) {
    EXPECT_NO_THROW(validate(default_registry()));
    EXPECT_EQ(default_registry().banks.size(), 6u);
}

TEST(Registry, DuplicateCodeRejected) {
    Registry r = default_registry();
    r.banks[1].code = r.banks[0].code;
    EXPECT_EQ(code_of([&] { validate(r); }), ErrorCode::InvalidArgument);
}

TEST(Registry, ZoneOutsideFrameRejected) {
    Registry r = default_registry();
    r.banks[0].zones.zones[0].rect.x = 1040;
    EXPECT_EQ(code_of([&] { validate(r); }), ErrorCode::InvalidArgument);
}

TEST(Registry, BandLayoutPositions) {
    const BandLayout l = default_band_layout();
    EXPECT_EQ(l.code_positions, (std::array<int, 2>{20, 21}));
    EXPECT_GT(l.length(), 21);
    const auto values = l.glyph_values('7');
    EXPECT_EQ(values[20], "7");
    EXPECT_EQ(values[21], "7");
}

TEST(Lookup, TableCodes) {
    const Registry& r = default_registry();
    EXPECT_EQ(lookup_bank(std::array<int, 2>{0, 2}, r).name, "BFT");
    EXPECT_EQ(lookup_bank(std::array<int, 2>{1, 0}, r).name, "STB");
    EXPECT_EQ(lookup_bank("03", r).name, "BNA");
    EXPECT_EQ(lookup_bank("04", r).name, "BS");
    EXPECT_EQ(lookup_bank("12", r).name, "UIB");
    EXPECT_EQ(lookup_bank("14", r).name, "BH");
    EXPECT_EQ(code_of([&] { lookup_bank(std::array<int, 2>{9, 9}, r); }), ErrorCode::UnknownBank);
}

TEST(Zones, TemplateRectsAtTemplateResolution) {
    const Registry& r = default_registry();
    const BitMask frame(1050, 540);
    const BankRecord& stb = lookup_bank("10", r);
    const auto zs = clip_zones(frame, stb, stb.zones.template_dpi);
    EXPECT_EQ(zs[0].kind, ZoneKind::DigitalAmount);
    EXPECT_EQ(zs[0].rect, (Rect{758, 22, 226, 60}));
    const BankRecord& bft = lookup_bank("02", r);
    for (const Zone& z : clip_zones(frame, bft, bft.zones.template_dpi)) {
        if (z.kind == ZoneKind::Date) EXPECT_EQ(z.rect, (Rect{266, 344, 438, 53}));
    }
}

TEST(Zones, ScaledEdgesStayAdjacent) {
    const Rect a{0, 110, 1043, 83}, b{0, 193, 1043, 40};
    for (double s : {1.0, 4.0 / 3.0, 2.0, 0.77}) EXPECT_EQ(scale_rect(a, s).bottom(), scale_rect(b, s).y);
}

TEST(References, DiagonalStrictlyMinimal) {
    const auto m = reference_distance_matrix(default_references());
    for (int i = 0; i < 10; ++i) {
        EXPECT_LT(m[i][i], 1e-9);
        for (int j = 0; j < 10; ++j) {
            if (i == j) continue;
            EXPECT_GT(m[i][j], m[i][i]);
            EXPECT_GT(m[j][i], m[i][i]);
            EXPECT_GT(m[i][j], 0.0);
        }
    }
}

TEST(References, CacheRoundTrip) {
    const fs::path p = scratch("refs.json");
    save_references(default_references(), p);
    const ReferenceSet back = load_references(p);
    EXPECT_EQ(back.table_fingerprint, default_references().table_fingerprint);
    for (int d = 0; d < 10; ++d) EXPECT_LT(efd_distance(back.digits[d], default_references().digits[d]), 1e-12);
}

TEST(References, ShippedCacheMatchesTable) {
    const ReferenceSet refs = load_references(default_data_dir() / "cmc7_glyphs.json.refs.json");
    EXPECT_EQ(refs.table_fingerprint, fingerprint(default_glyph_table()));
}

TEST(Recognize, ReferenceGlyphsRecognizeThemselves) {
    for (int d = 0; d < 10; ++d) {
        const DigitRecognition r = recognize_digit(glyph_at_unit(d, kCanonicalUnit), default_references());
        EXPECT_EQ(r.digit, d);
        EXPECT_LT(r.distances[d], 1e-9);
    }
}

TEST(Recognize, ScaleInvariant) {
    for (int unit : {2, 3, 4}) {
        for (int d = 0; d < 10; ++d) {
            EXPECT_EQ(recognize_digit(glyph_at_unit(d, unit), default_references()).digit, d) << d << " @" << unit;
        }
    }
}

TEST(Recognize, BandGeometryAtEveryResolution) {
    for (double dpi : {150.0, 200.0, 300.0}) {
        for (int d = 0; d < 10; ++d) {
            const BitMask m = render_glyph(default_glyph_table().digit(d), band_glyph_geometry(dpi), 0);
            EXPECT_EQ(recognize_digit(m, default_references()).digit, d) << d << " @" << dpi;
        }
    }
}

TEST(Recognize, NoisyThreeHasUniqueMinimum) {
    std::mt19937_64 rng(61);
    BitMask m = render_glyph(default_glyph_table().digit(3), band_glyph_geometry(200), 0);
    for (int k = 0; k < 40; ++k) {
        const int x = rng() % m.width(), y = rng() % m.height();
        // flip only pixels touching an edge of a stick
        if (m.get_or_zero(x - 1, y) != m.get_or_zero(x + 1, y)) m.set(x, y, !m.get(x, y));
    }
    const DigitRecognition r = recognize_digit(m, default_references());
    EXPECT_EQ(r.digit, 3);
    for (int d = 0; d < 10; ++d) {
        if (d != 3) EXPECT_GT(r.distances[d], r.distances[3]);
    }
}

TEST(Recognize, EmptyClip) {
    EXPECT_EQ(code_of([&] { recognize_digit(BitMask(12, 40), default_references()); }), ErrorCode::EmptyGlyph);
}

TEST(BankCode, TenCharactersIsTooShort) {
    std::vector<CharBox> boxes;
    for (int i = 0; i < 10; ++i) boxes.push_back({{i * 10, 0, 5, 5}, i});
    EXPECT_EQ(code_of([&] { extract_bank_code(boxes, BitMask(100, 5), default_band_layout(), default_references()); }),
              ErrorCode::BandTooShort);
}

TEST(BankCode, EveryBankNoiseless) {
    for (const BankRecord& b : default_registry().banks) {
        const fixture::Check c = fixture::make(b.code, 3, 0.0, 0.0);
        const BandReading r = read_band(c.filled.image);
        const auto code = extract_bank_code(r.chars.boxes, r.band_mask, b.band, default_references());
        EXPECT_EQ(code_string(code), b.code);
        EXPECT_EQ(c.filled.gt.band_char_values[20], b.code.substr(0, 1));
        EXPECT_EQ(c.filled.gt.band_char_values[21], b.code.substr(1, 1));
    }
}

TEST(BankCode, SyntheticBftBand) {
    const fixture::Check c = fixture::make("02", 12);
    const BandReading r = read_band(c.filled.image);
    EXPECT_EQ(extract_bank_code(r.chars.boxes, r.band_mask, default_band_layout(), default_references()),
              (std::array<int, 2>{0, 2}));
}
