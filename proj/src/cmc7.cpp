#include "checkseg/cmc7.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "checkseg/error.hpp"
#include "checkseg/projection.hpp"

namespace checkseg {
namespace {

using Rows = std::vector<std::string>;

// Outlines, 7 sticks x 10 rows. Digits differ in their outer silhouette,
// which is all the recognizer sees once the sticks are fused.
const Rows kDigitRows[10] = {
    {".#####.", "##...##", "##...##", "##...##", "##...##", "##...##", "##...##", "##...##", "##...##", ".#####."},
    {"..###..", ".####..", "##.##..", "...##..", "...##..", "...##..", "...##..", "...##..", "...##..", "#######"},
    {".#####.", "##...##", ".....##", "....##.", "...##..", "..##...", ".##....", "##.....", "##.....", "#######"},
    {"######.", ".....##", ".....##", "..####.", ".....##", ".....##", ".....##", ".....##", "##...##", ".#####."},
    {"##..##.", "##..##.", "##..##.", "##..##.", "#######", "#######", "....##.", "....##.", "....##.", "....##."},
    {"#######", "##.....", "##.....", "######.", ".....##", ".....##", ".....##", ".....##", "##...##", ".#####."},
    {"....##.", "...##..", "..##...", ".##....", ".#####.", "##...##", "##...##", "##...##", "##...##", ".#####."},
    {"#######", ".....##", "....##.", "....##.", "...##..", "...##..", "..##...", "..##...", "..##...", "..##..."},
    {".#####.", "##...##", "##...##", ".##.##.", "..###..", "..###..", ".##.##.", "##...##", "##...##", ".#####."},
    {".#####.", "##...##", "##...##", "##...##", ".######", ".....##", ".....##", ".....##", ".....##", ".....##"},
};

Rows stack(std::initializer_list<std::pair<int, const char*>> parts) {
    Rows rows;
    for (const auto& [count, row] : parts) rows.insert(rows.end(), count, row);
    return rows;
}

GlyphTable build_default() {
    // Gap patterns: the two long gaps take every pair of the six positions,
    // in lexicographic order; digits get the first ten pairs.
    std::vector<std::array<int, kGapsPerGlyph>> patterns;
    for (int i = 0; i < kGapsPerGlyph; ++i) {
        for (int j = i + 1; j < kGapsPerGlyph; ++j) {
            std::array<int, kGapsPerGlyph> g;
            g.fill(1);
            g[i] = g[j] = 2;
            patterns.push_back(g);
        }
    }
    GlyphTable t;
    for (int d = 0; d < 10; ++d) t.glyphs.push_back({std::string(1, static_cast<char>('0' + d)), patterns[d], kDigitRows[d]});
    const char* kFull = "#######";
    const char* kComb = "#.#.#.#";
    t.glyphs.push_back({"SI", patterns[10], stack({{10, kFull}})});
    t.glyphs.push_back({"SII", patterns[11], stack({{2, kFull}, {6, kComb}, {2, kFull}})});
    t.glyphs.push_back({"SIII", patterns[12], stack({{8, kComb}, {2, kFull}})});
    t.glyphs.push_back({"SIV", patterns[13], stack({{2, kFull}, {8, kComb}})});
    t.glyphs.push_back({"SV", patterns[14], stack({{5, kFull}, {5, kComb}})});
    return t;
}

bool outline_connected(const Rows& rows) {
    const int h = static_cast<int>(rows.size());
    std::vector<std::vector<char>> seen(h, std::vector<char>(kBarsPerGlyph, 0));
    std::vector<std::pair<int, int>> stack;
    int total = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < kBarsPerGlyph; ++c) {
            if (rows[r][c] != '#') continue;
            ++total;
            if (stack.empty() && total == 1) {
                stack.push_back({r, c});
                seen[r][c] = 1;
            }
        }
    }
    int reached = 0;
    while (!stack.empty()) {
        auto [r, c] = stack.back();
        stack.pop_back();
        ++reached;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                const int rr = r + dr, cc = c + dc;
                if (rr < 0 || cc < 0 || rr >= h || cc >= kBarsPerGlyph) continue;
                if (rows[rr][cc] != '#' || seen[rr][cc]) continue;
                seen[rr][cc] = 1;
                stack.push_back({rr, cc});
            }
        }
    }
    return total > 0 && reached == total;
}

}  // namespace

int Cmc7Glyph::width_units() const {
    return kBarsPerGlyph + std::accumulate(gaps.begin(), gaps.end(), 0);
}

const Cmc7Glyph& GlyphTable::find(std::string_view value) const {
    for (const Cmc7Glyph& g : glyphs) {
        if (g.value == value) return g;
    }
    throw Error(ErrorCode::InvalidArgument, "no glyph '" + std::string(value) + "'");
}

const Cmc7Glyph& GlyphTable::digit(int d) const {
    if (d < 0 || d > 9) throw Error(ErrorCode::InvalidArgument, "digit out of range");
    return find(std::string(1, static_cast<char>('0' + d)));
}

const GlyphTable& default_glyph_table() {
    static const GlyphTable table = build_default();
    return table;
}

void validate(const GlyphTable& table) {
    std::set<std::array<int, kGapsPerGlyph>> patterns;
    std::set<std::string> values;
    for (const Cmc7Glyph& g : table.glyphs) {
        auto fail = [&](const std::string& why) { throw Error(ErrorCode::InvalidArgument, "glyph " + g.value + ": " + why); };
        if (!values.insert(g.value).second) fail("duplicate value");
        if (!patterns.insert(g.gaps).second) fail("gap pattern shared with another glyph");
        for (int gap : g.gaps) {
            if (gap != 1 && gap != 2) fail("gap widths must be 1 or 2 units");
        }
        if (g.rows.empty()) fail("empty outline");
        for (const std::string& row : g.rows) {
            if (row.size() != kBarsPerGlyph) fail("outline rows must have 7 cells");
            if (row.find_first_not_of("#.") != std::string::npos) fail("outline cells must be '#' or '.'");
        }
        for (int c = 0; c < kBarsPerGlyph; ++c) {
            if (std::none_of(g.rows.begin(), g.rows.end(), [c](const std::string& r) { return r[c] == '#'; })) {
                fail("stick " + std::to_string(c) + " is blank");
            }
        }
        if (!outline_connected(g.rows)) fail("outline is not 8-connected");
    }
    for (int d = 0; d < 10; ++d) {
        if (!values.count(std::string(1, static_cast<char>('0' + d)))) {
            throw Error(ErrorCode::InvalidArgument, "glyph table lacks digit " + std::to_string(d));
        }
    }
}

GlyphTable load_glyph_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    GlyphTable table;
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        for (const auto& g : j.at("glyphs")) {
            Cmc7Glyph glyph;
            glyph.value = g.at("value").get<std::string>();
            const auto gaps = g.at("gaps").get<std::vector<int>>();
            if (gaps.size() != kGapsPerGlyph) throw Error(ErrorCode::Format, "glyph needs 6 gaps");
            std::copy(gaps.begin(), gaps.end(), glyph.gaps.begin());
            glyph.rows = g.at("rows").get<std::vector<std::string>>();
            table.glyphs.push_back(std::move(glyph));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    }
    validate(table);
    return table;
}

void save_glyph_table(const GlyphTable& table, const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema"] = 1;
    j["glyphs"] = nlohmann::json::array();
    for (const Cmc7Glyph& g : table.glyphs) {
        j["glyphs"].push_back({{"value", g.value}, {"gaps", g.gaps}, {"rows", g.rows}});
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::uint64_t fingerprint(const GlyphTable& table) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](std::string_view s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    for (const Cmc7Glyph& g : table.glyphs) {
        mix(g.value);
        for (int gap : g.gaps) mix(std::to_string(gap));
        for (const std::string& r : g.rows) mix(r);
    }
    return h;
}

GlyphGeometry band_glyph_geometry(double dpi) {
    return {std::max(1, static_cast<int>(std::floor(dpi * 0.015))), nominal_band_height(dpi)};
}

GlyphGeometry proportional_glyph_geometry(int unit) {
    return {unit, 45 * unit};
}

BitMask render_glyph(const Cmc7Glyph& glyph, const GlyphGeometry& geom, int pad) {
    BitMask m(glyph.width_units() * geom.unit + 2 * pad, geom.height + 2 * pad);
    for_each_glyph_pixel(glyph, geom, pad, pad, [&m](int x, int y) { m.set(x, y, true); });
    return m;
}

}  // namespace checkseg
