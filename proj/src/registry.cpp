#include "checkseg/registry.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

#include "checkseg/error.hpp"

#ifndef CHECKSEG_DATA_DIR
#define CHECKSEG_DATA_DIR "data"
#endif

namespace checkseg {
namespace {

using nlohmann::json;

constexpr const char* kZoneNames[] = {"digital_amount", "literal_amount", "conductor", "date", "signature"};

ZoneTemplate make_template(std::initializer_list<Rect> rects) {
    ZoneTemplate t;
    std::size_t i = 0;
    for (const Rect& r : rects) t.zones.push_back({kAllZoneKinds[i++], r});
    return t;
}

Registry build_default() {
    Registry reg;
    // BFT and STB are measured layouts; the other four are plausible
    // variants in the same family so the corpus has six distinct models.
    reg.banks.push_back({"02", "BFT",
                         make_template({{866, 42, 175, 56}, {0, 110, 1043, 83}, {0, 193, 1043, 40}, {266, 344, 438, 53},
                                        {723, 244, 326, 132}}),
                         default_band_layout()});
    reg.banks.push_back({"03", "BNA",
                         make_template({{840, 30, 190, 58}, {0, 112, 1010, 86}, {0, 200, 1010, 42}, {250, 350, 420, 45},
                                        {700, 250, 310, 130}}),
                         default_band_layout()});
    reg.banks.push_back({"04", "BS",
                         make_template({{850, 38, 180, 54}, {0, 108, 1030, 84}, {0, 196, 1030, 42}, {270, 340, 430, 50},
                                        {710, 246, 320, 128}}),
                         default_band_layout()});
    reg.banks.push_back({"10", "STB",
                         make_template({{758, 22, 226, 60}, {0, 116, 974, 89}, {0, 198, 974, 44}, {240, 347, 412, 38},
                                        {675, 249, 288, 128}}),
                         default_band_layout()});
    reg.banks.push_back({"12", "UIB",
                         make_template({{780, 26, 220, 60}, {0, 114, 990, 88}, {0, 205, 990, 42}, {245, 352, 415, 40},
                                        {690, 255, 300, 125}}),
                         default_band_layout()});
    reg.banks.push_back({"14", "BH",
                         make_template({{870, 45, 170, 55}, {0, 105, 1040, 85}, {0, 195, 1040, 40}, {260, 345, 440, 52},
                                        {720, 242, 320, 130}}),
                         default_band_layout()});
    return reg;
}

json rect_to_json(const Rect& r) {
    return {{"X", r.x}, {"Y", r.y}, {"L", r.w}, {"H", r.h}};
}

Rect rect_from_json(const json& j) {
    return {j.at("X").get<int>(), j.at("Y").get<int>(), j.at("L").get<int>(), j.at("H").get<int>()};
}

json layout_to_json(const BandLayout& l) {
    json fields = json::array();
    for (const BandField& f : l.fields) {
        if (f.separator.empty()) {
            fields.push_back({{"name", f.name}, {"digits", f.digits}});
        } else {
            fields.push_back({{"separator", f.separator}});
        }
    }
    return {{"code_positions", l.code_positions}, {"fields", fields}};
}

BandLayout layout_from_json(const json& j) {
    BandLayout l;
    const auto pos = j.at("code_positions").get<std::vector<int>>();
    if (pos.size() != 2) throw Error(ErrorCode::Format, "code_positions needs two entries");
    l.code_positions = {pos[0], pos[1]};
    for (const json& f : j.at("fields")) {
        BandField field;
        if (f.contains("separator")) {
            field.separator = f.at("separator").get<std::string>();
        } else {
            field.name = f.at("name").get<std::string>();
            field.digits = f.at("digits").get<int>();
        }
        l.fields.push_back(std::move(field));
    }
    return l;
}

}  // namespace

std::string_view to_string(ZoneKind kind) {
    return kZoneNames[static_cast<int>(kind)];
}

ZoneKind zone_kind_from_string(std::string_view name) {
    for (ZoneKind k : kAllZoneKinds) {
        if (to_string(k) == name) return k;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown zone kind '" + std::string(name) + "'");
}

const Zone* ZoneTemplate::find(ZoneKind kind) const {
    for (const Zone& z : zones) {
        if (z.kind == kind) return &z;
    }
    return nullptr;
}

Rect scale_rect(const Rect& r, double scale) {
    const int x0 = static_cast<int>(std::lround(r.x * scale));
    const int y0 = static_cast<int>(std::lround(r.y * scale));
    const int x1 = static_cast<int>(std::lround(r.right() * scale));
    const int y1 = static_cast<int>(std::lround(r.bottom() * scale));
    return {x0, y0, x1 - x0, y1 - y0};
}

int BandLayout::length() const {
    int n = 0;
    for (const BandField& f : fields) n += f.separator.empty() ? f.digits : 1;
    return n;
}

std::vector<std::string> BandLayout::glyph_values(char digit_fill) const {
    std::vector<std::string> out;
    for (const BandField& f : fields) {
        if (f.separator.empty()) {
            out.insert(out.end(), f.digits, std::string(1, digit_fill));
        } else {
            out.push_back(f.separator);
        }
    }
    return out;
}

BandLayout default_band_layout() {
    BandLayout l;
    l.fields = {{"check_number", 7, ""}, {"", 0, "SI"},    {"nature", 1, ""},    {"agency", 3, ""},
                {"account", 7, ""},      {"", 0, "SII"},   {"bank_code", 2, ""}, {"", 0, "SIII"},
                {"key", 2, ""}};
    l.code_positions = {20, 21};
    return l;
}

const BankRecord* Registry::find_code(std::string_view code) const {
    for (const BankRecord& b : banks) {
        if (b.code == code) return &b;
    }
    return nullptr;
}

const BankRecord* Registry::find_name(std::string_view name) const {
    for (const BankRecord& b : banks) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

void validate(const Registry& registry) {
    std::set<std::string> codes;
    for (const BankRecord& b : registry.banks) {
        auto fail = [&](const std::string& why) {
            throw Error(ErrorCode::InvalidArgument, "bank " + b.name + " (" + b.code + "): " + why);
        };
        if (b.code.size() != 2 || !std::isdigit(static_cast<unsigned char>(b.code[0])) ||
            !std::isdigit(static_cast<unsigned char>(b.code[1]))) {
            fail("code must be two decimal digits");
        }
        if (!codes.insert(b.code).second) fail("duplicate code");
        const ZoneTemplate& t = b.zones;
        if (!(t.template_dpi > 0.0) || t.frame_width <= 0 || t.frame_height <= 0) fail("bad template frame");
        const Rect frame{0, 0, t.frame_width, t.frame_height};
        std::set<ZoneKind> kinds;
        for (const Zone& z : t.zones) {
            if (!kinds.insert(z.kind).second) fail("zone kind listed twice");
            if (z.rect.empty() || !frame.contains(z.rect)) fail(std::string(to_string(z.kind)) + " lies outside the frame");
        }
        const auto& [p0, p1] = b.band.code_positions;
        const int len = b.band.length();
        if (p0 == p1 || p0 < 0 || p1 < 0 || p0 >= len || p1 >= len) fail("code positions outside the band");
        const std::vector<std::string> values = b.band.glyph_values();
        if (values[p0] != "0" || values[p1] != "0") fail("code positions must be digit slots");
    }
}

const Registry& default_registry() {
    static const Registry reg = build_default();
    return reg;
}

Registry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    Registry reg;
    try {
        const json j = json::parse(in);
        for (const json& b : j.at("banks")) {
            BankRecord rec;
            rec.code = b.at("code").get<std::string>();
            rec.name = b.at("name").get<std::string>();
            const json& t = b.at("template");
            rec.zones.template_dpi = t.at("template_dpi").get<double>();
            rec.zones.frame_width = t.at("frame_width").get<int>();
            rec.zones.frame_height = t.at("frame_height").get<int>();
            rec.zones.body_bottom = t.value("body_bottom", rec.zones.body_bottom);
            const json& zones = t.at("zones");
            for (ZoneKind k : kAllZoneKinds) {
                const std::string key(to_string(k));
                if (zones.contains(key)) rec.zones.zones.push_back({k, rect_from_json(zones.at(key))});
            }
            rec.band = b.contains("band_layout") ? layout_from_json(b.at("band_layout")) : default_band_layout();
            reg.banks.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    }
    validate(reg);
    return reg;
}

void save_registry(const Registry& registry, const std::filesystem::path& path) {
    json banks = json::array();
    for (const BankRecord& b : registry.banks) {
        json zones = json::object();
        for (const Zone& z : b.zones.zones) zones[std::string(to_string(z.kind))] = rect_to_json(z.rect);
        banks.push_back({{"code", b.code},
                         {"name", b.name},
                         {"template",
                          {{"template_dpi", b.zones.template_dpi},
                           {"frame_width", b.zones.frame_width},
                           {"frame_height", b.zones.frame_height},
                           {"body_bottom", b.zones.body_bottom},
                           {"zones", zones}}},
                         {"band_layout", layout_to_json(b.band)}});
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << json{{"schema", 1}, {"banks", banks}}.dump(2) << '\n';
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("CHECKSEG_DATA_DIR")) return env;
    return CHECKSEG_DATA_DIR;
}

}  // namespace checkseg
