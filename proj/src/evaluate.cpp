#include "checkseg/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "checkseg/error.hpp"
#include "checkseg/image_io.hpp"

namespace checkseg {
namespace {

using nlohmann::json;

class FrameMap {
public:
    FrameMap(const CheckGroundTruth& gt, const Raster& filled, const BandReading& reading)
        : gt_(gt), w_(filled.width()), h_(filled.height()), skew_(reading.skew_deg), crop_(reading.crop) {}

    std::pair<double, double> operator()(double x, double y) const {
        const auto [px, py] = map_frame_point(gt_, w_, h_, x, y, skew_);
        return {px - crop_.x, py - crop_.y};
    }

    Rect rect(const Rect& r) const {
        double x0 = 1e18, y0 = 1e18, x1 = -1e18, y1 = -1e18;
        for (const auto& [cx, cy] : {std::pair{r.x, r.y}, {r.right(), r.y}, {r.x, r.bottom()}, {r.right(), r.bottom()}}) {
            const auto [px, py] = (*this)(cx, cy);
            x0 = std::min(x0, px);
            y0 = std::min(y0, py);
            x1 = std::max(x1, px);
            y1 = std::max(y1, py);
        }
        const int ix = static_cast<int>(std::lround(x0)), iy = static_cast<int>(std::lround(y0));
        return {ix, iy, static_cast<int>(std::lround(x1)) - ix, static_cast<int>(std::lround(y1)) - iy};
    }

private:
    const CheckGroundTruth& gt_;
    int w_, h_;
    double skew_;
    Rect crop_;
};

bool segmentation_correct(const BandReading& reading, const CheckGroundTruth& gt, const BankRecord& bank,
                          const FrameMap& map) {
    const std::vector<CharBox>& boxes = reading.chars.boxes;
    if (boxes.size() != gt.band_char_rects.size()) return false;
    for (int p : bank.band.code_positions) {
        Rect got = boxes[p].rect;
        got.x += reading.band.rows.x;
        got.y += reading.band.rows.y;
        if (iou(got, map.rect(gt.band_char_rects[p])) < kCharBoxIou) return false;
    }
    return true;
}

void fail_zones(CheckScore& s, const BankRecord& bank) {
    for (const Zone& z : bank.zones.zones) {
        s.before[static_cast<int>(z.kind)].add(false);
        s.after[static_cast<int>(z.kind)].add(false);
    }
}

void score_zones(CheckScore& s, const SegmentationResult& res, const Handwriting& hw, const FrameMap& map) {
    const int fw = hw.ink.width();
    std::vector<std::size_t> total(hw.zones.size(), 0), in_before(hw.zones.size(), 0), in_after(hw.zones.size(), 0);
    std::vector<const ZoneExtraction*> found(hw.zones.size(), nullptr);
    for (std::size_t i = 0; i < hw.zones.size(); ++i) {
        for (const ZoneExtraction& zx : res.zones) {
            if (zx.kind == hw.zones[i].kind) found[i] = &zx;
        }
    }
    for (int y = 0; y < hw.ink.height(); ++y) {
        for (int x = 0; x < fw; ++x) {
            const int z = hw.zone_of[static_cast<std::size_t>(y) * fw + x];
            if (!z || !hw.ink.get(x, y)) continue;
            const std::size_t i = z - 1;
            ++total[i];
            if (!found[i]) continue;
            const auto [px, py] = map(x, y);
            const int ix = static_cast<int>(std::lround(px)), iy = static_cast<int>(std::lround(py));
            in_before[i] += found[i]->original_rect.contains(ix, iy);
            in_after[i] += found[i]->improved_rect.contains(ix, iy);
        }
    }
    for (std::size_t i = 0; i < hw.zones.size(); ++i) {
        const int k = static_cast<int>(hw.zones[i].kind);
        const double need = kZoneContainment * static_cast<double>(total[i]);
        s.before[k].add(found[i] && static_cast<double>(in_before[i]) >= need);
        s.after[k].add(found[i] && static_cast<double>(in_after[i]) >= need);
    }
}

std::string rate_cell(const Rate& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu/%zu %.3f", r.correct, r.total, r.value());
    return buf;
}

json rate_json(const Rate& r) {
    return {{"correct", r.correct}, {"total", r.total}, {"rate", std::round(r.value() * 1000.0) / 1000.0}};
}

}  // namespace

Rate Metrics::all_before() const {
    Rate r;
    for (const Rate& z : zones_before) r += z;
    return r;
}

Rate Metrics::all_after() const {
    Rate r;
    for (const Rate& z : zones_after) r += z;
    return r;
}

void Metrics::add(const CheckScore& s) {
    code_segmentation.add(s.segmented);
    if (s.segmented) code_recognition.add(s.code_correct);
    for (int k = 0; k < 5; ++k) {
        zones_before[k] += s.before[k];
        zones_after[k] += s.after[k];
    }
    if (!s.error.empty()) ++failed;
}

CheckScore score_check(const Raster& filled, const Raster& blank, const CheckGroundTruth& gt, const Registry& registry,
                       const ReferenceSet& refs, const PipelineOptions& options) {
    const BankRecord* bank = registry.find_code(gt.bank_code);
    if (!bank) throw Error(ErrorCode::UnknownBank, "ground truth names unregistered bank " + gt.bank_code);
    CheckScore s;
    s.bank = bank->name;
    s.seed = gt.spec.seed;

    std::optional<BandReading> reading;
    try {
        reading = read_band(filled, options);
    } catch (const Error& e) {
        s.error = e.what();
        fail_zones(s, *bank);
        return s;
    }
    const FrameMap map(gt, filled, *reading);
    s.segmented = segmentation_correct(*reading, gt, *bank, map);

    try {
        const BankIdentification id = identify_bank(*reading, registry, refs, options);
        s.code_correct = id.bank && id.bank->code == gt.bank_code;
        // Zones are scored against the bank that was read, right or wrong.
        const SegmentationResult res = segment_zones(filled, blank, std::move(*reading), id, options);
        score_zones(s, res, render_handwriting(*bank, gt.spec), map);
    } catch (const Error& e) {
        s.error = e.what();
        fail_zones(s, *bank);
    }
    return s;
}

Metrics evaluate_specs(const std::vector<GenSpec>& specs, const Registry& registry, const ReferenceSet& refs,
                       const PipelineOptions& options, std::vector<CheckScore>* scores) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckScore> out(specs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
        try {
            const BankRecord* bank = registry.find_code(specs[i].bank_code);
            if (!bank) throw Error(ErrorCode::UnknownBank, "no bank with code " + specs[i].bank_code);
            const GeneratedCheck blank = generate_template(*bank, specs[i]);
            const GeneratedCheck filled = fill_check(blank, *bank, specs[i]);
            out[i] = score_check(filled.image, scan_template(blank, specs[i]), filled.gt, registry, refs, options);
        } catch (const std::exception& e) {
            out[i].seed = specs[i].seed;
            out[i].error = e.what();
        }
    }
    Metrics m;
    for (const CheckScore& s : out) m.add(s);
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (scores) *scores = std::move(out);
    return m;
}

Metrics evaluate_corpus(const std::filesystem::path& corpus, const Registry& registry, const ReferenceSet& refs,
                        const PipelineOptions& options, std::vector<std::string>* warnings) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    if (!fs::is_directory(corpus)) throw Error(ErrorCode::Io, corpus.string() + " is not a directory");
    std::vector<fs::path> dirs;
    for (const fs::directory_entry& e : fs::recursive_directory_iterator(corpus)) {
        if (e.is_directory() && (fs::exists(e.path() / "gt.json") || fs::exists(e.path() / "filled.png"))) {
            dirs.push_back(e.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());

    std::vector<CheckScore> out(dirs.size());
    std::vector<std::string> problems(dirs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(dirs.size()); ++i) {
        const fs::path& d = dirs[i];
        try {
            for (const char* f : {"gt.json", "filled.png", "template.png"}) {
                if (!fs::exists(d / f)) throw Error(ErrorCode::Io, "missing " + std::string(f));
            }
            std::ifstream in(d / "gt.json");
            const CheckGroundTruth gt = ground_truth_from_json(json::parse(in));
            const Raster filled = read_rgb(d / "filled.png", gt.dpi);
            const Raster blank = read_rgb(d / "template.png", gt.dpi);
            out[i] = score_check(filled, blank, gt, registry, refs, options);
        } catch (const std::exception& e) {
            problems[i] = d.string() + ": " + e.what();
        }
    }
    Metrics m;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (!problems[i].empty()) {
            ++m.skipped;
            if (warnings) warnings->push_back("skipped " + problems[i]);
            continue;
        }
        m.add(out[i]);
    }
    if (dirs.empty() && warnings) warnings->push_back("no checks found under " + corpus.string());
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

json to_json(const Metrics& m) {
    json before = json::object(), after = json::object();
    for (ZoneKind k : kAllZoneKinds) {
        before[std::string(to_string(k))] = rate_json(m.zones_before[static_cast<int>(k)]);
        after[std::string(to_string(k))] = rate_json(m.zones_after[static_cast<int>(k)]);
    }
    before["all"] = rate_json(m.all_before());
    after["all"] = rate_json(m.all_after());
    return {{"schema", 1},
            {"code_segmentation", rate_json(m.code_segmentation)},
            {"code_recognition", rate_json(m.code_recognition)},
            {"zones_before", before},
            {"zones_after", after},
            {"skipped", m.skipped},
            {"failed", m.failed},
            {"seconds", m.seconds}};
}

std::string format_tables(const Metrics& m) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %8s %8s %8s\n", "code line", "correct", "total", "rate");
    out += line;
    for (const auto& [name, r] : {std::pair{"segmentation", m.code_segmentation}, {"recognition", m.code_recognition}}) {
        std::snprintf(line, sizeof line, "%-16s %8zu %8zu %8.3f\n", name, r.correct, r.total, r.value());
        out += line;
    }
    out += '\n';
    std::snprintf(line, sizeof line, "%-16s %-18s %-18s %7s\n", "zone", "before", "after", "delta");
    out += line;
    auto row = [&](const char* name, const Rate& b, const Rate& a) {
        std::snprintf(line, sizeof line, "%-16s %-18s %-18s %+7.3f\n", name, rate_cell(b).c_str(), rate_cell(a).c_str(),
                      a.value() - b.value());
        out += line;
    };
    for (ZoneKind k : kAllZoneKinds) {
        const int i = static_cast<int>(k);
        if (m.zones_before[i].total) row(std::string(to_string(k)).c_str(), m.zones_before[i], m.zones_after[i]);
    }
    row("all", m.all_before(), m.all_after());
    std::snprintf(line, sizeof line, "\nskipped %zu, failed %zu, %.2f s\n", m.skipped, m.failed, m.seconds);
    out += line;
    return out;
}

}  // namespace checkseg
