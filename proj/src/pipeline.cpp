#include "checkseg/pipeline.hpp"

#include <algorithm>
#include <utility>

#include "checkseg/error.hpp"
#include "checkseg/synthgen.hpp"

namespace checkseg {
namespace {

using nlohmann::json;

BitMask clean_binarization(const Raster& rgb, std::size_t speck_size) {
    return remove_small_components(binarize_otsu(to_grayscale(rgb)), speck_size);
}

}  // namespace

json to_json(const PipelineOptions& o) {
    return {{"skew_range_deg", o.skew.half_range_deg},
            {"skew_step_deg", o.skew.step_deg},
            {"skew_coarse_step_deg", o.skew.coarse_step_deg},
            {"trim_margin", o.trim_margin},
            {"speck_size", o.speck_size},
            {"band_noise_floor", o.band.noise_floor},
            {"gap_factor", o.gap_factor},
            {"band_column_floor", o.band_column_floor},
            {"harmonics", o.recognition.harmonics},
            {"max_dilations", o.recognition.max_iter},
            {"histogram_bits", o.histogram_bits},
            {"color_noise_floor", o.noise_floor},
            {"ink_tolerance", o.ink_tolerance},
            {"paw_h_level", o.paw_h_level},
            {"paw_v_level", o.paw_v_level}};
}

BandReading read_band(const Raster& img, const PipelineOptions& options) {
    if (img.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "expected an RGB image");
    BandReading r;
    const BitMask raw = clean_binarization(img, options.speck_size);
    r.skew_deg = estimate_skew(raw, options.skew).angle_deg;

    const Raster straight = rotate(img, -r.skew_deg);
    const BitMask mask = r.skew_deg == 0.0 ? raw : clean_binarization(straight, options.speck_size);
    r.crop = trim_rect(mask, options.trim_margin);
    r.trimmed = straight.crop(r.crop);
    r.mask = mask.crop(r.crop);
    const Rect content = *r.mask.bounding_box();
    r.frame_x = content.x;
    r.frame_y = content.y;

    r.band = locate_marking_band(r.mask, img.dpi(), options.band);
    r.band_mask = r.mask.crop(r.band.rows);
    r.chars = segment_band_characters(r.band_mask, options.gap_factor, options.band_column_floor);
    return r;
}

BankIdentification identify_bank(const BandReading& reading, const Registry& registry, const ReferenceSet& refs,
                                 const PipelineOptions& options) {
    std::vector<const BandLayout*> layouts;
    for (const BankRecord& b : registry.banks) {
        if (std::none_of(layouts.begin(), layouts.end(), [&](const BandLayout* l) { return *l == b.band; })) {
            layouts.push_back(&b.band);
        }
    }
    if (layouts.empty()) throw Error(ErrorCode::UnknownBank, "registry is empty");
    BankIdentification first;
    for (std::size_t i = 0; i < layouts.size(); ++i) {
        BankIdentification id;
        id.code = extract_bank_code(reading.chars.boxes, reading.band_mask, *layouts[i], refs, options.recognition);
        id.bank = registry.find_code(code_string(id.code));
        if (id.bank && id.bank->band == *layouts[i]) return id;
        if (i == 0) first = id;
    }
    throw Error(ErrorCode::UnknownBank, "band code " + code_string(first.code) + " matches no registered bank");
}

SegmentationResult segment_check(const Raster& filled, const Raster& blank, const Registry& registry,
                                 const ReferenceSet& refs, const PipelineOptions& options) {
    if (blank.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "expected an RGB template");
    BandReading reading = read_band(filled, options);
    const BankIdentification bank = identify_bank(reading, registry, refs, options);
    return segment_zones(filled, blank, std::move(reading), bank, options);
}

SegmentationResult segment_zones(const Raster& filled, const Raster& blank, BandReading reading,
                                 const BankIdentification& id, const PipelineOptions& options) {
    if (blank.channels() != Channels::RGB8) throw Error(ErrorCode::InvalidArgument, "expected an RGB template");
    if (!id.bank) throw Error(ErrorCode::UnknownBank, "no bank identified");
    SegmentationResult res;
    res.reading = std::move(reading);
    res.bank = id;
    const BankRecord& bank = *id.bank;

    // Raw scans on both sides, so noise statistics match bin for bin.
    const ColorHistogram hf = color_histogram(filled, options.histogram_bits);
    const ColorHistogram hb = rescale(color_histogram(blank, options.histogram_bits), hf.total());
    res.ink = handwriting_color(hf, hb, options.noise_floor);
    if (options.ink_tolerance >= 0) res.ink.tolerance.fill(options.ink_tolerance);

    const BandReading& rd = res.reading;
    res.ink_mask = extract_ink_mask(rd.trimmed, res.ink);
    const std::vector<Zone> zones = clip_zones(res.ink_mask, bank, filled.dpi(), rd.frame_x, rd.frame_y);
    const LabelMap labels = label_components(res.ink_mask, 8);

    std::vector<Zone> improved = zones;
    for (Zone& z : improved) z.rect = improve_zone_bounds(res.ink_mask, z.rect, labels);
    const std::vector<int> owner = assign_components_to_zones(labels, improved);

    res.zones.resize(zones.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(zones.size()); ++i) {
        ZoneExtraction& zx = res.zones[i];
        zx.kind = zones[i].kind;
        zx.original_rect = zones[i].rect;
        zx.improved_rect = improved[i].rect;
        zx.paws = group_paws(res.ink_mask, zx.improved_rect, options.paw_h_level, options.paw_v_level);
        for (int l = 1; l <= labels.count(); ++l) {
            if (owner[l - 1] != i) continue;
            const Rect box = labels.box(l);
            ZoneComponent c{l, box, BitMask(box.w, box.h)};
            for (int y = 0; y < box.h; ++y) {
                for (int x = 0; x < box.w; ++x) c.clip.set(x, y, labels.at(box.x + x, box.y + y) == l);
            }
            zx.components.push_back(std::move(c));
        }
    }
    return res;
}

Raster render_zone(const SegmentationResult& result, const ZoneExtraction& zone) {
    const Rect r = zone.improved_rect;
    Raster out(r.w, r.h, Channels::RGB8, result.reading.trimmed.dpi());
    for (int y = 0; y < r.h; ++y) {
        for (int x = 0; x < r.w; ++x) {
            if (result.ink_mask.get(r.x + x, r.y + y)) out.set_rgb(x, y, result.reading.trimmed.rgb(r.x + x, r.y + y));
        }
    }
    return out;
}

json zone_sidecar(const SegmentationResult& result, const ZoneExtraction& zone, const PipelineOptions& options) {
    json components = json::array();
    for (const ZoneComponent& c : zone.components) components.push_back(rect_json(c.rect));
    json paws = json::array();
    for (const PawGroup& p : zone.paws) paws.push_back(rect_json(p.box));
    const Rgb ink = result.ink.center;
    return {{"schema", 1},
            {"bank_code", result.bank.bank->code},
            {"bank_name", result.bank.bank->name},
            {"kind", std::string(to_string(zone.kind))},
            {"original_rect", rect_json(zone.original_rect)},
            {"improved_rect", rect_json(zone.improved_rect)},
            {"components", components},
            {"paws", paws},
            {"skew_deg", result.reading.skew_deg},
            {"crop", rect_json(result.reading.crop)},
            {"ink_rgb", json::array({ink.r, ink.g, ink.b})},
            {"ink_tolerance", result.ink.tolerance},
            {"parameters", to_json(options)}};
}

}  // namespace checkseg
