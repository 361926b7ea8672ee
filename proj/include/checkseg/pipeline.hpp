#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "checkseg/bankid.hpp"
#include "checkseg/handwriting.hpp"
#include "checkseg/preprocess.hpp"
#include "checkseg/projection.hpp"
#include "checkseg/registry.hpp"

namespace checkseg {

struct PipelineOptions {
    SkewOptions skew;
    int trim_margin = kDefaultTrimMargin;
    /// Binarized components smaller than this are dropped as specks.
    std::size_t speck_size = 12;
    BandOptions band;
    double gap_factor = kDefaultCharGapFactor;
    double band_column_floor = kDefaultBandColumnFloor;
    RecognitionOptions recognition;
    int histogram_bits = kDefaultHistogramBits;
    std::uint64_t noise_floor = kDefaultNoiseFloor;
    /// Per-channel ink tolerance; negative = one quantization step.
    int ink_tolerance = -1;
    int paw_h_level = kDefaultPawHLevel;
    int paw_v_level = kDefaultPawVLevel;
};

nlohmann::json to_json(const PipelineOptions& options);

/// Deskewed and trimmed check with its marking band cut into characters.
struct BandReading {
    double skew_deg = 0.0;
    /// Crop of the deskewed image, in its coordinates.
    Rect crop;
    Raster trimmed;
    /// Cleaned binarization of `trimmed`.
    BitMask mask;
    /// Top-left corner of the printed frame inside `trimmed`.
    int frame_x = 0;
    int frame_y = 0;
    BandGeometry band;
    BitMask band_mask;
    BandSegmentation chars;
};

/// Stages shared by every command: binarize, deskew, trim, locate the
/// band and segment it. `img` must be RGB8.
BandReading read_band(const Raster& img, const PipelineOptions& options = {});

struct BankIdentification {
    std::array<int, 2> code{};
    const BankRecord* bank = nullptr;
};

/// Reads the code at each distinct band layout in the registry and keeps
/// the first reading whose bank uses that layout. Throws BandTooShort,
/// UnknownBank or recognition errors.
BankIdentification identify_bank(const BandReading& reading, const Registry& registry, const ReferenceSet& refs,
                                 const PipelineOptions& options = {});

struct ZoneComponent {
    int label = 0;
    Rect rect;
    BitMask clip;
};

struct ZoneExtraction {
    ZoneKind kind = ZoneKind::DigitalAmount;
    Rect original_rect;
    Rect improved_rect;
    std::vector<ZoneComponent> components;
    std::vector<PawGroup> paws;
};

struct SegmentationResult {
    BandReading reading;
    BankIdentification bank;
    InkColor ink;
    BitMask ink_mask;
    std::vector<ZoneExtraction> zones;
};

/// Full pipeline on a filled check and its blank template (both raw scans).
SegmentationResult segment_check(const Raster& filled, const Raster& blank, const Registry& registry,
                                 const ReferenceSet& refs, const PipelineOptions& options = {});

/// The stages after bank identification.
SegmentationResult segment_zones(const Raster& filled, const Raster& blank, BandReading reading,
                                 const BankIdentification& bank, const PipelineOptions& options = {});

/// Handwriting of one zone over a white background, cropped to the improved rect.
Raster render_zone(const SegmentationResult& result, const ZoneExtraction& zone);

nlohmann::json zone_sidecar(const SegmentationResult& result, const ZoneExtraction& zone,
                            const PipelineOptions& options);

}  // namespace checkseg
