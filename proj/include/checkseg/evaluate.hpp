#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "checkseg/pipeline.hpp"
#include "checkseg/synthgen.hpp"

namespace checkseg {

struct Rate {
    std::size_t correct = 0;
    std::size_t total = 0;

    double value() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
    void add(bool ok) {
        ++total;
        correct += ok;
    }
    Rate& operator+=(const Rate& o) {
        correct += o.correct;
        total += o.total;
        return *this;
    }
};

/// A zone counts as extracted when its rect holds this share of the zone's
/// ground-truth ink.
inline constexpr double kZoneContainment = 0.99;
inline constexpr double kCharBoxIou = 0.5;

struct CheckScore {
    std::string bank;
    std::uint64_t seed = 0;
    bool segmented = false;
    /// Only meaningful when `segmented`.
    bool code_correct = false;
    /// Indexed by ZoneKind; total 0 when the bank has no such zone.
    std::array<Rate, 5> before{};
    std::array<Rate, 5> after{};
    /// First pipeline error, empty when the run completed.
    std::string error;
};

struct Metrics {
    Rate code_segmentation;
    /// Over correctly segmented bands.
    Rate code_recognition;
    std::array<Rate, 5> zones_before{};
    std::array<Rate, 5> zones_after{};
    std::size_t skipped = 0;
    std::size_t failed = 0;
    double seconds = 0.0;

    Rate all_before() const;
    Rate all_after() const;
    void add(const CheckScore& s);
};

/// Runs the pipeline on one check and scores it against its ground truth.
/// Pipeline errors are caught and recorded; they count as misses.
CheckScore score_check(const Raster& filled, const Raster& blank, const CheckGroundTruth& gt, const Registry& registry,
                       const ReferenceSet& refs, const PipelineOptions& options = {});

/// Generates every spec in memory and scores it; checks run in parallel.
Metrics evaluate_specs(const std::vector<GenSpec>& specs, const Registry& registry, const ReferenceSet& refs,
                       const PipelineOptions& options = {}, std::vector<CheckScore>* scores = nullptr);

/// Scores every directory below `corpus` that holds gt.json, filled.png and
/// template.png. Directories missing any of them are skipped with a warning
/// appended to `warnings`.
Metrics evaluate_corpus(const std::filesystem::path& corpus, const Registry& registry, const ReferenceSet& refs,
                        const PipelineOptions& options = {}, std::vector<std::string>* warnings = nullptr);

nlohmann::json to_json(const Metrics& m);
/// Aligned text tables: code segmentation and recognition, then zones.
std::string format_tables(const Metrics& m);

}  // namespace checkseg
