#include "cli.hpp"

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "checkseg/evaluate.hpp"
#include "checkseg/image_io.hpp"
#include "checkseg/pipeline.hpp"
#include "checkseg/synthgen.hpp"

namespace checkseg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct DataPaths {
    std::string registry;
    std::string glyphs;

    Registry load_registry() const { return checkseg::load_registry(registry); }
    ReferenceSet load_references(const RecognitionOptions& options) const {
        return load_or_build_references(glyphs, options);
    }
};

void add_pipeline_flags(CLI::App* cmd, PipelineOptions& o) {
    cmd->add_option("--skew-range", o.skew.half_range_deg, "Skew search half-range, degrees")->capture_default_str();
    cmd->add_option("--skew-step", o.skew.step_deg, "Fine skew step, degrees")->capture_default_str();
    cmd->add_option("--trim-margin", o.trim_margin, "Blank margin kept around the check, px")->capture_default_str();
    cmd->add_option("--speck-size", o.speck_size, "Drop binarized blobs smaller than this, px")->capture_default_str();
    cmd->add_option("--band-noise-floor", o.band.noise_floor, "Band row floor as a fraction of width")
        ->capture_default_str();
    cmd->add_option("--char-gap-factor", o.gap_factor, "Character cut, in stick units")->capture_default_str();
    cmd->add_option("--harmonics", o.recognition.harmonics, "EFD harmonics")->capture_default_str();
    cmd->add_option("--max-dilations", o.recognition.max_iter, "Ultimate dilation step limit")->capture_default_str();
    cmd->add_option("--color-noise-floor", o.noise_floor, "Minimum histogram surplus for the ink colour")
        ->capture_default_str();
    cmd->add_option("--ink-tolerance", o.ink_tolerance, "Per-channel ink tolerance; negative = one bin")
        ->capture_default_str();
    cmd->add_option("--paw-h-level", o.paw_h_level, "Horizontal PAW dilation level")->capture_default_str();
    cmd->add_option("--paw-v-level", o.paw_v_level, "Vertical PAW dilation level")->capture_default_str();
}

int cmd_generate(const DataPaths& paths, const CorpusOptions& options, const std::string& out_dir,
                 std::ostream& out) {
    const Registry registry = paths.load_registry();
    const std::vector<GenSpec> specs = corpus_specs(registry, options);
    std::vector<std::string> banks(specs.size());
    std::vector<std::string> errors(specs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
        try {
            banks[i] = write_corpus_entry(registry, specs[i], out_dir).bank_name;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const std::string& e : errors) {
        if (!e.empty()) throw Error(ErrorCode::Io, e);
    }
    std::map<std::string, int> counts;
    for (const std::string& b : banks) ++counts[b];
    for (const BankRecord& b : registry.banks) {
        if (counts.count(b.name)) out << b.name << ' ' << counts[b.name] << '\n';
    }
    out << "total " << specs.size() << '\n';
    return kOk;
}

fs::path template_beside(const fs::path& image) {
    return image.parent_path() / "template.png";
}

int cmd_segment(const DataPaths& paths, const PipelineOptions& options, const std::string& image,
                std::string template_path, const std::string& out_dir, std::ostream& out) {
    if (template_path.empty()) template_path = template_beside(image).string();
    const Registry registry = paths.load_registry();
    const ReferenceSet refs = paths.load_references(options.recognition);
    const Raster filled = read_rgb(image);
    const Raster blank = read_rgb(template_path, filled.dpi());
    const SegmentationResult res = segment_check(filled, blank, registry, refs, options);
    fs::create_directories(out_dir);
    for (const ZoneExtraction& z : res.zones) {
        const std::string name(to_string(z.kind));
        write_png(render_zone(res, z), fs::path(out_dir) / (name + ".png"));
        std::ofstream sidecar(fs::path(out_dir) / (name + ".json"));
        if (!sidecar) throw Error(ErrorCode::Io, "cannot write " + name + ".json");
        sidecar << zone_sidecar(res, z, options).dump(1) << '\n';
        out << name << ' ' << z.improved_rect.x << ' ' << z.improved_rect.y << ' ' << z.improved_rect.w << ' '
            << z.improved_rect.h << ' ' << z.paws.size() << '\n';
    }
    out << "bank " << res.bank.bank->code << ' ' << res.bank.bank->name << '\n';
    return kOk;
}

int cmd_recognize(const DataPaths& paths, const PipelineOptions& options, const std::string& image, bool as_json,
                  std::ostream& out) {
    const Registry registry = paths.load_registry();
    const ReferenceSet refs = paths.load_references(options.recognition);
    const BandReading reading = read_band(read_rgb(image), options);
    const BankIdentification id = identify_bank(reading, registry, refs, options);
    if (as_json) {
        out << json{{"schema", 1},
                    {"bank_code", code_string(id.code)},
                    {"bank_name", id.bank->name},
                    {"characters", reading.chars.boxes.size()},
                    {"skew_deg", reading.skew_deg},
                    {"parameters", to_json(options)}}
                   .dump(1)
            << '\n';
    } else {
        out << code_string(id.code) << ' ' << id.bank->name << '\n';
    }
    return kOk;
}

int cmd_evaluate(const DataPaths& paths, const PipelineOptions& options, const std::string& corpus,
                 const std::string& json_path, std::ostream& out, std::ostream& err) {
    const Registry registry = paths.load_registry();
    const ReferenceSet refs = paths.load_references(options.recognition);
    std::vector<std::string> warnings;
    const Metrics m = evaluate_corpus(corpus, registry, refs, options, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';
    out << format_tables(m);
    if (!json_path.empty()) {
        std::ofstream j(json_path);
        if (!j) throw Error(ErrorCode::Io, "cannot write " + json_path);
        json doc = to_json(m);
        doc["parameters"] = to_json(options);
        j << doc.dump(1) << '\n';
    }
    return kOk;
}

}  // namespace

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::BandNotFound:
        case ErrorCode::BandTooTall:
        case ErrorCode::EmptyBand:
            return kBandNotFound;
        case ErrorCode::UnknownBank:
            return kUnknownBank;
        case ErrorCode::NoDifference:
            return kNoDifference;
        case ErrorCode::BandTooShort:
        case ErrorCode::EmptyGlyph:
        case ErrorCode::DidNotConverge:
        case ErrorCode::TooFewPoints:
        case ErrorCode::DegenerateShape:
        case ErrorCode::UnknownLabel:
        case ErrorCode::MismatchedOrder:
        case ErrorCode::NotNormalized:
            return kRecognitionFailure;
        case ErrorCode::InvalidArgument:
        case ErrorCode::Io:
        case ErrorCode::Format:
        case ErrorCode::NoInk:
            break;
    }
    return kInputError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Handwritten zone extraction from bank check images"};
    app.require_subcommand(1);
    DataPaths paths{(default_data_dir() / "registry.json").string(), (default_data_dir() / "cmc7_glyphs.json").string()};
    app.add_option("--registry", paths.registry, "Bank registry JSON")->capture_default_str();
    app.add_option("--glyphs", paths.glyphs, "CMC7 glyph table JSON")->capture_default_str();

    CorpusOptions corpus;
    std::string gen_out;
    CLI::App* gen = app.add_subcommand("generate", "Write a synthetic corpus with ground truth");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--banks", corpus.banks, "Bank names or codes (default: all)");
    gen->add_option("--count", corpus.count, "Checks per bank")->capture_default_str()->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", corpus.base_seed, "Base seed")->capture_default_str();
    gen->add_option("--dpi", corpus.dpi, "Resolution")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--sigma", corpus.noise.sigma, "Gaussian noise per channel")->capture_default_str();
    gen->add_option("--speckle", corpus.noise.speckle_density, "Specks per pixel")->capture_default_str();
    gen->add_option("--max-skew", corpus.max_skew_deg, "Largest skew, degrees")->capture_default_str();

    PipelineOptions options;
    std::string image, template_path, seg_out;
    CLI::App* seg = app.add_subcommand("segment", "Extract the handwritten zones of one filled check");
    seg->add_option("image", image, "Filled check image")->required();
    seg->add_option("--template", template_path, "Blank template scan (default: template.png beside the image)");
    seg->add_option("--out", seg_out, "Directory for zone images and sidecars")->required();
    add_pipeline_flags(seg, options);

    bool as_json = false;
    CLI::App* rec = app.add_subcommand("recognize-code", "Read the bank code from the marking band");
    rec->add_option("image", image, "Check image")->required();
    rec->add_flag("--json", as_json, "Print a JSON record");
    add_pipeline_flags(rec, options);

    std::string corpus_dir, json_path;
    CLI::App* eval = app.add_subcommand("evaluate", "Score the pipeline on a generated corpus");
    eval->add_option("corpus", corpus_dir, "Corpus directory")->required();
    eval->add_option("--json", json_path, "Also write the metrics as JSON");
    add_pipeline_flags(eval, options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*gen) return cmd_generate(paths, corpus, gen_out, out);
        if (*seg) return cmd_segment(paths, options, image, template_path, seg_out, out);
        if (*rec) return cmd_recognize(paths, options, image, as_json, out);
        if (*eval) return cmd_evaluate(paths, options, corpus_dir, json_path, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace checkseg::cli
