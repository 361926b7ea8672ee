// OpenMP kernels against their single-threaded references, on a generated
// 200 dpi check.

#include <benchmark/benchmark.h>

#include "checkseg/reference.hpp"
#include "checkseg/synthgen.hpp"

using namespace checkseg;

namespace {

struct Inputs {
    Raster rgb;
    BitMask mask;
};

const Inputs& inputs() {
    static const Inputs in = [] {
        GenSpec spec;
        spec.bank_code = "02";
        spec.seed = 5;
        spec.skew_deg = 1.5;
        const BankRecord& bank = *default_registry().find_code("02");
        const GeneratedCheck filled = fill_check(generate_template(bank, spec), bank, spec);
        return Inputs{filled.image, binarize_otsu(to_grayscale(filled.image))};
    }();
    return in;
}

const InkColor kInk{{20, 52, 164}, {8, 8, 8}};

void BM_Grayscale(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(to_grayscale(inputs().rgb));
}
void BM_GrayscaleRef(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(reference::to_grayscale(inputs().rgb));
}
void BM_Histogram(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(color_histogram(inputs().rgb));
}
void BM_HistogramRef(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(reference::color_histogram(inputs().rgb));
}
void BM_Dilate(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(dilate(inputs().mask, StructuringElement::horizontal(3)));
}
void BM_DilateRef(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(reference::dilate(inputs().mask, StructuringElement::horizontal(3)));
}
void BM_Rotate(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(rotate(inputs().rgb, -1.5));
}
void BM_RotateRef(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(reference::rotate(inputs().rgb, -1.5));
}
void BM_Skew(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(estimate_skew(inputs().mask));
}
void BM_SkewRef(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(reference::estimate_skew(inputs().mask));
}
void BM_InkMask(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(extract_ink_mask(inputs().rgb, kInk));
}
void BM_InkMaskRef(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(reference::extract_ink_mask(inputs().rgb, kInk));
}

}  // namespace

BENCHMARK(BM_Grayscale)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrayscaleRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Histogram)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dilate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DilateRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rotate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RotateRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Skew)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SkewRef)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InkMask)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InkMaskRef)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
