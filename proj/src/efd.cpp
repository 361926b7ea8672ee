#include "checkseg/efd.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "checkseg/error.hpp"

namespace checkseg {
namespace {

// Clockwise as displayed (y down): E, SE, S, SW, W, NW, N, NE.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int direction_of(int dx, int dy) {
    for (int d = 0; d < 8; ++d) {
        if (kDx[d] == dx && kDy[d] == dy) return d;
    }
    return -1;
}

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffers {
    explicit FftwBuffers(int n)
        : size(n),
          in(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    }
    ~FftwBuffers() {
        {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }
        fftw_free(in);
        fftw_free(out);
    }
    FftwBuffers(const FftwBuffers&) = delete;
    FftwBuffers& operator=(const FftwBuffers&) = delete;

    int size;
    double* in;
    fftw_complex* out;
    fftw_plan plan;
};

}  // namespace

ContourChain trace_contour(const LabelMap& labels, int label) {
    if (label < 1 || label > labels.count()) {
        throw Error(ErrorCode::UnknownLabel, "label " + std::to_string(label) + " not in label map");
    }
    const Rect& box = labels.box(label);
    auto inside = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < labels.width && y < labels.height && labels.at(x, y) == label;
    };

    Point start{box.x, box.y};
    while (!inside(start.x, start.y)) ++start.x;

    ContourChain chain;
    chain.points.push_back(start);

    // Counterclockwise walk: scan the ring from the backtrack direction
    // towards decreasing direction indices.
    auto step = [&](Point current, int backtrack, Point& next, int& next_backtrack) {
        for (int i = 1; i <= 8; ++i) {
            const int d = ((backtrack - i) % 8 + 8) % 8;
            const Point candidate{current.x + kDx[d], current.y + kDy[d]};
            if (inside(candidate.x, candidate.y)) {
                const int prev = (d + 1) % 8;
                const Point bg{current.x + kDx[prev], current.y + kDy[prev]};
                next = candidate;
                next_backtrack = direction_of(bg.x - candidate.x, bg.y - candidate.y);
                return true;
            }
        }
        return false;
    };

    // The row above the start pixel is empty, so north is background. The
    // scan starts one past the backtrack direction, hence N + 1.
    Point second;
    int backtrack = 0;
    if (!step(start, 7, second, backtrack)) return chain;

    Point current = second;
    const std::size_t limit = 4 * labels.size(label) + 8;
    while (chain.points.size() <= limit) {
        Point next;
        int next_backtrack = 0;
        step(current, backtrack, next, next_backtrack);
        if (current == start && next == second) break;
        chain.points.push_back(current);
        current = next;
        backtrack = next_backtrack;
    }
    return chain;
}

ContourChain trace_contour(const BitMask& mask, int label, const LabelMap& labels) {
    if (mask.width() != labels.width || mask.height() != labels.height) {
        throw Error(ErrorCode::InvalidArgument, "mask and label map sizes differ");
    }
    return trace_contour(labels, label);
}

EfdSet compute_efd(const std::vector<PointF>& samples, int harmonics) {
    if (harmonics < 1) throw Error(ErrorCode::InvalidArgument, "harmonic count must be >= 1");
    const int k = static_cast<int>(samples.size());
    if (k < 2 * harmonics + 1) {
        throw Error(ErrorCode::TooFewPoints, "contour of " + std::to_string(k) + " points cannot carry " +
                                                 std::to_string(harmonics) + " harmonics");
    }
    EfdSet efd;
    efd.harmonics.resize(harmonics);
    FftwBuffers fft(k);
    const double scale = 2.0 / k;

    for (int i = 0; i < k; ++i) fft.in[i] = samples[i].x;
    fftw_execute(fft.plan);
    efd.a0 = fft.out[0][0] / k;
    for (int n = 1; n <= harmonics; ++n) {
        efd.harmonics[n - 1].a = scale * fft.out[n][0];
        efd.harmonics[n - 1].b = -scale * fft.out[n][1];
    }

    for (int i = 0; i < k; ++i) fft.in[i] = samples[i].y;
    fftw_execute(fft.plan);
    efd.c0 = fft.out[0][0] / k;
    for (int n = 1; n <= harmonics; ++n) {
        efd.harmonics[n - 1].c = scale * fft.out[n][0];
        efd.harmonics[n - 1].d = -scale * fft.out[n][1];
    }
    return efd;
}

EfdSet compute_efd(const ContourChain& contour, int harmonics) {
    std::vector<PointF> samples;
    samples.reserve(contour.points.size());
    for (const Point& p : contour.points) samples.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    return compute_efd(samples, harmonics);
}

EfdSet normalize_efd(const EfdSet& efd) {
    if (efd.harmonics.empty()) throw Error(ErrorCode::DegenerateShape, "no harmonics to normalize");
    const Harmonic& h1 = efd.harmonics.front();
    const double theta =
        0.5 * std::atan2(2.0 * (h1.a * h1.b + h1.c * h1.d), h1.a * h1.a + h1.c * h1.c - h1.b * h1.b - h1.d * h1.d);

    EfdSet out;
    out.normalized = true;
    out.harmonics.resize(efd.harmonics.size());
    for (std::size_t i = 0; i < efd.harmonics.size(); ++i) {
        const Harmonic& h = efd.harmonics[i];
        const double phase = static_cast<double>(i + 1) * theta;
        const double cp = std::cos(phase);
        const double sp = std::sin(phase);
        out.harmonics[i] = {h.a * cp + h.b * sp, -h.a * sp + h.b * cp, h.c * cp + h.d * sp, -h.c * sp + h.d * cp};
    }

    const Harmonic& s1 = out.harmonics.front();
    const double semi_major = std::hypot(s1.a, s1.c);
    if (!(semi_major > 1e-12)) throw Error(ErrorCode::DegenerateShape, "first harmonic vanishes");
    const double psi = std::atan2(s1.c, s1.a);
    const double cr = std::cos(psi) / semi_major;
    const double sr = std::sin(psi) / semi_major;
    for (Harmonic& h : out.harmonics) {
        h = {cr * h.a + sr * h.c, cr * h.b + sr * h.d, -sr * h.a + cr * h.c, -sr * h.b + cr * h.d};
    }

    // Starting from the other end of the major axis flips every even order.
    double pivot = 0.0;
    for (std::size_t i = 1; i < out.harmonics.size(); i += 2) {
        for (double v : {out.harmonics[i].a, out.harmonics[i].b, out.harmonics[i].c, out.harmonics[i].d}) {
            if (std::abs(v) > std::abs(pivot)) pivot = v;
        }
    }
    if (pivot < 0.0) {
        for (std::size_t i = 1; i < out.harmonics.size(); i += 2) {
            Harmonic& h = out.harmonics[i];
            h = {-h.a, -h.b, -h.c, -h.d};
        }
    }
    return out;
}

std::vector<PointF> reconstruct(const EfdSet& efd, int harmonics, int samples) {
    if (harmonics < 1 || harmonics > efd.order()) {
        throw Error(ErrorCode::InvalidArgument, "harmonic count outside [1, order]");
    }
    if (samples < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 samples");
    std::vector<PointF> points(samples);
    for (int j = 0; j < samples; ++j) {
        const double t = 2.0 * std::numbers::pi * j / samples;
        double x = efd.a0, y = efd.c0;
        for (int n = 1; n <= harmonics; ++n) {
            const Harmonic& h = efd.harmonics[n - 1];
            const double c = std::cos(n * t);
            const double s = std::sin(n * t);
            x += h.a * c + h.b * s;
            y += h.c * c + h.d * s;
        }
        points[j] = {x, y};
    }
    return points;
}

double efd_distance(const EfdSet& probe, const EfdSet& reference) {
    if (!probe.normalized || !reference.normalized) {
        throw Error(ErrorCode::NotNormalized, "distance needs normalized descriptors");
    }
    if (probe.order() != reference.order()) {
        throw Error(ErrorCode::MismatchedOrder, std::to_string(probe.order()) + " vs " +
                                                    std::to_string(reference.order()) + " harmonics");
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < probe.order(); ++i) {
        const Harmonic& p = probe.harmonics[i];
        const Harmonic& r = reference.harmonics[i];
        const double da = p.a - r.a, db = p.b - r.b, dc = p.c - r.c, dd = p.d - r.d;
        num += da * da + db * db + dc * dc + dd * dd;
        den += p.a * p.a + r.a * r.a + p.b * p.b + r.b * r.b + p.c * p.c + r.c * r.c + p.d * p.d + r.d * r.d;
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace checkseg
