#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "checkseg/efd.hpp"
#include "checkseg/error.hpp"
#include "oracles.hpp"

using namespace checkseg;

namespace {

double shoelace(const ContourChain& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const Point& p = c.points[i];
        const Point& q = c.points[(i + 1) % c.points.size()];
        s += static_cast<double>(p.x) * q.y - static_cast<double>(q.x) * p.y;
    }
    return s;
}

// Random blob with every enclosed background pixel filled in.
BitMask solid_blob(std::mt19937_64& rng, int w, int h) {
    BitMask m(w, h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double cx = w / 2.0, cy = h / 2.0;
    const double r0 = 0.25 * std::min(w, h) + 0.15 * std::min(w, h) * u(rng);
    const double a2 = 0.3 * u(rng), a3 = 0.25 * u(rng), p2 = 6.3 * u(rng), p3 = 6.3 * u(rng);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double t = std::atan2(y - cy, x - cx);
            const double r = r0 * (1.0 + a2 * std::cos(2 * t + p2) + a3 * std::cos(3 * t + p3));
            m.set(x, y, std::hypot(x - cx, y - cy) <= r || u(rng) < 0.03);
        }
    }
    // Background 4-connected to the border stays; everything else becomes ink.
    BitMask outside(w, h);
    std::vector<std::pair<int, int>> stack;
    for (int x = 0; x < w; ++x) stack.insert(stack.end(), {{x, 0}, {x, h - 1}});
    for (int y = 0; y < h; ++y) stack.insert(stack.end(), {{0, y}, {w - 1, y}});
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        if (x < 0 || y < 0 || x >= w || y >= h || m.get(x, y) || outside.get(x, y)) continue;
        outside.set(x, y);
        stack.insert(stack.end(), {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}});
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) m.set(x, y, !outside.get(x, y));
    }
    return m;
}

bool adjacent8(const Point& a, const Point& b) {
    return std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1 && !(a == b);
}

EfdSet random_normalized(std::mt19937_64& rng, int n) {
    return normalize_efd(compute_efd(oracle::random_star(rng, 4 * n + 8), n));
}

}  // namespace

TEST(Trace, SinglePixel) {
    BitMask m(5, 5);
    m.set(2, 3);
    const ContourChain c = trace_contour(label_components(m), 1);
    ASSERT_EQ(c.points.size(), 1u);
    EXPECT_EQ(c.points[0], (Point{2, 3}));
}

TEST(Trace, TwoByTwoSquare) {
    BitMask m(6, 6);
    for (int y = 2; y < 4; ++y) {
        for (int x = 1; x < 3; ++x) m.set(x, y);
    }
    const ContourChain c = trace_contour(label_components(m), 1);
    ASSERT_EQ(c.points.size(), 4u);
    EXPECT_EQ(c.points[0], (Point{1, 2}));
    std::set<std::pair<int, int>> seen;
    for (const Point& p : c.points) seen.insert({p.x, p.y});
    EXPECT_EQ(seen.size(), 4u);
    EXPECT_LT(shoelace(c), 0.0);  // counterclockwise with y pointing down
}

TEST(Trace, UnknownLabelThrows) {
    BitMask m(4, 4);
    m.set(1, 1);
    const LabelMap lm = label_components(m);
    for (int bad : {0, 2, -1}) {
        try {
            trace_contour(lm, bad);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::UnknownLabel);
        }
    }
}

TEST(Trace, VisitsExactlyTheBoundaryOfRandomBlobs) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const BitMask m = solid_blob(rng, 14 + rng() % 20, 14 + rng() % 20);
        const LabelMap lm = label_components(m);
        const int l = lm.largest();
        ASSERT_GT(l, 0);
        const ContourChain c = trace_contour(lm, l);
        std::set<std::pair<int, int>> got;
        for (const Point& p : c.points) got.insert({p.x, p.y});
        ASSERT_EQ(got, oracle::boundary(lm, l)) << trial;

        const Rect box = lm.box(l);
        int first_x = box.x;
        while (lm.at(first_x, box.y) != l) ++first_x;
        EXPECT_EQ(c.points.front(), (Point{first_x, box.y}));
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            ASSERT_TRUE(adjacent8(c.points[i], c.points[(i + 1) % c.points.size()]) || c.points.size() == 1);
        }
        if (c.points.size() > 2) EXPECT_LT(shoelace(c), 0.0);
    }
}

TEST(Efd, ConstantContour) {
    const std::vector<PointF> pts(11, PointF{3.5, -2.0});
    const EfdSet e = compute_efd(pts, 5);
    EXPECT_DOUBLE_EQ(e.a0, 3.5);
    EXPECT_DOUBLE_EQ(e.c0, -2.0);
    EXPECT_FALSE(e.normalized);
    for (const Harmonic& h : e.harmonics) {
        EXPECT_NEAR(std::abs(h.a) + std::abs(h.b) + std::abs(h.c) + std::abs(h.d), 0.0, 1e-12);
    }
    try {
        normalize_efd(e);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::DegenerateShape);
    }
}

TEST(Efd, Circle) {
    const double r = 40.0;
    std::vector<PointF> pts;
    for (int i = 0; i < 400; ++i) {
        const double t = 2.0 * std::numbers::pi * i / 400;
        pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    const EfdSet e = compute_efd(pts, 10);
    EXPECT_NEAR(e.harmonics[0].a, r, 1e-9);
    EXPECT_NEAR(e.harmonics[0].d, r, 1e-9);
    EXPECT_NEAR(e.harmonics[0].b, 0.0, 1e-9);
    EXPECT_NEAR(e.harmonics[0].c, 0.0, 1e-9);
    for (int n = 1; n < 10; ++n) {
        const Harmonic& h = e.harmonics[n];
        EXPECT_LE(std::max({std::abs(h.a), std::abs(h.b), std::abs(h.c), std::abs(h.d)}), 0.02 * r);
    }
    for (const PointF& p : reconstruct(e, 1, 64)) EXPECT_NEAR(std::hypot(p.x, p.y), r, 0.02 * r);
}

TEST(Efd, TooFewPoints) {
    try {
        compute_efd(std::vector<PointF>(20, PointF{}), 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
    }
    EXPECT_NO_THROW(compute_efd(std::vector<PointF>(21, PointF{}), 10));
}

TEST(Efd, MatchesDirectSummation) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 250; ++trial) {
        std::vector<PointF> pts;
        const int k = 7 + rng() % 120;
        std::uniform_real_distribution<double> u(-50.0, 50.0);
        for (int i = 0; i < k; ++i) pts.push_back({u(rng), u(rng)});
        const int n = 1 + rng() % ((k - 1) / 2);
        const EfdSet got = compute_efd(pts, n);
        const EfdSet want = oracle::efd_direct(pts, n);
        ASSERT_EQ(got.order(), n);
        EXPECT_LE(oracle::max_coefficient_gap(got, want), 1e-9) << trial;
    }
}

TEST(Efd, SquareContourMatchesDirectSummation) {
    BitMask m(30, 30);
    for (int y = 5; y < 25; ++y) {
        for (int x = 5; x < 25; ++x) m.set(x, y);
    }
    const ContourChain c = trace_contour(label_components(m), 1);
    const EfdSet got = compute_efd(c, 30);
    EXPECT_LE(oracle::max_coefficient_gap(got, oracle::efd_direct(oracle::to_float(c), 30)), 1e-9);
}

TEST(Efd, FullOrderReconstructionIsExact) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<PointF> pts;
    for (int i = 0; i < 61; ++i) pts.push_back({u(rng), u(rng)});
    const auto back = reconstruct(compute_efd(pts, 30), 30, 61);
    for (int i = 0; i < 61; ++i) {
        EXPECT_NEAR(back[i].x, pts[i].x, 1e-6);
        EXPECT_NEAR(back[i].y, pts[i].y, 1e-6);
    }
}

TEST(Efd, ReconstructionErrorNeverGrows) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pts = oracle::random_star(rng, 160);
        const EfdSet e = compute_efd(pts, 30);
        double prev = 1e300;
        for (int n = 1; n <= 30; ++n) {
            const auto r = reconstruct(e, n, 160);
            double mse = 0.0;
            for (int i = 0; i < 160; ++i) mse += std::pow(r[i].x - pts[i].x, 2) + std::pow(r[i].y - pts[i].y, 2);
            EXPECT_LE(mse, prev + 1e-12);
            prev = mse;
        }
    }
}

TEST(Normalize, FirstHarmonicIsCanonical) {
    std::mt19937_64 rng(45);
    const EfdSet n = random_normalized(rng, 10);
    EXPECT_TRUE(n.normalized);
    EXPECT_EQ(n.a0, 0.0);
    EXPECT_EQ(n.c0, 0.0);
    EXPECT_NEAR(n.harmonics[0].a, 1.0, 1e-12);
    EXPECT_NEAR(n.harmonics[0].c, 0.0, 1e-12);
}

TEST(Normalize, Idempotent) {
    std::mt19937_64 rng(46);
    for (int trial = 0; trial < 50; ++trial) {
        const EfdSet n = random_normalized(rng, 12);
        EXPECT_LE(oracle::max_coefficient_gap(normalize_efd(n), n), 1e-9);
    }
}

TEST(Normalize, TranslationInvariant) {
    std::mt19937_64 rng(47);
    const auto pts = oracle::random_star(rng, 100);
    const EfdSet a = normalize_efd(compute_efd(pts, 20));
    const EfdSet b = normalize_efd(compute_efd(oracle::transform(pts, 0.0, 1.0, 37.0, -12.0, 0), 20));
    EXPECT_LE(oracle::max_coefficient_gap(a, b), 1e-9);
}

TEST(Normalize, ScaleAndRotationInvariant) {
    std::mt19937_64 rng(48);
    const auto pts = oracle::random_star(rng, 100);
    const EfdSet a = normalize_efd(compute_efd(pts, 20));
    const EfdSet b = normalize_efd(compute_efd(oracle::transform(pts, 37.0, 2.0, 0.0, 0.0, 0), 20));
    EXPECT_LE(oracle::max_coefficient_gap(a, b), 1e-6);
}

TEST(Normalize, StartPointInvariant) {
    std::mt19937_64 rng(49);
    const auto pts = oracle::random_star(rng, 90);
    const EfdSet a = normalize_efd(compute_efd(pts, 20));
    for (int shift : {1, 17, 45, 89}) {
        const EfdSet b = normalize_efd(compute_efd(oracle::transform(pts, 0.0, 1.0, 0.0, 0.0, shift), 20));
        EXPECT_LE(oracle::max_coefficient_gap(a, b), 1e-6) << shift;
    }
}

TEST(Distance, ZeroOnSelfAndSymmetric) {
    std::mt19937_64 rng(50);
    for (int trial = 0; trial < 100; ++trial) {
        const EfdSet a = random_normalized(rng, 15), b = random_normalized(rng, 15);
        EXPECT_EQ(efd_distance(a, a), 0.0);
        const double d = efd_distance(a, b);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 2.0);
        EXPECT_DOUBLE_EQ(d, efd_distance(b, a));
    }
}

TEST(Distance, RejectsMismatchedOrRawSets) {
    std::mt19937_64 rng(51);
    const EfdSet a = random_normalized(rng, 10), b = random_normalized(rng, 12);
    try {
        efd_distance(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MismatchedOrder);
    }
    try {
        efd_distance(a, compute_efd(oracle::random_star(rng, 60), 10));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotNormalized);
    }
}
