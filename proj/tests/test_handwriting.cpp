#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "checkseg/error.hpp"
#include "checkseg/handwriting.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace checkseg;

namespace {

constexpr Rgb kBlue{20, 52, 164};
constexpr Rgb kRed{200, 30, 30};

Raster paper(int w, int h) {
    Raster img(w, h, Channels::RGB8);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img.set_rgb(x, y, x % 7 == 0 ? Rgb{84, 84, 84} : Rgb{252, 252, 244});
    }
    return img;
}

void paint(Raster& img, int count, Rgb c, int start) {
    for (int i = start; i < start + count; ++i) img.set_rgb(i % img.width(), i / img.width(), c);
}

// Union of pixels within the dilation reach, by pairwise comparison.
int paw_oracle_groups(const BitMask& m, int h, int v) {
    std::vector<std::pair<int, int>> px;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.get(x, y)) px.push_back({x, y});
        }
    }
    std::vector<int> parent(px.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < px.size(); ++i) {
        for (std::size_t j = i + 1; j < px.size(); ++j) {
            if (std::abs(px[i].first - px[j].first) <= 2 * h + 1 && std::abs(px[i].second - px[j].second) <= 2 * v + 1) {
                parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
            }
        }
    }
    int groups = 0;
    for (std::size_t i = 0; i < px.size(); ++i) groups += find(static_cast<int>(i)) == static_cast<int>(i);
    return groups;
}

BitMask strokes(std::mt19937_64& rng, int w, int h, int n) {
    BitMask m(w, h);
    for (int k = 0; k < n; ++k) {
        int x = rng() % w, y = rng() % h;
        for (int s = 0; s < 4; ++s) {
            m.set(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
            x += static_cast<int>(rng() % 3) - 1;
            y += static_cast<int>(rng() % 3) - 1;
        }
    }
    return m;
}

}  // namespace

TEST(HandwritingColor, IdenticalHistogramsHaveNoDifference) {
    const Raster img = paper(40, 40);
    const ColorHistogram h = color_histogram(img);
    try {
        handwriting_color(h, h);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoDifference);
    }
}

TEST(HandwritingColor, BlueStrokes) {
    const Raster blank = paper(40, 40);
    Raster filled = blank;
    paint(filled, 500, kBlue, 100);
    const InkColor ink = handwriting_color(color_histogram(filled), color_histogram(blank));
    const ColorHistogram q{5, {}};
    EXPECT_EQ(q.bin_of(ink.center), q.bin_of(kBlue));
    EXPECT_EQ(ink.tolerance, (std::array<int, 3>{8, 8, 8}));
}

TEST(HandwritingColor, LargestPeakWinsOverSmudge) {
    const Raster blank = paper(40, 40);
    Raster filled = blank;
    paint(filled, 500, kBlue, 100);
    paint(filled, 60, kRed, 700);
    const InkColor ink = handwriting_color(color_histogram(filled), color_histogram(blank));
    const ColorHistogram q{5, {}};
    EXPECT_EQ(q.bin_of(ink.center), q.bin_of(kBlue));
}

TEST(HandwritingColor, TieGoesToDarkerBin) {
    const Raster blank = paper(40, 40);
    Raster filled = blank;
    paint(filled, 100, kRed, 100);
    paint(filled, 100, kBlue, 300);
    const InkColor ink = handwriting_color(color_histogram(filled), color_histogram(blank));
    const ColorHistogram q{5, {}};
    EXPECT_EQ(q.bin_of(ink.center), q.bin_of(kBlue));
}

TEST(HandwritingColor, MismatchedDepthsRejected) {
    const Raster img = paper(8, 8);
    try {
        handwriting_color(color_histogram(img, 5), color_histogram(img, 4));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}

TEST(Rescale, MatchesTotal) {
    const ColorHistogram h = color_histogram(paper(30, 20));
    EXPECT_EQ(rescale(h, 600).counts, h.counts);
    const ColorHistogram r = rescale(h, 1200);
    for (std::size_t i = 0; i < h.counts.size(); ++i) EXPECT_EQ(r.counts[i], 2 * h.counts[i]);
}

TEST(InkMask, ZeroToleranceKeepsExactPixels) {
    Raster img = paper(20, 10);
    img.set_rgb(3, 4, kBlue);
    img.set_rgb(9, 1, kBlue);
    img.set_rgb(10, 1, {21, 52, 164});
    const BitMask m = extract_ink_mask(img, {kBlue, {0, 0, 0}});
    EXPECT_EQ(m.count(), 2u);
    EXPECT_TRUE(m.get(3, 4));
    EXPECT_TRUE(m.get(9, 1));
}

TEST(InkMask, MatchesPerPixelBandTest) {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const Raster img = oracle::random_rgb(rng, 16, 16);
        const InkColor c{{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                          static_cast<std::uint8_t>(rng())},
                         {static_cast<int>(rng() % 120), static_cast<int>(rng() % 120), static_cast<int>(rng() % 120)}};
        ASSERT_EQ(extract_ink_mask(img, c), oracle::ink_mask(img, c));
    }
}

TEST(InkMask, GeneratedCheckAgreesWithGroundTruth) {
    for (const char* code : {"02", "10", "14"}) {
        const GenSpec s = fixture::spec(code, 19);
        const fixture::Check c = fixture::make(s);
        const ColorHistogram hf = color_histogram(c.filled.image);
        const InkColor ink = handwriting_color(hf, rescale(color_histogram(c.scanned_blank), hf.total()));
        const BitMask got = extract_ink_mask(c.filled.image, ink);
        const Handwriting hw = render_handwriting(*c.bank, s);
        const Rect f = c.filled.gt.frame;
        std::size_t both = 0, either = 0;
        for (int y = 0; y < got.height(); ++y) {
            for (int x = 0; x < got.width(); ++x) {
                const bool truth = hw.ink.get_or_zero(x - f.x, y - f.y);
                both += truth && got.get(x, y);
                either += truth || got.get(x, y);
            }
        }
        EXPECT_GE(static_cast<double>(both) / either, 0.95) << code;
    }
}

TEST(Improve, UntouchedWhenNothingCrosses) {
    BitMask m(40, 30);
    for (int x = 12; x < 18; ++x) m.set(x, 10);
    const Rect r{10, 5, 15, 15};
    EXPECT_EQ(improve_zone_bounds(m, r, label_components(m)), r);
}

TEST(Improve, StraddlingComponentWidensByItsOverhang) {
    BitMask m(60, 30);
    for (int x = 20; x < 39; ++x) m.set(x, 12);  // rect right edge is 30: 9 px beyond
    const Rect r{5, 5, 25, 20};
    EXPECT_EQ(improve_zone_bounds(m, r, label_components(m)), (Rect{5, 5, 34, 20}));
}

TEST(Improve, ClampsAtTheFrame) {
    BitMask m(30, 20);
    for (int y = 0; y < 20; ++y) m.set(10, y);
    const Rect got = improve_zone_bounds(m, {5, 5, 10, 10}, label_components(m));
    EXPECT_EQ(got, (Rect{5, 0, 10, 20}));
}

TEST(Improve, MatchesBoundingBoxUnion) {
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 300; ++trial) {
        const BitMask m = strokes(rng, 40, 30, 12 + trial % 20);
        const LabelMap lm = label_components(m);
        const int x = rng() % 30, y = rng() % 20;
        const Rect r{x, y, 1 + static_cast<int>(rng() % (40 - x)), 1 + static_cast<int>(rng() % (30 - y))};
        const Rect got = improve_zone_bounds(m, r, lm);
        ASSERT_EQ(got, oracle::improve(m, r)) << trial;
        EXPECT_TRUE(got.contains(r));
        EXPECT_EQ(improve_zone_bounds(m, got, lm), got);
    }
}

TEST(Paws, EmptyZone) {
    EXPECT_TRUE(group_paws(BitMask(20, 20), {2, 2, 10, 10}).empty());
}

TEST(Paws, SeparatedStrokesStayApart) {
    BitMask m(80, 40);
    // Three strokes 8 px apart horizontally (> 2*3+1), plus one 4 rows below (> 2*1+1).
    for (int k = 0; k < 3; ++k) {
        for (int x = 5 + k * 12; x < 9 + k * 12; ++x) m.set(x, 10);
    }
    for (int x = 5; x < 9; ++x) m.set(x, 14);
    EXPECT_EQ(group_paws(m, m.frame(), 3, 1).size(), 4u);
}

TEST(Paws, NarrowGapBridges) {
    BitMask m(40, 10);
    for (int x = 5; x < 10; ++x) m.set(x, 5);
    for (int x = 12; x < 17; ++x) m.set(x, 5);
    EXPECT_EQ(group_paws(m, m.frame(), 3, 1).size(), 1u);
}

TEST(Paws, MatchesMinkowskiSeparation) {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 200; ++trial) {
        const BitMask m = strokes(rng, 36, 24, 3 + trial % 6);
        const int h = rng() % 4, v = rng() % 3;
        const auto groups = group_paws(m, m.frame(), h, v);
        ASSERT_EQ(static_cast<int>(groups.size()), paw_oracle_groups(m, h, v)) << trial;
    }
}

TEST(Paws, PartitionOrderAndMonotonicity) {
    std::mt19937_64 rng(74);
    for (int trial = 0; trial < 60; ++trial) {
        const BitMask m = strokes(rng, 50, 30, 10);
        const Rect zone{4, 3, 40, 24};
        const auto groups = group_paws(m, zone);
        std::size_t covered = 0;
        BitMask seen(m.width(), m.height());
        for (const PawGroup& g : groups) {
            EXPECT_EQ(g.pixels, g.clip.count());
            covered += g.pixels;
            for (int y = 0; y < g.box.h; ++y) {
                for (int x = 0; x < g.box.w; ++x) {
                    if (!g.clip.get(x, y)) continue;
                    EXPECT_FALSE(seen.get(g.box.x + x, g.box.y + y));
                    seen.set(g.box.x + x, g.box.y + y);
                    EXPECT_TRUE(m.get(g.box.x + x, g.box.y + y));
                }
            }
        }
        EXPECT_EQ(covered, m.crop(zone).count());
        for (std::size_t i = 1; i < groups.size(); ++i) {
            const Rect& a = groups[i - 1].box;
            const Rect& b = groups[i].box;
            EXPECT_TRUE(a.right() > b.right() || (a.right() == b.right() && a.y <= b.y));
        }
        for (int h = 0; h < 4; ++h) {
            EXPECT_GE(group_paws(m, zone, h, 1).size(), group_paws(m, zone, h + 1, 1).size());
            EXPECT_GE(group_paws(m, zone, 3, h).size(), group_paws(m, zone, 3, h + 1).size());
        }
    }
}

TEST(Assign, MajorityOfPixels) {
    BitMask m(100, 40);
    for (int x = 10; x < 20; ++x) m.set(x, 5);   // inside zone 0
    for (int x = 40; x < 50; ++x) m.set(x, 18);  // 7 px in zone 0, 3 in zone 1
    m.set(90, 35);                              // in no zone
    const std::vector<Zone> zones{{ZoneKind::LiteralAmount, {0, 0, 47, 30}},
                                  {ZoneKind::Conductor, {47, 0, 40, 30}}};
    const auto owner = assign_components_to_zones(label_components(m), zones);
    EXPECT_EQ(owner, (std::vector<int>{0, 0, -1}));
}

TEST(Assign, MatchesPixelCountOracle) {
    std::mt19937_64 rng(75);
    for (int trial = 0; trial < 200; ++trial) {
        const BitMask m = strokes(rng, 40, 30, 10);
        std::vector<Zone> zones;
        for (int k = 0; k < 3; ++k) {
            const int x = rng() % 30, y = rng() % 20;
            zones.push_back({kAllZoneKinds[k], {x, y, 3 + static_cast<int>(rng() % 15), 3 + static_cast<int>(rng() % 12)}});
        }
        const LabelMap lm = label_components(m);
        const auto owner = assign_components_to_zones(lm, zones);
        for (int l = 1; l <= lm.count(); ++l) {
            std::vector<int> count(zones.size(), 0);
            for (int y = 0; y < m.height(); ++y) {
                for (int x = 0; x < m.width(); ++x) {
                    if (lm.at(x, y) != l) continue;
                    for (std::size_t k = 0; k < zones.size(); ++k) count[k] += zones[k].rect.contains(x, y);
                }
            }
            int best = -1;
            for (std::size_t k = 0; k < zones.size(); ++k) {
                if (!count[k]) continue;
                const auto area = [&](std::size_t i) { return intersect(lm.box(l), zones[i].rect).area(); };
                if (best < 0 || count[k] > count[best] || (count[k] == count[best] && area(k) > area(best))) {
                    best = static_cast<int>(k);
                }
            }
            ASSERT_EQ(owner[l - 1], best);
        }
    }
}

TEST(ClipZones, ScalesAndShifts) {
    const BankRecord& stb = *default_registry().find_code("10");
    const BitMask frame(3000, 1500);
    const auto zs = clip_zones(frame, stb, 300.0, 10, 20);
    EXPECT_EQ(zs[0].rect, (Rect{758 * 2 + 10, 22 * 2 + 20, 226 * 2, 60 * 2}));
}
