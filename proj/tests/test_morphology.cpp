#include <gtest/gtest.h>

#include <random>

#include "checkseg/bankid.hpp"
#include "checkseg/cmc7.hpp"
#include "checkseg/error.hpp"
#include "checkseg/morphology.hpp"
#include "oracles.hpp"

using namespace checkseg;

namespace {

StructuringElement random_se(std::mt19937_64& rng) {
    const SeShape shapes[] = {SeShape::HorizontalSegment, SeShape::VerticalSegment, SeShape::Square};
    return {shapes[rng() % 3], 1 + static_cast<int>(rng() % 3)};
}

bool subset(const BitMask& a, const BitMask& b) {
    for (std::size_t i = 0; i < a.bits().size(); ++i) {
        if (a.bits()[i] && !b.bits()[i]) return false;
    }
    return true;
}

}  // namespace

TEST(Dilate, EmptyStaysEmpty) {
    EXPECT_FALSE(dilate(BitMask(9, 9), StructuringElement::square(2)).any());
}

TEST(Dilate, SinglePixelHorizontalLevelOne) {
    BitMask m(7, 5);
    m.set(3, 2);
    const BitMask d = dilate(m, StructuringElement::horizontal(1));
    EXPECT_EQ(d.count(), 3u);
    EXPECT_TRUE(d.get(2, 2) && d.get(3, 2) && d.get(4, 2));
}

TEST(Dilate, ClampsAtBorders) {
    BitMask m(5, 5);
    m.set(0, 0);
    const BitMask d = dilate(m, StructuringElement::square(1));
    EXPECT_EQ(d.count(), 4u);
    EXPECT_FALSE(d.get(4, 0));
    EXPECT_FALSE(d.get(0, 4));
}

TEST(Dilate, MatchesMinkowskiOracle) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const BitMask m = oracle::random_mask(rng, 12, 12, 0.02 + 0.3 * (trial % 7) / 6.0);
        const StructuringElement se = random_se(rng);
        ASSERT_EQ(dilate(m, se), oracle::dilate(m, se)) << trial;
    }
}

TEST(Dilate, ExtensiveAndMonotone) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const BitMask a = oracle::random_mask(rng, 15, 11, 0.1);
        BitMask b = a;
        for (int k = 0; k < 10; ++k) b.set(rng() % 15, rng() % 11);
        const StructuringElement se = random_se(rng);
        EXPECT_TRUE(subset(a, dilate(a, se)));
        EXPECT_TRUE(subset(dilate(a, se), dilate(b, se)));
    }
}

TEST(Dilate, CollinearSegmentsCompose) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        const BitMask m = oracle::random_mask(rng, 20, 14, 0.05);
        const int a = 1 + rng() % 3, b = 1 + rng() % 3;
        EXPECT_EQ(dilate(dilate(m, StructuringElement::horizontal(a)), StructuringElement::horizontal(b)),
                  dilate(m, StructuringElement::horizontal(a + b)));
        EXPECT_EQ(dilate(dilate(m, StructuringElement::vertical(a)), StructuringElement::vertical(b)),
                  dilate(m, StructuringElement::vertical(a + b)));
    }
}

TEST(Label, EmptyMask) {
    EXPECT_EQ(label_components(BitMask(6, 6)).count(), 0);
    EXPECT_EQ(label_components(BitMask(6, 6)).largest(), 0);
}

TEST(Label, DiagonalPairDependsOnConnectivity) {
    BitMask m(3, 3);
    m.set(0, 0);
    m.set(1, 1);
    EXPECT_EQ(count_components(m, 8), 1);
    EXPECT_EQ(count_components(m, 4), 2);
}

TEST(Label, MatchesFloodFillPartition) {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 300; ++trial) {
        const BitMask m = oracle::random_mask(rng, 20, 20, 0.1 + 0.6 * (trial % 9) / 8.0);
        for (int conn : {4, 8}) {
            const LabelMap lm = label_components(m, conn);
            int n = 0;
            const std::vector<int> id = oracle::flood_partition(m, conn, &n);
            ASSERT_TRUE(oracle::same_partition(lm.labels, id, lm.count(), n)) << trial << " conn " << conn;
        }
    }
}

TEST(Label, ScanOrderBoxesAndSizes) {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 100; ++trial) {
        const BitMask m = oracle::random_mask(rng, 18, 13, 0.3);
        const LabelMap lm = label_components(m);
        int next = 1;
        std::size_t total = 0;
        std::vector<Rect> boxes(lm.count());
        std::vector<std::size_t> sizes(lm.count(), 0);
        std::vector<char> seen(lm.count(), 0);
        for (int y = 0; y < m.height(); ++y) {
            for (int x = 0; x < m.width(); ++x) {
                const int l = lm.at(x, y);
                if (!l) continue;
                if (!seen[l - 1]) {
                    ASSERT_EQ(l, next++);
                    seen[l - 1] = 1;
                    boxes[l - 1] = {x, y, 1, 1};
                }
                boxes[l - 1] = unite(boxes[l - 1], Rect{x, y, 1, 1});
                ++sizes[l - 1];
            }
        }
        for (int l = 1; l <= lm.count(); ++l) {
            EXPECT_EQ(lm.box(l), boxes[l - 1]);
            EXPECT_EQ(lm.size(l), sizes[l - 1]);
            total += lm.size(l);
        }
        EXPECT_EQ(total, m.count());
        EXPECT_EQ(label_components(m).labels, lm.labels);
    }
}

TEST(Label, ComponentMaskAndLargest) {
    BitMask m(8, 3);
    m.set(0, 0);
    m.set(4, 1);
    m.set(5, 1);
    const LabelMap lm = label_components(m);
    EXPECT_EQ(lm.largest(), 2);
    const BitMask c = lm.component_mask(2);
    EXPECT_EQ(c.count(), 2u);
    EXPECT_TRUE(c.get(5, 1));
}

TEST(UltimateDilation, SingleComponentIsUntouched) {
    BitMask m(6, 6);
    m.set(2, 2);
    m.set(3, 3);
    const UltimateDilation u = ultimate_dilate(m, StructuringElement::horizontal(1), 5);
    EXPECT_EQ(u.iterations, 0);
    EXPECT_EQ(u.components, 1);
    EXPECT_EQ(u.mask, m);
}

TEST(UltimateDilation, GlyphFusesWithinThreeSteps) {
    const GlyphTable& t = default_glyph_table();
    for (int unit : {2, 3, 4, 5}) {
        for (const Cmc7Glyph& g : t.glyphs) {
            const BitMask m = render_glyph(g, proportional_glyph_geometry(unit));
            const UltimateDilation u = ultimate_dilate(m, StructuringElement::horizontal((unit + 1) / 2), 8);
            EXPECT_EQ(u.components, 1) << g.value << " @" << unit;
            EXPECT_LE(u.iterations, 3) << g.value << " @" << unit;
        }
    }
}

TEST(UltimateDilation, CountNeverRises) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 50; ++trial) {
        BitMask m = oracle::random_mask(rng, 30, 10, 0.05);
        int before = count_components(m);
        for (int i = 0; i < 6; ++i) {
            m = dilate(m, StructuringElement::horizontal(1));
            const int now = count_components(m);
            EXPECT_LE(now, before);
            before = now;
        }
    }
}

TEST(UltimateDilation, TwoGlyphsWithTooFewStepsDoNotConverge) {
    const GlyphTable& t = default_glyph_table();
    const GlyphGeometry g = proportional_glyph_geometry(3);
    const int w0 = t.digit(0).width_units() * g.unit;
    BitMask m(2 * w0 + 3 * g.unit + 8, g.height + 8);
    for_each_glyph_pixel(t.digit(0), g, 4, 4, [&](int x, int y) { m.set(x, y); });
    for_each_glyph_pixel(t.digit(0), g, 4 + w0 + 3 * g.unit, 4, [&](int x, int y) { m.set(x, y); });
    try {
        ultimate_dilate(m, StructuringElement::horizontal(2), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DidNotConverge);
    }
}

TEST(RemoveSmall, DropsSpecksOnly) {
    BitMask m(10, 10);
    m.set(0, 0);
    for (int x = 3; x < 8; ++x) m.set(x, 5);
    const BitMask r = remove_small_components(m, 3);
    EXPECT_FALSE(r.get(0, 0));
    EXPECT_EQ(r.count(), 5u);
}
