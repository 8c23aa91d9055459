#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mrm/error.hpp"
#include "mrm/pam_metrics.hpp"
#include "mrm/ring_sim.hpp"
#include "oracles.hpp"

using namespace mrm;

TEST(Rlm, EquallySpacedIsOne) {
    EXPECT_EQ(rlm(PamLevels{{0.0, 1.0, 2.0, 3.0}}).rlm, 1.0);
    EXPECT_NEAR(rlm(PamLevels{{0.1, 0.2, 0.3, 0.4}}).rlm, 1.0, 1e-12);
}

TEST(Rlm, WorkedExample) { EXPECT_NEAR(rlm(PamLevels{{0.0, 0.9, 2.1, 3.0}}).rlm, 0.8, 1e-12); }

TEST(Rlm, MatchesDirectFormula) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
        std::sort(p.begin(), p.end());
        if (p[3] - p[0] < 1e-6) continue;
        EXPECT_NEAR(rlm(PamLevels{p}).rlm, oracle::rlm(p[0], p[1], p[2], p[3]), 1e-12);
    }
}

TEST(Rlm, AffineInvariant) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0), scale(0.1, 10.0), shift(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
        std::sort(p.begin(), p.end());
        if (p[3] - p[0] < 1e-3) continue;
        const double a = scale(rng), b = shift(rng);
        std::array<double, 4> q;
        for (int k = 0; k < 4; ++k) q[k] = a * p[k] + b;
        EXPECT_NEAR(rlm(PamLevels{q}).rlm, rlm(PamLevels{p}).rlm, 1e-9);
    }
}

TEST(Rlm, DescendingLevelsGiveSameValue) {
    // Swapping the level order flips every ES numerator and denominator together.
    EXPECT_NEAR(rlm(PamLevels{{3.0, 2.1, 0.9, 0.0}}).rlm, 0.8, 1e-12);
}

TEST(Rlm, NeverExceedsOne) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
        if (p[0] == p[3]) continue;
        EXPECT_LE(rlm(PamLevels{p}).rlm, 1.0 + 1e-12);
    }
}

TEST(Rlm, MonotoneLevelsCanStillGoNegative) {
    // Inner levels crowded at the bottom: ordered, yet far from equal spacing.
    const PamLevels lv{{0.0, 0.01, 0.02, 1.0}};
    ASSERT_TRUE(lv.monotone());
    EXPECT_NEAR(rlm(lv).rlm, oracle::rlm(0.0, 0.01, 0.02, 1.0), 1e-15);
    EXPECT_LT(rlm(lv).rlm, 0.0);
}

TEST(Rlm, NonNegativeWhenInnerLevelsStayInMiddleThirds) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double p0 = u(rng), span = 0.1 + u(rng);
        const double p1 = p0 + span * (1.0 / 6.0 + u(rng) / 3.0);
        const double p2 = p0 + span * (0.5 + u(rng) / 3.0);
        const double r = rlm(PamLevels{{p0, p1, p2, p0 + span}}).rlm;
        EXPECT_GE(r, -1e-12);
        EXPECT_LE(r, 1.0 + 1e-12);
    }
}

TEST(Rlm, DegenerateThrows) { EXPECT_THROW(rlm(PamLevels{{0.5, 0.5, 0.5, 0.5}}), DegenerateLevelsError); }

TEST(LevelMetrics, Definitions) {
    const PamLevels lv{{0.1, 0.2, 0.3, 0.5}};
    EXPECT_NEAR(il_db(lv), -10.0 * std::log10(0.5), 1e-12);
    EXPECT_NEAR(er_db(lv), 10.0 * std::log10(5.0), 1e-12);
    EXPECT_NEAR(tp_db(lv), 10.0 * std::log10(2.0 / 0.6), 1e-12);
    EXPECT_THROW(il_db(PamLevels{{0.0, 0.0, 0.0, 0.0}}), MathDomainError);
    EXPECT_THROW(er_db(PamLevels{{0.0, 0.1, 0.2, 0.3}}), MathDomainError);
}

TEST(Encoding, ThermometerPrefix) {
    const auto enc = EncodingScheme::thermometer(2.0, 1.7, 1.8);
    EXPECT_EQ(drive_for_code(enc, 0).volts, (std::vector<double>{0.0, 0.0, 0.0}));
    EXPECT_EQ(drive_for_code(enc, 1).volts, (std::vector<double>{2.0, 0.0, 0.0}));
    EXPECT_EQ(drive_for_code(enc, 2).volts, (std::vector<double>{2.0, 1.7, 0.0}));
    EXPECT_EQ(drive_for_code(enc, 3).volts, (std::vector<double>{2.0, 1.7, 1.8}));
}

TEST(Encoding, BinaryMsbLsb) {
    const auto enc = EncodingScheme::binary(2.5, 1.5);
    EXPECT_EQ(drive_for_code(enc, 1).volts, (std::vector<double>{0.0, 1.5}));
    EXPECT_EQ(drive_for_code(enc, 2).volts, (std::vector<double>{2.5, 0.0}));
    EXPECT_EQ(drive_for_code(enc, 3).volts, (std::vector<double>{2.5, 1.5}));
    EXPECT_THROW(drive_for_code(enc, 4), ArgumentError);
}

TEST(Encoding, ParseNames) {
    EXPECT_EQ(parse_encoding("three-seg"), EncodingKind::three_segment_thermometer);
    EXPECT_EQ(parse_encoding("two-seg"), EncodingKind::two_segment_binary);
    EXPECT_THROW(parse_encoding("four-seg"), ArgumentError);
}

TEST(Levels, FromRingAreMonotoneBelowResonance) {
    // Reverse bias red-shifts the notch away from a blue-side wavelength, so
    // transmission rises with every added segment.
    const auto cfg = three_segment_ring();
    const auto lv = levels_for(cfg, default_response(), 1314.07, EncodingScheme::thermometer(2.0, 2.0, 2.0));
    EXPECT_TRUE(lv.monotone());
    EXPECT_NEAR(lv.p[0], transmission(cfg, default_response(), 1314.07, DriveState::zeros(3)), 0.0);
}

TEST(Levels, SegmentCountMustMatch) {
    EXPECT_THROW(levels_for(two_segment_ring(), default_response(), 1314.07,
                            EncodingScheme::thermometer(2.0, 2.0, 2.0)),
                 ArgumentError);
}
