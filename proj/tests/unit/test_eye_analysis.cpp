#include <gtest/gtest.h>

#include <sstream>

#include "mrm/error.hpp"
#include "mrm/eye_analysis.hpp"
#include "mrm/linearity_search.hpp"
#include "mrm/ring_sim.hpp"

using namespace mrm;

namespace {

constexpr double kLam = 1314.07;

Waveform constant_wave(const std::vector<double>& volts, std::size_t n, int spu = 16) {
    Waveform w{spu, 31.25, {}};
    for (double v : volts) w.segments.emplace_back(n, v);
    return w;
}

}  // namespace

TEST(SegmentBits, AgreeWithEncodingDrive) {
    const std::vector<int> sym = {0, 1, 2, 3};
    const auto t = segment_bits_for(sym, EncodingKind::three_segment_thermometer);
    const auto b = segment_bits_for(sym, EncodingKind::two_segment_binary);
    const auto te = EncodingScheme::thermometer(1, 1, 1);
    const auto be = EncodingScheme::binary(1, 1);
    for (int k = 0; k < 4; ++k) {
        for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(t[s][k], drive_for_code(te, k).volts[s]);
        for (std::size_t s = 0; s < 2; ++s) EXPECT_EQ(b[s][k], drive_for_code(be, k).volts[s]);
    }
}

TEST(Trace, ConstantDriveEqualsStaticLevels) {
    const auto cfg = three_segment_ring();
    const auto enc = EncodingScheme::thermometer(2.0, 1.75, 1.8);
    const auto lv = levels_for(cfg, default_response(), kLam, enc);
    for (int k = 0; k < 4; ++k) {
        const auto trace = optical_trace(constant_wave(drive_for_code(enc, k).volts, 64), cfg, default_response(), kLam);
        for (double p : trace) EXPECT_NEAR(p, lv.p[k], 1e-12);
    }
}

TEST(Trace, AlternatingOuterLevelsAtHighBandwidth) {
    const auto cfg = three_segment_ring();
    std::vector<int> sym;
    for (int i = 0; i < 40; ++i) sym.push_back(i % 2 ? 3 : 0);
    const std::vector<double> v = {2.0, 2.0, 2.0};
    const auto wave = drive_waveform(segment_bits_for(sym, EncodingKind::three_segment_thermometer), v,
                                     {32, 31.25, 1e6});
    const auto trace = optical_trace(wave, cfg, default_response(), kLam);
    const auto lv = levels_for(cfg, default_response(), kLam, EncodingScheme::thermometer(2, 2, 2));
    for (std::size_t i = 0; i < sym.size(); ++i) EXPECT_NEAR(trace[i * 32 + 16], lv.p[sym[i]], 1e-9);
}

TEST(Trace, SegmentMismatchThrows) {
    EXPECT_THROW(optical_trace(constant_wave({0.0, 0.0}, 8), three_segment_ring(), default_response(), kLam),
                 ArgumentError);
}

TEST(Fold, ConstantTraceSingleRow) {
    const std::vector<double> trace(16 * 10, 0.425);
    const auto r = fold_eye(trace, 16);
    EXPECT_EQ(r.time_bins, 32);
    EXPECT_EQ(r.total(), trace.size());
    for (int p = 0; p < r.power_bins; ++p)
        for (int t = 0; t < r.time_bins; ++t) EXPECT_EQ(r.at(p, t) > 0, p == 42);
}

TEST(Fold, ClampsOutOfRangePower) {
    std::vector<double> trace(64, 1.0);
    trace[0] = -0.1;
    const auto r = fold_eye(trace, 8);
    EXPECT_EQ(r.at(99, 1), 4u);
    EXPECT_EQ(r.at(0, 0), 1u);
    EXPECT_EQ(r.total(), 64u);
}

TEST(Fold, PeriodicTraceCropInvariant) {
    const int spu = 8;
    std::vector<double> period(2 * spu);
    for (int i = 0; i < 2 * spu; ++i) period[i] = 0.05 * i;
    std::vector<double> a, b;
    for (int rep = 0; rep < 6; ++rep) a.insert(a.end(), period.begin(), period.end());
    for (int rep = 0; rep < 9; ++rep) b.insert(b.end(), period.begin(), period.end());
    const auto ra = fold_eye(a, spu), rb = fold_eye(b, spu);
    for (std::size_t i = 0; i < ra.counts.size(); ++i) EXPECT_EQ(ra.counts[i] * 9, rb.counts[i] * 6);
}

TEST(Fold, TooShortThrows) { EXPECT_THROW(fold_eye(std::vector<double>(31, 0.1), 8), ArgumentError); }

TEST(Metrics, IdealWaveformMatchesStaticRlm) {
    const auto cfg = three_segment_ring();
    const auto sr = solve_three_segment(cfg, default_response(), kLam, 2.0, {});
    ASSERT_TRUE(sr.converged);
    const auto sym = pam4_symbols({7, 0xFFFFFFFFu}, 2000);
    const auto wave = drive_waveform(segment_bits_for(sym, EncodingKind::three_segment_thermometer),
                                     sr.encoding.voltages, {32, 31.25, 1e7});
    const auto trace = optical_trace(wave, cfg, default_response(), kLam);
    const auto m = eye_metrics(trace, sym, 32);
    const double stat = rlm(levels_for(cfg, default_response(), kLam, sr.encoding)).rlm;
    EXPECT_NEAR(m.dynamic_rlm, stat, 1e-9);
    for (int k = 1; k < 4; ++k) {
        EXPECT_GT(m.mean[k], m.mean[k - 1]);
        EXPECT_GT(m.height[k - 1], 0.0);
        EXPECT_LE(m.height[k - 1], m.gap[k - 1]);
    }
}

TEST(Metrics, SamplingWindowSelection) {
    // spu 10, window 0.2: offsets whose centre lies in [0.4, 0.6] are 4 and 5.
    std::vector<int> sym;
    for (int i = 0; i < 400; ++i) sym.push_back(i % 4);
    std::vector<double> trace;
    for (int s : sym)
        for (int j = 0; j < 10; ++j) trace.push_back((j == 4 || j == 5) ? 0.1 * s + 0.1 : 0.9);
    const auto m = eye_metrics(trace, sym, 10, 0.2);
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(m.mean[k], 0.1 * k + 0.1, 1e-14);
        EXPECT_EQ(m.samples[k], 200u);
        EXPECT_NEAR(m.stddev[k], 0.0, 1e-14);
    }
    EXPECT_NEAR(m.dynamic_rlm, 1.0, 1e-12);
}

TEST(Metrics, MissingLevelsInsufficient) {
    const std::vector<int> sym(500, 2);
    const std::vector<double> trace(500 * 8, 0.3);
    EXPECT_THROW(eye_metrics(trace, sym, 8), InsufficientDataError);
}

TEST(Metrics, LengthMismatchThrows) {
    const std::vector<int> sym(10, 1);
    EXPECT_THROW(eye_metrics(std::vector<double>(79, 0.1), sym, 8), ArgumentError);
}

TEST(Raster, WritersPutHighPowerFirst) {
    std::vector<double> trace(32, 0.0);
    for (int i = 0; i < 8; ++i) trace[i] = 0.99;
    const auto r = fold_eye(trace, 4, 31.25, 10);
    std::ostringstream csv, pgm;
    write_raster_csv(csv, r);
    write_raster_pgm(pgm, r);
    std::istringstream lines(csv.str());
    std::string first;
    std::getline(lines, first);
    EXPECT_EQ(first, "1,1,1,1,1,1,1,1");
    EXPECT_EQ(pgm.str().substr(0, 12), "P2\n8 10\n255\n");
}
