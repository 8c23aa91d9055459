#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrm/error.hpp"
#include "mrm/io.hpp"

using namespace mrm;

namespace {

std::string data_dir() {
    const char* d = std::getenv("MRM_DATA_DIR");
    return d ? d : "data";
}

json inline_doc() {
    return json::parse(R"({
        "radius_um": 10,
        "segments": [{"label": "A", "fraction": 0.3}, {"fraction": 0.3}],
        "coupling_ratio": 0.99,
        "response": {"lambda_ref_nm": 1310, "rows": [[0, 0, 20], [2, 2e-4, 18], [4, 3e-4, 17]]}
    })");
}

}  // namespace

TEST(Num, RoundsAndNullsNonFinite) {
    EXPECT_EQ(num(1.0 / 3.0).dump(), "0.333333333333");
    EXPECT_TRUE(num(std::nan("")).is_null());
}

TEST(Device, InlineResponse) {
    const auto d = parse_device(inline_doc());
    ASSERT_EQ(d.ring.segment_count(), 2u);
    EXPECT_EQ(d.ring.segments[0].label, "A");
    EXPECT_EQ(d.ring.segments[1].label, "S2");
    EXPECT_NEAR(d.ring.self_coupling, 0.99 * zero_bias_amplitude(d.ring, d.response), 1e-15);
    EXPECT_EQ(d.response.rows().size(), 3u);
}

TEST(Device, ExplicitSelfCoupling) {
    auto doc = inline_doc();
    doc.erase("coupling_ratio");
    doc["self_coupling"] = 0.9;
    EXPECT_EQ(parse_device(doc).ring.self_coupling, 0.9);
}

TEST(Device, RejectsBadDocuments) {
    auto doc = inline_doc();
    doc["colour"] = "blue";
    EXPECT_THROW(parse_device(doc), ConfigError);

    doc = inline_doc();
    doc["self_coupling"] = 0.9;
    EXPECT_THROW(parse_device(doc), ConfigError);

    doc = inline_doc();
    doc.erase("response");
    EXPECT_THROW(parse_device(doc), ConfigError);

    doc = inline_doc();
    doc["radius_um"] = "ten";
    EXPECT_THROW(parse_device(doc), ConfigError);

    doc = inline_doc();
    doc["segments"] = json::array();
    EXPECT_THROW(parse_device(doc), ConfigError);

    doc = inline_doc();
    doc["response"]["rows"][1] = {2, 1e-4};
    EXPECT_THROW(parse_device(doc), ConfigError);
}

TEST(Device, ShippedConfigsMatchBuiltIns) {
    const auto three = load_device(data_dir() + "/three_segment.json");
    const auto ref = three_segment_ring();
    EXPECT_EQ(three.ring.segment_count(), 3u);
    EXPECT_NEAR(three.ring.self_coupling, ref.self_coupling, 1e-12);
    const auto two = load_device(data_dir() + "/two_segment.json");
    EXPECT_NEAR(two.ring.segments[0].fraction, two_segment_ring().segments[0].fraction, 1e-12);
    EXPECT_EQ(two.response.rows().size(), default_response().rows().size());
}

TEST(Device, MissingOrMalformedFiles) {
    EXPECT_THROW(load_device("/nonexistent/config.json"), ConfigError);
    const auto dir = std::filesystem::temp_directory_path() / "mrm_io_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "bad.json") << "{ \"radius_um\": ";
    }
    EXPECT_THROW(load_device((dir / "bad.json").string()), ConfigError);
    {
        std::ofstream(dir / "ref.json") << R"({"segments": [{"fraction": 0.2}], "response_csv": "missing.csv"})";
    }
    EXPECT_THROW(load_device((dir / "ref.json").string()), ConfigError);
}

TEST(Device, JsonRoundTrip) {
    const auto ring = three_segment_ring();
    const auto doc = device_json(ring, default_response(), kDefaultCouplingRatio, std::nullopt);
    const auto back = parse_device(doc);
    EXPECT_NEAR(back.ring.self_coupling, ring.self_coupling, 1e-12);
    EXPECT_EQ(back.response.rows().size(), default_response().rows().size());
}

TEST(Csv, SpectrumFormat) {
    std::ostringstream out;
    write_spectrum_csv(out, {{1314.0, 0.5}, {1314.0005, 1.0 / 3.0}});
    EXPECT_EQ(out.str(), "lambda_nm,transmission\n1314,0.5\n1314.0005,0.333333333333\n");
}

TEST(Csv, RangeHeadersByEncoding) {
    RangeReport r;
    r.request.encoding = EncodingKind::two_segment_binary;
    RangePoint p;
    p.lambda_nm = 1314.07;
    p.best_rlm = 0.5;
    p.encoding = EncodingScheme::binary(2.0, 1.5);
    r.points.push_back(p);
    std::ostringstream out;
    write_range_csv(out, r);
    EXPECT_EQ(out.str(), "lambda_nm,best_rlm,v_msb,v_lsb,il_db,er_db,tp_db\n1314.07,0.5,2,1.5,nan,nan,nan\n");
}

TEST(Json, MetricsRecordFields) {
    const PamLevels lv{{0.1, 0.2, 0.3, 0.4}};
    const auto j = metrics_record(1314.0, lv, linearity_metrics(lv));
    for (const char* k : {"lambda_nm", "p0", "p1", "p2", "p3", "rlm", "il_db", "er_db", "tp_db"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["rlm"].get<double>(), 1.0);
}

TEST(Csv, WaveformColumns) {
    Waveform w{8, 31.25, {{0.0, 1.0}, {2.0, 3.0}}};
    std::ostringstream out;
    write_waveform_csv(out, w);
    EXPECT_EQ(out.str(), "t_ps,v_s1,v_s2\n0,0,2\n3.90625,1,3\n");
}
