#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrm/cli.hpp"
#include "mrm/io.hpp"

using namespace mrm;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& f) {
    const char* d = std::getenv("MRM_DATA_DIR");
    return std::string(d ? d : "data") + "/" + f;
}

struct Run {
    int code;
    std::string out, err;
};

Run cli_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    const auto d = fs::temp_directory_path() / "mrm_cli_test";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, SpectrumCsvRows) {
    const auto r = cli_run({"spectrum", "--lambda-start", "1314", "--lambda-stop", "1314.01", "--lambda-step", "0.001"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 12);
    EXPECT_EQ(r.out.rfind("lambda_nm,transmission\n", 0), 0u);
}

TEST(Cli, SpectrumMatchesLibraryByteForByte) {
    const auto r = cli_run({"spectrum", "--config", data("three_segment.json"), "--lambda-start", "1313.9",
                            "--lambda-stop", "1314.2", "--lambda-step", "0.01", "--drive", "1,2,3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto d = load_device(data("three_segment.json"));
    std::ostringstream golden;
    write_spectrum_csv(golden, spectrum(d.ring, d.response, 1313.9, 1314.2, 0.01, DriveState{{1, 2, 3}}));
    EXPECT_EQ(r.out, golden.str());
}

TEST(Cli, SpectrumReversedRangeIsUsageError) {
    const auto r = cli_run({"spectrum", "--lambda-start", "1315", "--lambda-stop", "1314"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, SolveConverges) {
    const auto r = cli_run({"solve", "--lambda", "1314.07", "--v1", "2.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["converged"].get<bool>());
    EXPECT_GE(j["achieved_rlm"].get<double>(), 0.9999);
}

TEST(Cli, SolveWithZeroV1IsAFindingNotAFailure) {
    const auto r = cli_run({"solve", "--lambda", "1314.07", "--v1", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_FALSE(json::parse(r.out)["converged"].get<bool>());
}

TEST(Cli, MalformedConfigIsUsageError) {
    const auto p = scratch() / "malformed.json";
    std::ofstream(p) << "{ not json";
    EXPECT_EQ(cli_run({"solve", "--config", p.string(), "--lambda", "1314.07"}).code, 2);
}

TEST(Cli, MissingResponseTableIsUsageError) {
    const auto p = scratch() / "no_table.json";
    std::ofstream(p) << R"({"segments": [{"fraction": 0.2}, {"fraction": 0.2}, {"fraction": 0.2}],
                            "response_csv": "does_not_exist.csv"})";
    EXPECT_EQ(cli_run({"eye", "--config", p.string(), "--lambda", "1314.07"}).code, 2);
}

TEST(Cli, EncodingConfigMismatchIsUsageError) {
    EXPECT_EQ(cli_run({"solve", "--config", data("two_segment.json"), "--lambda", "1314.07"}).code, 2);
}

TEST(Cli, DomainErrorExitThree) {
    // No resonance inside this window.
    EXPECT_EQ(cli_run({"resonance", "--lambda-start", "1315", "--lambda-stop", "1316"}).code, 3);
}

TEST(Cli, UnknownFlagAndSubcommand) {
    EXPECT_EQ(cli_run({"solve", "--lambda", "1314", "--bogus"}).code, 2);
    EXPECT_EQ(cli_run({"frobnicate"}).code, 2);
    EXPECT_EQ(cli_run({}).code, 2);
    EXPECT_EQ(cli_run({"solve", "--lambda", "1314.07", "--bounds", "1.5-3"}).code, 2);
}

TEST(Cli, RangeThresholdZeroSpansGrid) {
    const auto r = cli_run({"range", "--lambda-start", "1314.06", "--lambda-stop", "1314.08", "--threshold", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["window_width_nm"].get<double>(), 0.02, 1e-9);
}

TEST(Cli, RangeEmptyWindowExitsZero) {
    const auto r = cli_run({"range", "--encoding", "two-seg", "--lambda-start", "1314.0", "--lambda-stop",
                            "1314.01", "--threshold", "0.99"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["window_width_nm"].get<double>(), 0.0);
    EXPECT_TRUE(j["lambda_min_nm"].is_null());
}

TEST(Cli, RangeCsvFormat) {
    const auto r = cli_run({"range", "--lambda-start", "1314.06", "--lambda-stop", "1314.062", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("lambda_nm,best_rlm,v2,v3,il_db,er_db,tp_db\n", 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}

TEST(Cli, EyeDeterministicAndNearStaticAtHugeBandwidth) {
    const auto dir = scratch();
    std::vector<std::string> args = {"eye",      "--lambda", "1314.07", "--voltages", "2,1.75,1.8",
                                     "--seed",   "5",        "--count", "2048",       "--bandwidth",
                                     "1e6",      "--raster", (dir / "eye.pgm").string()};
    const auto a = cli_run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    const auto raster_a = slurp(dir / "eye.pgm");
    const auto b = cli_run(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(raster_a, slurp(dir / "eye.pgm"));
    const auto j = json::parse(a.out);
    EXPECT_NEAR(j["dynamic_rlm"].get<double>(), j["static_rlm"].get<double>(), 1e-6);
}

TEST(Cli, PrbsBitsAndHex) {
    const auto bits = cli_run({"prbs", "--order", "7"});
    ASSERT_EQ(bits.code, 0);
    EXPECT_EQ(std::count(bits.out.begin(), bits.out.end(), '\n'), 127);
    const auto hex = cli_run({"prbs", "--order", "7", "--count", "16", "--format", "hex"});
    ASSERT_EQ(hex.code, 0);
    EXPECT_EQ(hex.out.size(), 5u);  // two bytes + newline
    EXPECT_EQ(cli_run({"prbs", "--order", "31"}).code, 2);
    EXPECT_EQ(cli_run({"prbs", "--seed", "0"}).code, 2);
}

TEST(Cli, OutWritesFile) {
    const auto p = scratch() / "levels.json";
    const auto r = cli_run({"levels", "--lambda", "1314.07", "--out", p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = json::parse(slurp(p));
    EXPECT_TRUE(j.contains("rlm"));
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(cli_run({"--help"}).code, 0); }
