#pragma once

#include <array>
#include <string>
#include <vector>

#include "mrm/device_model.hpp"

namespace mrm {

enum class EncodingKind {
    three_segment_thermometer,  // code k drives segments 1..k
    two_segment_binary,         // code = 2*msb + lsb; segment 0 is MSB, segment 1 is LSB
};

std::string to_string(EncodingKind kind);
EncodingKind parse_encoding(const std::string& s);  // "three-seg" | "two-seg"

// Drive voltages of an encoding: (V1, V2, V3) for the thermometer,
// (V_MSB, V_LSB) for the binary scheme.
struct EncodingScheme {
    EncodingKind kind = EncodingKind::three_segment_thermometer;
    std::vector<double> voltages;

    static EncodingScheme thermometer(double v1, double v2, double v3) {
        return {EncodingKind::three_segment_thermometer, {v1, v2, v3}};
    }
    static EncodingScheme binary(double v_msb, double v_lsb) {
        return {EncodingKind::two_segment_binary, {v_msb, v_lsb}};
    }
};

std::size_t segments_for(EncodingKind kind);

// Drive applied for PAM-4 symbol `code` (0..3).
DriveState drive_for_code(const EncodingScheme& enc, int code);

struct PamLevels {
    std::array<double, 4> p{};

    // p0 < p1 < p2 < p3
    bool monotone() const { return p[0] < p[1] && p[1] < p[2] && p[2] < p[3]; }
};

struct RlmResult {
    double rlm = 0.0;
    double es1 = 0.0;
    double es2 = 0.0;
};

struct LinearityMetrics {
    double rlm = 0.0;
    double es1 = 0.0;
    double es2 = 0.0;
    double il_db = 0.0;
    double er_db = 0.0;
    double tp_db = 0.0;
};

PamLevels levels_for(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                     const EncodingScheme& enc);

// Ratio of level mismatch:
//   P_min = (p0 + p3) / 2
//   ES1 = (p1 - P_min) / (p0 - P_min),  ES2 = (p2 - P_min) / (p3 - P_min)
//   RLM = min(3 ES1, 3 ES2, 2 - 3 ES1, 2 - 3 ES2)
// Throws DegenerateLevelsError when p0 == p3.
RlmResult rlm(const PamLevels& levels);

// Insertion loss at the brightest level, -10 log10(p3 / p_in).
double il_db(const PamLevels& levels, double p_in = 1.0);
// 10 log10(p3 / p0)
double er_db(const PamLevels& levels);
// Transmission penalty 10 log10(2 p_in / (p3 + p0)), outer levels standing in
// for the NRZ one/zero powers.
double tp_db(const PamLevels& levels, double p_in = 1.0);

LinearityMetrics linearity_metrics(const PamLevels& levels, double p_in = 1.0);

}  // namespace mrm
