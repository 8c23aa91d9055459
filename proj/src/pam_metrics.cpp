#include "mrm/pam_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mrm/error.hpp"
#include "mrm/ring_sim.hpp"

namespace mrm {

std::string to_string(EncodingKind kind) {
    return kind == EncodingKind::three_segment_thermometer ? "three-seg" : "two-seg";
}

EncodingKind parse_encoding(const std::string& s) {
    if (s == "three-seg") return EncodingKind::three_segment_thermometer;
    if (s == "two-seg") return EncodingKind::two_segment_binary;
    throw ArgumentError("unknown encoding '" + s + "' (expected three-seg or two-seg)");
}

std::size_t segments_for(EncodingKind kind) {
    return kind == EncodingKind::three_segment_thermometer ? 3 : 2;
}

DriveState drive_for_code(const EncodingScheme& enc, int code) {
    if (code < 0 || code > 3) throw ArgumentError("PAM-4 code must be 0..3");
    const std::size_t n = segments_for(enc.kind);
    if (enc.voltages.size() != n)
        throw ArgumentError(to_string(enc.kind) + " encoding needs " + std::to_string(n) + " voltages");
    DriveState d = DriveState::zeros(n);
    if (enc.kind == EncodingKind::three_segment_thermometer) {
        for (int s = 0; s < code; ++s) d.volts[s] = enc.voltages[s];
    } else {
        if (code & 0b10) d.volts[0] = enc.voltages[0];
        if (code & 0b01) d.volts[1] = enc.voltages[1];
    }
    return d;
}

PamLevels levels_for(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                     const EncodingScheme& enc) {
    if (cfg.segment_count() != segments_for(enc.kind))
        throw ArgumentError(to_string(enc.kind) + " encoding needs a ring with " +
                            std::to_string(segments_for(enc.kind)) + " segments, config has " +
                            std::to_string(cfg.segment_count()));
    PamLevels lv;
    for (int k = 0; k < 4; ++k) lv.p[k] = transmission(cfg, resp, lambda_nm, drive_for_code(enc, k));
    return lv;
}

RlmResult rlm(const PamLevels& levels) {
    const auto& p = levels.p;
    if (p[0] == p[3]) throw DegenerateLevelsError("RLM undefined: p0 equals p3");
    const double p_min = 0.5 * (p[0] + p[3]);
    RlmResult r;
    r.es1 = (p[1] - p_min) / (p[0] - p_min);
    r.es2 = (p[2] - p_min) / (p[3] - p_min);
    r.rlm = std::min({3.0 * r.es1, 3.0 * r.es2, 2.0 - 3.0 * r.es1, 2.0 - 3.0 * r.es2});
    return r;
}

namespace {

double db10(double ratio, const char* what) {
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        throw MathDomainError(std::string(what) + ": power ratio must be positive and finite");
    return 10.0 * std::log10(ratio);
}

}  // namespace

double il_db(const PamLevels& levels, double p_in) {
    if (!(levels.p[3] > 0.0)) throw MathDomainError("IL: p3 must be positive");
    return -db10(levels.p[3] / p_in, "IL");
}

double er_db(const PamLevels& levels) {
    if (!(levels.p[0] > 0.0) || !(levels.p[3] > 0.0)) throw MathDomainError("ER: levels must be positive");
    return db10(levels.p[3] / levels.p[0], "ER");
}

double tp_db(const PamLevels& levels, double p_in) {
    const double sum = levels.p[3] + levels.p[0];
    if (!(sum > 0.0)) throw MathDomainError("TP: p3 + p0 must be positive");
    return db10(2.0 * p_in / sum, "TP");
}

LinearityMetrics linearity_metrics(const PamLevels& levels, double p_in) {
    const auto r = rlm(levels);
    return {r.rlm, r.es1, r.es2, il_db(levels, p_in), er_db(levels), tp_db(levels, p_in)};
}

}  // namespace mrm
