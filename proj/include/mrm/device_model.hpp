#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mrm {

// One row of the tabulated phase-shifter response.
struct ResponseRow {
    double v_reverse = 0.0;    // V, >= 0
    double delta_n_eff = 0.0;  // dimensionless
    double alpha_db_cm = 0.0;  // dB/cm
};

struct ResponsePoint {
    double delta_n_eff = 0.0;
    double alpha_db_cm = 0.0;
};

// Effective-index change and propagation loss of the doped waveguide versus
// reverse bias. Immutable once constructed; the constructor enforces
// ordering and monotonicity of both columns.
class ElectroOpticResponse {
public:
    ElectroOpticResponse(std::vector<ResponseRow> rows, double lambda_ref_nm);

    // Piecewise-linear in both columns, exact at the nodes.
    // Throws RangeError outside [v_min(), v_max()].
    ResponsePoint interpolate(double v) const;

    const std::vector<ResponseRow>& rows() const { return rows_; }
    double lambda_ref_nm() const { return lambda_ref_nm_; }
    double v_min() const { return rows_.front().v_reverse; }
    double v_max() const { return rows_.back().v_reverse; }

private:
    std::vector<ResponseRow> rows_;
    double lambda_ref_nm_;
};

// Closed-form depletion fit used to produce the shipped table:
//   delta_n(V) = index_coeff * (sqrt(V + v_bi) - sqrt(v_bi))
//   alpha(V)   = alpha_0v - alpha_drop * s(V) / s(v_max)
// where s(V) is the same square-root depletion width term.
struct DepletionFit {
    double index_coeff = 2.1e-4;
    double v_bi = 0.9;
    double alpha_0v_db_cm = 60.0;
    double alpha_drop_db_cm = 8.0;
    double v_max = 4.0;
    double v_step = 0.05;
    double lambda_ref_nm = 1310.0;
};

ElectroOpticResponse make_depletion_response(const DepletionFit& fit = {});

// Default shipped table (make_depletion_response with the default fit).
const ElectroOpticResponse& default_response();

// CSV with header `v_reverse,delta_n_eff,alpha_db_per_cm`. The reference
// wavelength is not part of the CSV and must be supplied.
ElectroOpticResponse read_response_csv(std::istream& in, double lambda_ref_nm);
ElectroOpticResponse load_response_csv(const std::string& path, double lambda_ref_nm);
void write_response_csv(std::ostream& out, const ElectroOpticResponse& resp);

struct Segment {
    std::string label;
    double fraction = 0.0;  // of the circumference
};

struct RingConfig {
    double radius_um = 10.0;
    std::vector<Segment> segments;
    double passive_n_eff = 2.556094;
    double group_index = 4.0;
    double passive_alpha_db_cm = 2.0;
    double self_coupling = 0.97;  // sigma
    double p_in = 1.0;
    // Ablation switch: hold every segment's loss at its 0 V value.
    bool freeze_loss = false;

    double circumference_nm() const;
    double doped_fraction() const;
    std::size_t segment_count() const { return segments.size(); }

    // Throws ConfigError on a violated invariant.
    void validate() const;
};

inline constexpr double kDefaultCouplingRatio = 0.995;

// Three segments of 20% each (S1, S2, S3).
RingConfig three_segment_ring(const ElectroOpticResponse& resp = default_response(),
                              double coupling_ratio = kDefaultCouplingRatio);

// 60% doped, split 1.9:1 between MSB (segment 0) and LSB (segment 1).
RingConfig two_segment_ring(const ElectroOpticResponse& resp = default_response(),
                            double coupling_ratio = kDefaultCouplingRatio);

// Per-segment reverse voltages, index-aligned with RingConfig::segments.
struct DriveState {
    std::vector<double> volts;

    static DriveState zeros(std::size_t n) { return DriveState{std::vector<double>(n, 0.0)}; }
};

struct RoundTrip {
    double theta = 0.0;      // rad
    double amplitude = 1.0;  // single-pass field transmission a
};

// Wavelength-dependent index of an undriven section, first-order dispersion
// through the group index.
double passive_index(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm);

RoundTrip round_trip(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                     const DriveState& drive);

// Round-trip amplitude with every segment at 0 V.
double zero_bias_amplitude(const RingConfig& cfg, const ElectroOpticResponse& resp);

// Sets sigma = ratio * a(0 V). A ratio below 1 over-couples the ring.
RingConfig with_coupling_ratio(RingConfig cfg, const ElectroOpticResponse& resp, double ratio);

// Non-empty when the ring is not over-coupled at 0 V (sigma >= a).
std::optional<std::string> coupling_warning(const RingConfig& cfg, const ElectroOpticResponse& resp);

}  // namespace mrm
