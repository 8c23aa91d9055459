#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrm/device_model.hpp"
#include "mrm/pam_metrics.hpp"

namespace mrm {

// Allowed drive amplitude for the adjustable segments.
struct VoltageBounds {
    double lo = 1.5;
    double hi = 3.0;

    // 0 <= lo <= hi, both inside the response table. lo == hi is accepted
    // and pins the search to a single point.
    void validate(const ElectroOpticResponse& resp) const;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

enum class SolveStatus {
    converged,      // equal spacing reached with voltages inside the bounds
    out_of_bounds,  // roots exist but at least one lies outside the bounds
    no_bracket,     // no sign change of a level-difference function over the table range
    degenerate,     // p1 == p0, spacing undefined
    best_effort,    // bounded maximisation result (no exact solve attempted or possible)
};

std::string to_string(SolveStatus s);

struct SolveResult {
    EncodingScheme encoding;  // voltages; NaN entries where no root was found
    double achieved_rlm = 0.0;
    std::optional<LinearityMetrics> metrics;
    bool converged = false;
    SolveStatus status = SolveStatus::no_bracket;
};

struct SearchOptions {
    double coarse_step_v = 0.025;      // grid for bounded maximisation
    double refine_tol_v = 1e-4;        // final pattern-search step
    double bracket_scan_step_v = 0.01; // root bracketing scan
    double root_tol_v = 1e-9;
};

// Thermometer solve with V1 fixed. Exploits the prefix structure: p0 and p1
// depend only on V1, so V2 is the root of (p2 - p1) - (p1 - p0) and then V3
// the root of (p3 - p2) - (p1 - p0). Roots are searched over the whole table
// range and reported even when they fall outside `bounds`.
SolveResult solve_three_segment(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                                double v1, const VoltageBounds& bounds, const SearchOptions& opts = {});

// Maximises RLM over (V2, V3) in bounds^2 with V1 fixed.
SolveResult best_rlm_three_segment_bounded(const RingConfig& cfg, const ElectroOpticResponse& resp,
                                           double lambda_nm, double v1, const VoltageBounds& bounds,
                                           const SearchOptions& opts = {});

// Maximises RLM over (V_MSB, V_LSB) in bounds^2: coarse grid, then a compass
// search (axis and diagonal moves) down to refine_tol_v. Grid ties resolve to
// the smallest V_MSB, then the smallest V_LSB.
SolveResult best_rlm_two_segment(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                                 const VoltageBounds& bounds, const SearchOptions& opts = {});

enum class RangeProtocol {
    bounded_search,  // per wavelength, best RLM reachable inside the bounds
    fixed_drive,     // every segment at one fixed voltage
};

std::string to_string(RangeProtocol p);
RangeProtocol parse_protocol(const std::string& s);  // "bounded" | "fixed"

inline constexpr double kMaxRangeStepNm = 0.001;

struct RangeRequest {
    EncodingKind encoding = EncodingKind::three_segment_thermometer;
    RangeProtocol protocol = RangeProtocol::bounded_search;
    VoltageBounds bounds;
    double lambda_start_nm = 0.0;
    double lambda_stop_nm = 0.0;
    double lambda_step_nm = 0.0005;
    double threshold = 0.95;
    double v1 = 2.0;       // three-segment bounded search only
    double v_fixed = 2.0;  // fixed_drive only
    unsigned threads = 1;
};

struct RangePoint {
    double lambda_nm = 0.0;
    double best_rlm = 0.0;
    EncodingScheme encoding;
    std::optional<LinearityMetrics> metrics;
    bool qualifies = false;
    std::string source;  // "exact", "bounded-search" or "fixed-drive"
};

struct RangeReport {
    RangeRequest request;
    std::optional<double> lambda_min_nm;
    std::optional<double> lambda_max_nm;
    double window_width_nm = 0.0;
    std::optional<double> il_min_db;
    std::optional<double> il_max_db;
    std::vector<std::pair<double, double>> runs;  // every qualifying run, ascending
    std::optional<std::string> warning;
    std::vector<RangePoint> points;

    bool empty() const { return !lambda_min_nm.has_value(); }
};

// The window is the longest contiguous run of grid points whose best RLM
// reaches the threshold (first such run on ties). An empty qualifying set
// produces an empty report, not an error.
RangeReport linear_range(const RingConfig& cfg, const ElectroOpticResponse& resp, const RangeRequest& req,
                         const SearchOptions& opts = {});

// il_max - il_min over the window. Throws EmptyWindowError.
double il_tuning_range(const RangeReport& report);

}  // namespace mrm
