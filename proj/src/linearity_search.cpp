#include "mrm/linearity_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mrm/error.hpp"
#include "mrm/format.hpp"
#include "mrm/parallel.hpp"
#include "mrm/ring_sim.hpp"
#include "mrm/roots.hpp"

namespace mrm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kConvergedRlm = 0.9999;

void require_wavelength(double lambda_nm) {
    if (!(lambda_nm > 0.0) || !std::isfinite(lambda_nm))
        throw ArgumentError("wavelength must be a positive finite value in nm");
}

void require_in_table(const ElectroOpticResponse& resp, double v, const char* what) {
    if (!(v >= resp.v_min() && v <= resp.v_max()))
        throw RangeError(std::string(what) + " = " + format_double(v) + " V outside response table range [" +
                         format_double(resp.v_min()) + ", " + format_double(resp.v_max()) + "] V");
}

void require_segments(const RingConfig& cfg, EncodingKind kind) {
    if (cfg.segment_count() != segments_for(kind))
        throw ArgumentError(to_string(kind) + " encoding needs a ring with " + std::to_string(segments_for(kind)) +
                            " segments, config has " + std::to_string(cfg.segment_count()));
}

// RLM, or -inf when the levels are degenerate.
double rlm_or_floor(const PamLevels& lv) {
    if (lv.p[0] == lv.p[3]) return -std::numeric_limits<double>::infinity();
    return rlm(lv).rlm;
}

std::optional<LinearityMetrics> metrics_or_none(const PamLevels& lv, double p_in) {
    try {
        return linearity_metrics(lv, p_in);
    } catch (const DegenerateLevelsError&) {
        return std::nullopt;
    } catch (const MathDomainError&) {
        return std::nullopt;
    }
}

// Final evaluation shared by every search path, so the reported RLM is exactly
// what an independent levels_for + rlm call returns at the reported voltages.
void finish(SolveResult& r, const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm) {
    const auto lv = levels_for(cfg, resp, lambda_nm, r.encoding);
    r.achieved_rlm = rlm_or_floor(lv);
    r.metrics = metrics_or_none(lv, cfg.p_in);
}

std::vector<double> voltage_grid(const VoltageBounds& b, double step) {
    std::vector<double> g;
    if (b.hi == b.lo) return {b.lo};
    const auto n = static_cast<std::size_t>(std::ceil((b.hi - b.lo) / step - 1e-9));
    g.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) g.push_back(b.lo + static_cast<double>(i) * step);
    g.push_back(b.hi);
    return g;
}

struct Maximum2d {
    double x = 0.0;
    double y = 0.0;
    double value = -std::numeric_limits<double>::infinity();
};

// Coarse grid over bounds^2 (row-major, strict improvement keeps the smallest
// x then y on ties), followed by a compass search with diagonal moves.
template <class F>
Maximum2d maximize_in_box(F&& f, const VoltageBounds& b, const SearchOptions& opts) {
    const auto grid = voltage_grid(b, opts.coarse_step_v);
    Maximum2d best;
    best.x = best.y = grid.front();
    for (double x : grid)
        for (double y : grid) {
            const double v = f(x, y);
            if (v > best.value) best = {x, y, v};
        }
    if (grid.size() == 1) return best;

    static constexpr std::array<std::array<int, 2>, 8> dirs{
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};
    double h = 0.5 * opts.coarse_step_v;
    while (h >= opts.refine_tol_v) {
        Maximum2d cand = best;
        for (const auto& d : dirs) {
            const double x = std::clamp(best.x + d[0] * h, b.lo, b.hi);
            const double y = std::clamp(best.y + d[1] * h, b.lo, b.hi);
            const double v = f(x, y);
            if (v > cand.value) cand = {x, y, v};
        }
        if (cand.value > best.value)
            best = cand;
        else
            h *= 0.5;
    }
    return best;
}

}  // namespace

void VoltageBounds::validate(const ElectroOpticResponse& resp) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || lo > hi)
        throw ArgumentError("voltage bounds must satisfy 0 <= lo <= hi, got " + format_double(lo) + ":" +
                            format_double(hi));
    require_in_table(resp, lo, "lower bound");
    require_in_table(resp, hi, "upper bound");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::out_of_bounds: return "out-of-bounds";
        case SolveStatus::no_bracket: return "no-bracket";
        case SolveStatus::degenerate: return "degenerate";
        case SolveStatus::best_effort: return "best-effort";
    }
    return "unknown";
}

std::string to_string(RangeProtocol p) { return p == RangeProtocol::bounded_search ? "bounded" : "fixed"; }

RangeProtocol parse_protocol(const std::string& s) {
    if (s == "bounded") return RangeProtocol::bounded_search;
    if (s == "fixed") return RangeProtocol::fixed_drive;
    throw ArgumentError("unknown protocol '" + s + "' (expected bounded or fixed)");
}

SolveResult solve_three_segment(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                                double v1, const VoltageBounds& bounds, const SearchOptions& opts) {
    require_wavelength(lambda_nm);
    require_segments(cfg, EncodingKind::three_segment_thermometer);
    require_in_table(resp, v1, "V1");
    bounds.validate(resp);

    SolveResult r;
    r.encoding = EncodingScheme::thermometer(v1, kNaN, kNaN);
    r.achieved_rlm = kNaN;

    const auto t3 = [&](double a, double b, double c) { return transmission(cfg, resp, lambda_nm, {{a, b, c}}); };
    const double p0 = t3(0.0, 0.0, 0.0);
    const double p1 = t3(v1, 0.0, 0.0);
    const double gap = p1 - p0;
    if (std::abs(gap) <= 1e-15) {
        r.status = SolveStatus::degenerate;
        return r;
    }

    const auto f2 = [&](double v) { return (t3(v1, v, 0.0) - p1) - gap; };
    const auto b2 = first_sign_change(f2, resp.v_min(), resp.v_max(), opts.bracket_scan_step_v);
    if (!b2) {
        r.status = SolveStatus::no_bracket;
        return r;
    }
    const double v2 = solve_bracketed(f2, *b2, opts.root_tol_v);
    r.encoding.voltages[1] = v2;

    const double p2 = t3(v1, v2, 0.0);
    const auto f3 = [&](double v) { return (t3(v1, v2, v) - p2) - gap; };
    const auto b3 = first_sign_change(f3, resp.v_min(), resp.v_max(), opts.bracket_scan_step_v);
    if (!b3) {
        r.status = SolveStatus::no_bracket;
        return r;
    }
    r.encoding.voltages[2] = solve_bracketed(f3, *b3, opts.root_tol_v);

    finish(r, cfg, resp, lambda_nm);
    const bool in_bounds = bounds.contains(r.encoding.voltages[1]) && bounds.contains(r.encoding.voltages[2]);
    r.converged = in_bounds && r.achieved_rlm >= kConvergedRlm;
    if (!in_bounds)
        r.status = SolveStatus::out_of_bounds;
    else
        r.status = r.converged ? SolveStatus::converged : SolveStatus::best_effort;
    return r;
}

SolveResult best_rlm_three_segment_bounded(const RingConfig& cfg, const ElectroOpticResponse& resp,
                                           double lambda_nm, double v1, const VoltageBounds& bounds,
                                           const SearchOptions& opts) {
    require_wavelength(lambda_nm);
    require_segments(cfg, EncodingKind::three_segment_thermometer);
    require_in_table(resp, v1, "V1");
    bounds.validate(resp);

    const auto objective = [&](double v2, double v3) {
        return rlm_or_floor(levels_for(cfg, resp, lambda_nm, EncodingScheme::thermometer(v1, v2, v3)));
    };
    const auto m = maximize_in_box(objective, bounds, opts);
    SolveResult r;
    r.encoding = EncodingScheme::thermometer(v1, m.x, m.y);
    r.status = SolveStatus::best_effort;
    finish(r, cfg, resp, lambda_nm);
    return r;
}

SolveResult best_rlm_two_segment(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                                 const VoltageBounds& bounds, const SearchOptions& opts) {
    require_wavelength(lambda_nm);
    require_segments(cfg, EncodingKind::two_segment_binary);
    bounds.validate(resp);

    const auto objective = [&](double v_msb, double v_lsb) {
        return rlm_or_floor(levels_for(cfg, resp, lambda_nm, EncodingScheme::binary(v_msb, v_lsb)));
    };
    const auto m = maximize_in_box(objective, bounds, opts);
    SolveResult r;
    r.encoding = EncodingScheme::binary(m.x, m.y);
    r.status = SolveStatus::best_effort;
    finish(r, cfg, resp, lambda_nm);
    return r;
}

RangeReport linear_range(const RingConfig& cfg, const ElectroOpticResponse& resp, const RangeRequest& req,
                         const SearchOptions& opts) {
    require_segments(cfg, req.encoding);
    if (!(req.lambda_step_nm <= kMaxRangeStepNm))
        throw ArgumentError("range grid step " + format_double(req.lambda_step_nm) + " nm exceeds " +
                            format_double(kMaxRangeStepNm) + " nm");
    if (!std::isfinite(req.threshold)) throw ArgumentError("threshold must be finite");
    const auto grid = wavelength_grid(req.lambda_start_nm, req.lambda_stop_nm, req.lambda_step_nm);
    if (req.protocol == RangeProtocol::bounded_search) {
        req.bounds.validate(resp);
        if (req.encoding == EncodingKind::three_segment_thermometer) require_in_table(resp, req.v1, "V1");
    } else {
        require_in_table(resp, req.v_fixed, "fixed drive voltage");
    }

    RangeReport report;
    report.request = req;
    report.points.resize(grid.size());

    parallel_for(grid.size(), req.threads, [&](std::size_t i) {
        const double lam = grid[i];
        RangePoint& pt = report.points[i];
        pt.lambda_nm = lam;
        SolveResult sr;
        if (req.protocol == RangeProtocol::fixed_drive) {
            const double v = req.v_fixed;
            sr.encoding = req.encoding == EncodingKind::three_segment_thermometer
                              ? EncodingScheme::thermometer(v, v, v)
                              : EncodingScheme::binary(v, v);
            finish(sr, cfg, resp, lam);
            pt.source = "fixed-drive";
        } else if (req.encoding == EncodingKind::three_segment_thermometer) {
            sr = solve_three_segment(cfg, resp, lam, req.v1, req.bounds, opts);
            pt.source = "exact";
            if (!sr.converged) {
                sr = best_rlm_three_segment_bounded(cfg, resp, lam, req.v1, req.bounds, opts);
                pt.source = "bounded-search";
            }
        } else {
            sr = best_rlm_two_segment(cfg, resp, lam, req.bounds, opts);
            pt.source = "bounded-search";
        }
        pt.best_rlm = sr.achieved_rlm;
        pt.encoding = sr.encoding;
        pt.metrics = sr.metrics;
        pt.qualifies = pt.best_rlm >= req.threshold;
    });

    // Contiguous qualifying runs, by grid index.
    std::vector<std::pair<std::size_t, std::size_t>> idx_runs;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!report.points[i].qualifies) continue;
        if (!idx_runs.empty() && idx_runs.back().second + 1 == i)
            idx_runs.back().second = i;
        else
            idx_runs.emplace_back(i, i);
    }
    for (const auto& [a, b] : idx_runs) report.runs.emplace_back(grid[a], grid[b]);
    if (idx_runs.empty()) return report;

    auto best = idx_runs.front();
    for (const auto& run : idx_runs)
        if (run.second - run.first > best.second - best.first) best = run;
    report.lambda_min_nm = grid[best.first];
    report.lambda_max_nm = grid[best.second];
    report.window_width_nm = grid[best.second] - grid[best.first];
    for (std::size_t i = best.first; i <= best.second; ++i) {
        const auto& m = report.points[i].metrics;
        if (!m) continue;
        report.il_min_db = report.il_min_db ? std::min(*report.il_min_db, m->il_db) : m->il_db;
        report.il_max_db = report.il_max_db ? std::max(*report.il_max_db, m->il_db) : m->il_db;
    }
    if (idx_runs.size() > 1) {
        std::string msg = "qualifying set is disconnected (" + std::to_string(idx_runs.size()) + " runs):";
        for (const auto& [a, b] : report.runs) msg += " [" + format_double(a) + ", " + format_double(b) + "]";
        report.warning = msg;
    }
    return report;
}

double il_tuning_range(const RangeReport& report) {
    if (report.empty() || !report.il_min_db || !report.il_max_db)
        throw EmptyWindowError("IL tuning range undefined: no qualifying wavelength window");
    return *report.il_max_db - *report.il_min_db;
}

}  // namespace mrm
