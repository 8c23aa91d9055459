#include "mrm/ring_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mrm/error.hpp"
#include "mrm/format.hpp"
#include "mrm/parallel.hpp"

namespace mrm {

namespace {

constexpr double kRefineTolNm = 1e-7;
constexpr double kCrossingTolNm = 1e-9;
constexpr double kMaxGridPoints = 5e7;

double golden_minimum(auto&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// Walks from `from` in `direction` until f >= level, then bisects the crossing.
double half_level_crossing(auto&& f, double from, double direction, double level, double limit) {
    double inner = 0.0;
    double step = 1e-4;
    while (f(from + direction * step) < level) {
        inner = step;
        step *= 2.0;
        if (step > limit) throw SearchError("no half-depth crossing within half an FSR of the resonance");
    }
    double outer = step;
    while (outer - inner > kCrossingTolNm) {
        const double mid = 0.5 * (inner + outer);
        if (f(from + direction * mid) < level)
            inner = mid;
        else
            outer = mid;
    }
    return from + direction * 0.5 * (inner + outer);
}

}  // namespace

double transmission_from_phase(double sigma, double amplitude, double theta) {
    const double c = std::cos(theta);
    const double sa = sigma * amplitude;
    const double num = sigma * sigma + amplitude * amplitude - 2.0 * sa * c;
    const double den = 1.0 + sa * sa - 2.0 * sa * c;
    return std::clamp(num / den, 0.0, 1.0);
}

double transmission(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                    const DriveState& drive) {
    const auto rt = round_trip(cfg, resp, lambda_nm, drive);
    return transmission_from_phase(cfg.self_coupling, rt.amplitude, rt.theta);
}

std::vector<double> wavelength_grid(double start_nm, double stop_nm, double step_nm) {
    if (!std::isfinite(start_nm) || !std::isfinite(stop_nm) || !std::isfinite(step_nm))
        throw ArgumentError("wavelength grid: non-finite bound");
    if (!(start_nm > 0.0)) throw ArgumentError("wavelength grid: start must be positive");
    if (stop_nm < start_nm)
        throw ArgumentError("wavelength grid: stop " + format_double(stop_nm) + " nm is below start " +
                            format_double(start_nm) + " nm");
    if (!(step_nm > 0.0)) throw ArgumentError("wavelength grid: step must be positive");
    const double span = (stop_nm - start_nm) / step_nm;
    if (span > kMaxGridPoints) throw ArgumentError("wavelength grid: too many points");
    // Relative slack so that stop lands on the grid despite rounding of the division.
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = start_nm + static_cast<double>(i) * step_nm;
    return grid;
}

std::vector<SpectrumPoint> spectrum(const RingConfig& cfg, const ElectroOpticResponse& resp, double start_nm,
                                    double stop_nm, double step_nm, const DriveState& drive,
                                    unsigned threads) {
    const auto grid = wavelength_grid(start_nm, stop_nm, step_nm);
    std::vector<SpectrumPoint> out(grid.size());
    parallel_for(grid.size(), threads,
                 [&](std::size_t i) { out[i] = {grid[i], transmission(cfg, resp, grid[i], drive)}; });
    return out;
}

double estimated_fsr(const RingConfig& cfg, double lambda_nm) {
    return lambda_nm * lambda_nm / (cfg.group_index * cfg.circumference_nm());
}

ResonanceInfo find_resonance(const RingConfig& cfg, const ElectroOpticResponse& resp, const DriveState& drive,
                             WavelengthWindow window) {
    if (!(window.lo_nm > 0.0) || !(window.hi_nm > window.lo_nm))
        throw ArgumentError("resonance window must satisfy 0 < lo < hi");
    const auto t_at = [&](double l) { return transmission(cfg, resp, l, drive); };

    const double width = window.hi_nm - window.lo_nm;
    const auto samples = static_cast<std::size_t>(std::clamp(width / 5e-4, 2000.0, 200000.0)) + 1;
    std::vector<double> lam(samples);
    std::vector<double> t(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        lam[i] = window.lo_nm + width * static_cast<double>(i) / static_cast<double>(samples - 1);
        t[i] = t_at(lam[i]);
    }
    std::vector<std::size_t> minima;
    for (std::size_t i = 1; i + 1 < samples; ++i)
        if (t[i] < t[i - 1] && t[i] <= t[i + 1]) minima.push_back(i);
    if (minima.empty())
        throw SearchError("no transmission minimum inside [" + format_double(window.lo_nm) + ", " +
                          format_double(window.hi_nm) + "] nm");
    if (minima.size() > 1)
        throw SearchError(std::to_string(minima.size()) + " transmission minima inside the window; narrow it");

    const std::size_t k = minima.front();
    const double lam_res = golden_minimum(t_at, lam[k - 1], lam[k + 1], kRefineTolNm);
    const double t_min = t_at(lam_res);

    const auto rt = round_trip(cfg, resp, lam_res, drive);
    const double t_max = transmission_from_phase(cfg.self_coupling, rt.amplitude, rt.theta + std::numbers::pi);
    const double half = 0.5 * (t_min + t_max);
    const double limit = 0.5 * estimated_fsr(cfg, lam_res);
    const double right = half_level_crossing(t_at, lam_res, +1.0, half, limit);
    const double left = half_level_crossing(t_at, lam_res, -1.0, half, limit);

    ResonanceInfo info;
    info.lambda_res_nm = lam_res;
    info.fwhm_nm = right - left;
    info.extinction_db = -10.0 * std::log10(t_min);
    info.q_factor = lam_res / info.fwhm_nm;
    return info;
}

double measure_fsr(const RingConfig& cfg, const ElectroOpticResponse& resp, const DriveState& drive,
                   const ResonanceInfo& res) {
    const double est = estimated_fsr(cfg, res.lambda_res_nm);
    const auto next =
        find_resonance(cfg, resp, drive, {res.lambda_res_nm + 0.5 * est, res.lambda_res_nm + 1.5 * est});
    return next.lambda_res_nm - res.lambda_res_nm;
}

}  // namespace mrm
