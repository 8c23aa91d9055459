#pragma once

#include <optional>
#include <vector>

#include "mrm/device_model.hpp"

namespace mrm {

struct SpectrumPoint {
    double lambda_nm = 0.0;
    double transmission = 0.0;
};

struct ResonanceInfo {
    double lambda_res_nm = 0.0;
    double fwhm_nm = 0.0;
    double extinction_db = 0.0;
    double q_factor = 0.0;
    std::optional<double> fsr_nm;
};

struct WavelengthWindow {
    double lo_nm = 0.0;
    double hi_nm = 0.0;
};

// All-pass ring power transmission |(sigma - a e^{i theta}) / (1 - sigma a e^{i theta})|^2,
// clamped to [0, 1].
double transmission_from_phase(double sigma, double amplitude, double theta);

double transmission(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                    const DriveState& drive);

// Inclusive uniform grid start, start+step, ... up to stop. start == stop yields one point.
std::vector<double> wavelength_grid(double start_nm, double stop_nm, double step_nm);

std::vector<SpectrumPoint> spectrum(const RingConfig& cfg, const ElectroOpticResponse& resp, double start_nm,
                                    double stop_nm, double step_nm, const DriveState& drive,
                                    unsigned threads = 1);

// Locates the single transmission minimum in `window`, refined to 1e-6 nm.
// FWHM uses the half-depth level between the minimum and the anti-resonant maximum.
// Throws SearchError when the window holds no minimum or more than one.
ResonanceInfo find_resonance(const RingConfig& cfg, const ElectroOpticResponse& resp, const DriveState& drive,
                             WavelengthWindow window);

// Free spectral range from the group index, lambda^2 / (n_g L).
double estimated_fsr(const RingConfig& cfg, double lambda_nm);

// Distance from `res` to the next resonance on the long-wavelength side,
// located numerically.
double measure_fsr(const RingConfig& cfg, const ElectroOpticResponse& resp, const DriveState& drive,
                   const ResonanceInfo& res);

}  // namespace mrm
