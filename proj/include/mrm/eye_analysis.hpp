#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mrm/datapath.hpp"
#include "mrm/device_model.hpp"
#include "mrm/pam_metrics.hpp"

namespace mrm {

// Per-segment bit streams that realise a PAM-4 symbol stream: the LUT
// slices for the thermometer ring, {MSB, LSB} for the binary ring.
std::vector<Bits> segment_bits_for(std::span<const int> symbols, EncodingKind kind,
                                   const LutConfig& lut = LutConfig::pam4());

// Quasi-static optics: each sample is the steady-state transmission at the
// instantaneous segment voltages.
std::vector<double> optical_trace(const Waveform& wave, const RingConfig& cfg, const ElectroOpticResponse& resp,
                                  double lambda_nm, unsigned threads = 1);

// Two-UI folded eye. counts is row-major, row 0 = lowest power bin.
struct EyeRaster {
    int samples_per_ui = 32;
    double ui_ps = 31.25;
    int time_bins = 64;
    int power_bins = 100;
    std::vector<std::uint64_t> counts;

    std::uint64_t at(int power_bin, int time_bin) const {
        return counts[static_cast<std::size_t>(power_bin) * time_bins + time_bin];
    }
    std::uint64_t total() const;
};

// Sample n lands in time bin n mod 2*spu and power bin floor(p * bins),
// clamped to [0, bins-1]. Throws ArgumentError below 4 UI.
EyeRaster fold_eye(std::span<const double> trace, int samples_per_ui, double ui_ps = 31.25,
                   int power_bins = 100);

struct EyeMetrics {
    std::array<double, 4> mean{};
    std::array<double, 4> stddev{};  // population
    std::array<std::size_t, 4> samples{};
    std::array<double, 3> gap{};     // mean_k - mean_{k-1}
    std::array<double, 3> height{};  // gap_k - 3 (stddev_k + stddev_{k-1})
    double dynamic_rlm = 0.0;
};

// Levels are labelled by the transmitted symbol. Only samples whose centre
// lies within window_fraction of a UI around mid-UI are used. Throws
// InsufficientDataError when any level has fewer than 100 such samples.
EyeMetrics eye_metrics(std::span<const double> trace, std::span<const int> symbols, int samples_per_ui,
                       double window_fraction = 0.2);

inline constexpr std::size_t kMinSamplesPerLevel = 100;

// One line per power bin, highest power first.
void write_raster_csv(std::ostream& out, const EyeRaster& raster);
// Plain PGM (P2), highest power at the top, grey scaled to the busiest bin.
void write_raster_pgm(std::ostream& out, const EyeRaster& raster);

}  // namespace mrm
