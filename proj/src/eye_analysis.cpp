#include "mrm/eye_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "mrm/error.hpp"
#include "mrm/parallel.hpp"
#include "mrm/ring_sim.hpp"

namespace mrm {

std::vector<Bits> segment_bits_for(std::span<const int> symbols, EncodingKind kind, const LutConfig& lut) {
    const std::size_t n_seg = segments_for(kind);
    std::vector<Bits> bits(n_seg, Bits(symbols.size()));
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const int code = symbols[i];
        if (code < 0 || code > 3) throw ArgumentError("PAM-4 symbol out of range: " + std::to_string(code));
        if (kind == EncodingKind::three_segment_thermometer) {
            const auto s = encode_symbol(code, lut);
            for (std::size_t k = 0; k < 3; ++k) bits[k][i] = s[k];
        } else {
            bits[0][i] = static_cast<std::uint8_t>((code >> 1) & 1);
            bits[1][i] = static_cast<std::uint8_t>(code & 1);
        }
    }
    return bits;
}

std::vector<double> optical_trace(const Waveform& wave, const RingConfig& cfg, const ElectroOpticResponse& resp,
                                  double lambda_nm, unsigned threads) {
    if (wave.segments.size() != cfg.segment_count())
        throw ArgumentError("waveform has " + std::to_string(wave.segments.size()) + " segments, ring has " +
                            std::to_string(cfg.segment_count()));
    const std::size_t n = wave.size();
    for (const auto& s : wave.segments)
        if (s.size() != n) throw ArgumentError("waveform segments differ in length");
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        DriveState d = DriveState::zeros(wave.segments.size());
        for (std::size_t s = 0; s < d.volts.size(); ++s) d.volts[s] = wave.segments[s][i];
        out[i] = transmission(cfg, resp, lambda_nm, d);
    });
    return out;
}

std::uint64_t EyeRaster::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

EyeRaster fold_eye(std::span<const double> trace, int samples_per_ui, double ui_ps, int power_bins) {
    if (samples_per_ui < 1) throw ArgumentError("samples per UI must be positive");
    if (power_bins < 1) throw ArgumentError("power bins must be positive");
    if (trace.size() < 4 * static_cast<std::size_t>(samples_per_ui))
        throw ArgumentError("eye folding needs at least 4 UI of samples");
    EyeRaster r;
    r.samples_per_ui = samples_per_ui;
    r.ui_ps = ui_ps;
    r.time_bins = 2 * samples_per_ui;
    r.power_bins = power_bins;
    r.counts.assign(static_cast<std::size_t>(r.time_bins) * power_bins, 0);
    for (std::size_t n = 0; n < trace.size(); ++n) {
        const int t = static_cast<int>(n % static_cast<std::size_t>(r.time_bins));
        const double scaled = std::floor(trace[n] * power_bins);
        const int p = static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(power_bins - 1)));
        ++r.counts[static_cast<std::size_t>(p) * r.time_bins + t];
    }
    return r;
}

EyeMetrics eye_metrics(std::span<const double> trace, std::span<const int> symbols, int samples_per_ui,
                       double window_fraction) {
    if (samples_per_ui < 1) throw ArgumentError("samples per UI must be positive");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw ArgumentError("sampling window fraction must be in (0, 1]");
    const std::size_t spu = static_cast<std::size_t>(samples_per_ui);
    if (trace.size() != symbols.size() * spu)
        throw ArgumentError("trace length does not match symbols x samples per UI");

    std::vector<std::size_t> offsets;
    for (std::size_t j = 0; j < spu; ++j) {
        const double centre = (static_cast<double>(j) + 0.5) / samples_per_ui;
        if (std::abs(centre - 0.5) <= 0.5 * window_fraction + 1e-12) offsets.push_back(j);
    }

    EyeMetrics m;
    std::array<double, 4> sum{}, sum_sq{};
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const int k = symbols[i];
        if (k < 0 || k > 3) throw ArgumentError("PAM-4 symbol out of range: " + std::to_string(k));
        for (auto j : offsets) {
            const double p = trace[i * spu + j];
            sum[k] += p;
            ++m.samples[k];
        }
    }
    for (int k = 0; k < 4; ++k) {
        if (m.samples[k] < kMinSamplesPerLevel)
            throw InsufficientDataError("level " + std::to_string(k) + " has " + std::to_string(m.samples[k]) +
                                        " samples in the sampling window, need " +
                                        std::to_string(kMinSamplesPerLevel));
        m.mean[k] = sum[k] / static_cast<double>(m.samples[k]);
    }
    // Second pass about the mean keeps the variance free of cancellation.
    for (std::size_t i = 0; i < symbols.size(); ++i)
        for (auto j : offsets) {
            const double d = trace[i * spu + j] - m.mean[symbols[i]];
            sum_sq[symbols[i]] += d * d;
        }
    for (int k = 0; k < 4; ++k) m.stddev[k] = std::sqrt(sum_sq[k] / static_cast<double>(m.samples[k]));
    for (int k = 1; k < 4; ++k) {
        m.gap[k - 1] = m.mean[k] - m.mean[k - 1];
        m.height[k - 1] = m.gap[k - 1] - 3.0 * (m.stddev[k] + m.stddev[k - 1]);
    }
    m.dynamic_rlm = rlm(PamLevels{m.mean}).rlm;
    return m;
}

void write_raster_csv(std::ostream& out, const EyeRaster& raster) {
    for (int p = raster.power_bins - 1; p >= 0; --p) {
        for (int t = 0; t < raster.time_bins; ++t) {
            if (t) out << ',';
            out << raster.at(p, t);
        }
        out << '\n';
    }
}

void write_raster_pgm(std::ostream& out, const EyeRaster& raster) {
    const std::uint64_t peak = raster.counts.empty() ? 0 : *std::max_element(raster.counts.begin(), raster.counts.end());
    out << "P2\n" << raster.time_bins << ' ' << raster.power_bins << "\n255\n";
    for (int p = raster.power_bins - 1; p >= 0; --p) {
        for (int t = 0; t < raster.time_bins; ++t) {
            if (t) out << ' ';
            out << (peak == 0 ? 0 : (raster.at(p, t) * 255 + peak / 2) / peak);
        }
        out << '\n';
    }
}

}  // namespace mrm
