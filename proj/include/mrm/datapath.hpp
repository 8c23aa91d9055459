#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mrm {

using Bits = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// PRBS source
// ---------------------------------------------------------------------------

// Fibonacci LFSR, maximal-length polynomials
//   PRBS7  x^7  + x^6  + 1
//   PRBS15 x^15 + x^14 + 1
//   PRBS31 x^31 + x^28 + 1
struct PrbsConfig {
    int order = 7;                    // 7, 15 or 31
    std::uint32_t seed = 0xFFFFFFFFu;  // masked to `order` bits; must stay nonzero

    std::uint64_t period() const { return (std::uint64_t{1} << order) - 1; }
};

class PrbsGenerator {
public:
    explicit PrbsGenerator(const PrbsConfig& cfg);

    std::uint8_t next();
    std::uint32_t state() const { return state_; }

private:
    int order_;
    int tap_;
    std::uint32_t mask_;
    std::uint32_t state_;
};

Bits prbs_sequence(const PrbsConfig& cfg, std::size_t n);

// Groups a serial stream into `width`-bit parallel words, first bit in word
// bit 0. Trailing bits that do not fill a word are dropped.
std::vector<std::uint32_t> to_parallel_words(std::span<const std::uint8_t> bits, int width = 8);
Bits from_parallel_words(std::span<const std::uint32_t> words, int width = 8);

// Even-indexed bits feed the MSB branch, odd-indexed bits the LSB branch.
std::pair<Bits, Bits> split_msb_lsb(std::span<const std::uint8_t> bits);

// ---------------------------------------------------------------------------
// LUT encoder (three slices, 4-entry table each, indexed by code = 2 msb + lsb)
// ---------------------------------------------------------------------------

enum class LutMode { nrz, pam4 };

struct LutConfig {
    LutMode mode = LutMode::pam4;
    std::array<std::array<std::uint8_t, 4>, 3> tables{};

    // Slice s outputs 1 for codes > s.
    static LutConfig pam4();
    // Every slice follows the MSB input.
    static LutConfig nrz();

    // NRZ: identical slices. PAM-4: code k lights exactly slices 0..k-1.
    // Throws ConfigError.
    void validate() const;
};

using SegmentBits = std::array<std::uint8_t, 3>;

SegmentBits encode_symbol(int code, const LutConfig& lut);
SegmentBits encode_pam4(std::uint8_t msb, std::uint8_t lsb, const LutConfig& lut);

// ---------------------------------------------------------------------------
// Quarter-rate serializer
// ---------------------------------------------------------------------------

// out[i] = lanes[i % n][i / n]; every lane must have the same length.
std::vector<std::uint32_t> serialize(const std::vector<std::vector<std::uint32_t>>& lanes, std::size_t n_lanes = 4);
// Inverse of serialize. Length must be a multiple of n_lanes.
std::vector<std::vector<std::uint32_t>> deserialize(std::span<const std::uint32_t> serial, std::size_t n_lanes = 4);

// PRBS bits -> 8-wide words -> 4 lanes of 2-bit symbols -> 4:1 serializer.
// Symbol j takes msb = bit 2j, lsb = bit 2j+1 of the serial PRBS stream.
std::vector<int> pam4_symbols(const PrbsConfig& prbs, std::size_t n_symbols);

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

inline constexpr double kSwingBaseVpp = 1.32;
inline constexpr double kSwingStepV = 0.206;
inline constexpr double kSwingMaxVpp = 3.2;

// min(1.32 + 0.206 * code, 3.2); codes outside 0..15 throw ArgumentError.
double swing_for_code(int code);

struct DriverConfig {
    int sw_p = 0;  // 0..15
    int sw_n = 0;  // 0..15
    double bandwidth_ghz = 25.0;

    // Mean of the pull-up and pull-down swings, each clamped at 3.2 V.
    double swing_vpp() const;
};

struct WaveformParams {
    int samples_per_ui = 32;
    double ui_ps = 31.25;  // 32 GBd
    double bandwidth_ghz = 25.0;
};

struct Waveform {
    int samples_per_ui = 32;
    double ui_ps = 31.25;
    std::vector<std::vector<double>> segments;  // reverse volts, equal lengths

    std::size_t size() const { return segments.empty() ? 0 : segments.front().size(); }
    double t_ps(std::size_t n) const { return static_cast<double>(n) * ui_ps / samples_per_ui; }
};

// Ideal NRZ (bit 1 -> `swing` reverse volts, bit 0 -> 0 V) through a
// single-pole low-pass with corner params.bandwidth_ghz. Sample n holds the
// value at the end of its sampling interval, so the filter is the exact
// response to a zero-order-held input; the state starts settled at the
// first level.
Waveform drive_waveform(const std::vector<Bits>& segment_bits, std::span<const double> swings,
                        const WaveformParams& params);

// Same, with per-segment swing and bandwidth from driver configs.
Waveform drive_waveform(const std::vector<Bits>& segment_bits, std::span<const DriverConfig> drivers,
                        int samples_per_ui, double ui_ps);

}  // namespace mrm
