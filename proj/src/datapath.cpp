#include "mrm/datapath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mrm/error.hpp"

namespace mrm {

PrbsGenerator::PrbsGenerator(const PrbsConfig& cfg) : order_(cfg.order) {
    switch (cfg.order) {
        case 7: tap_ = 6; break;
        case 15: tap_ = 14; break;
        case 31: tap_ = 28; break;
        default: throw ArgumentError("PRBS order must be 7, 15 or 31, got " + std::to_string(cfg.order));
    }
    mask_ = static_cast<std::uint32_t>((std::uint64_t{1} << order_) - 1);
    state_ = cfg.seed & mask_;
    if (state_ == 0) throw ArgumentError("PRBS seed must be nonzero in its low " + std::to_string(order_) + " bits");
}

std::uint8_t PrbsGenerator::next() {
    const std::uint32_t bit = ((state_ >> (order_ - 1)) ^ (state_ >> (tap_ - 1))) & 1u;
    state_ = ((state_ << 1) | bit) & mask_;
    return static_cast<std::uint8_t>(bit);
}

Bits prbs_sequence(const PrbsConfig& cfg, std::size_t n) {
    if (n == 0) throw ArgumentError("PRBS length must be at least 1");
    PrbsGenerator gen(cfg);
    Bits out(n);
    for (auto& b : out) b = gen.next();
    return out;
}

std::vector<std::uint32_t> to_parallel_words(std::span<const std::uint8_t> bits, int width) {
    if (width < 1 || width > 32) throw ArgumentError("word width must be 1..32");
    const std::size_t w = static_cast<std::size_t>(width);
    std::vector<std::uint32_t> words(bits.size() / w, 0u);
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t b = 0; b < w; ++b) words[i] |= static_cast<std::uint32_t>(bits[i * w + b] & 1u) << b;
    return words;
}

Bits from_parallel_words(std::span<const std::uint32_t> words, int width) {
    if (width < 1 || width > 32) throw ArgumentError("word width must be 1..32");
    const std::size_t w = static_cast<std::size_t>(width);
    Bits bits(words.size() * w);
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t b = 0; b < w; ++b) bits[i * w + b] = static_cast<std::uint8_t>((words[i] >> b) & 1u);
    return bits;
}

std::pair<Bits, Bits> split_msb_lsb(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) throw ArgumentError("MSB/LSB split needs an even number of bits");
    Bits msb, lsb;
    msb.reserve(bits.size() / 2);
    lsb.reserve(bits.size() / 2);
    for (std::size_t i = 0; i < bits.size(); i += 2) {
        msb.push_back(bits[i]);
        lsb.push_back(bits[i + 1]);
    }
    return {std::move(msb), std::move(lsb)};
}

LutConfig LutConfig::pam4() {
    LutConfig lut;
    lut.mode = LutMode::pam4;
    for (int s = 0; s < 3; ++s)
        for (int code = 0; code < 4; ++code) lut.tables[s][code] = code > s ? 1 : 0;
    return lut;
}

LutConfig LutConfig::nrz() {
    LutConfig lut;
    lut.mode = LutMode::nrz;
    for (auto& t : lut.tables) t = {0, 0, 1, 1};
    return lut;
}

void LutConfig::validate() const {
    for (const auto& t : tables)
        for (auto v : t)
            if (v > 1) throw ConfigError("LUT entries must be 0 or 1");
    if (mode == LutMode::nrz) {
        if (tables[1] != tables[0] || tables[2] != tables[0])
            throw ConfigError("NRZ mode requires identical LUT slices");
        return;
    }
    for (int code = 0; code < 4; ++code) {
        int ones = 0;
        for (int s = 0; s < 3; ++s) {
            ones += tables[s][code];
            if (s > 0 && tables[s][code] > tables[s - 1][code])
                throw ConfigError("PAM-4 LUT violates the thermometer prefix property at code " + std::to_string(code));
        }
        if (ones != code) throw ConfigError("PAM-4 LUT code " + std::to_string(code) + " must light exactly " +
                                            std::to_string(code) + " slices");
    }
}

SegmentBits encode_symbol(int code, const LutConfig& lut) {
    if (code < 0 || code > 3) throw ArgumentError("PAM-4 code must be 0..3");
    return {lut.tables[0][code], lut.tables[1][code], lut.tables[2][code]};
}

SegmentBits encode_pam4(std::uint8_t msb, std::uint8_t lsb, const LutConfig& lut) {
    return encode_symbol(2 * (msb & 1) + (lsb & 1), lut);
}

std::vector<std::uint32_t> serialize(const std::vector<std::vector<std::uint32_t>>& lanes, std::size_t n_lanes) {
    if (n_lanes == 0 || lanes.size() != n_lanes)
        throw ArgumentError("serializer expects " + std::to_string(n_lanes) + " lanes, got " +
                            std::to_string(lanes.size()));
    const std::size_t depth = lanes.front().size();
    for (const auto& lane : lanes)
        if (lane.size() != depth) throw ArgumentError("serializer lanes differ in length");
    std::vector<std::uint32_t> out(depth * n_lanes);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lanes[i % n_lanes][i / n_lanes];
    return out;
}

std::vector<std::vector<std::uint32_t>> deserialize(std::span<const std::uint32_t> serial, std::size_t n_lanes) {
    if (n_lanes == 0 || serial.size() % n_lanes != 0)
        throw ArgumentError("deserializer input length " + std::to_string(serial.size()) +
                            " is not a multiple of " + std::to_string(n_lanes));
    std::vector<std::vector<std::uint32_t>> lanes(n_lanes, std::vector<std::uint32_t>(serial.size() / n_lanes));
    for (std::size_t i = 0; i < serial.size(); ++i) lanes[i % n_lanes][i / n_lanes] = serial[i];
    return lanes;
}

std::vector<int> pam4_symbols(const PrbsConfig& prbs, std::size_t n_symbols) {
    if (n_symbols == 0) throw ArgumentError("symbol count must be at least 1");
    constexpr std::size_t kSymbolsPerWord = 4;
    const std::size_t words = (n_symbols + kSymbolsPerWord - 1) / kSymbolsPerWord;
    const auto bits = prbs_sequence(prbs, words * 8);
    const auto parallel = to_parallel_words(bits, 8);

    // Lane l carries symbol l of every word.
    std::vector<std::vector<std::uint32_t>> lanes(kSymbolsPerWord, std::vector<std::uint32_t>(words));
    for (std::size_t j = 0; j < words; ++j)
        for (std::size_t l = 0; l < kSymbolsPerWord; ++l) {
            const std::uint32_t msb = (parallel[j] >> (2 * l)) & 1u;
            const std::uint32_t lsb = (parallel[j] >> (2 * l + 1)) & 1u;
            lanes[l][j] = 2 * msb + lsb;
        }
    const auto serial = serialize(lanes, kSymbolsPerWord);
    return {serial.begin(), serial.begin() + static_cast<std::ptrdiff_t>(n_symbols)};
}

double swing_for_code(int code) {
    if (code < 0 || code > 15) throw ArgumentError("swing code must be 0..15, got " + std::to_string(code));
    return std::min(kSwingBaseVpp + kSwingStepV * code, kSwingMaxVpp);
}

double DriverConfig::swing_vpp() const { return 0.5 * (swing_for_code(sw_p) + swing_for_code(sw_n)); }

namespace {

void filter_single_pole(std::vector<double>& x, double dt_ps, double bandwidth_ghz) {
    const double tau_ps = 1e3 / (2.0 * std::numbers::pi * bandwidth_ghz);
    const double decay = std::exp(-dt_ps / tau_ps);
    double y = x.empty() ? 0.0 : x.front();
    for (auto& v : x) {
        y = v + (y - v) * decay;
        v = y;
    }
}

void check_shape(const std::vector<Bits>& segment_bits, std::size_t n_params, int samples_per_ui, double ui_ps) {
    if (segment_bits.empty()) throw ArgumentError("waveform needs at least one segment");
    if (segment_bits.size() != n_params)
        throw ArgumentError("one swing/driver per segment is required");
    for (const auto& b : segment_bits)
        if (b.size() != segment_bits.front().size()) throw ArgumentError("segment bit streams differ in length");
    if (samples_per_ui < 8) throw ArgumentError("samples per UI must be at least 8");
    if (!(ui_ps > 0.0)) throw ArgumentError("UI must be positive");
}

std::vector<double> ideal_nrz(const Bits& bits, double swing, int samples_per_ui) {
    std::vector<double> x;
    x.reserve(bits.size() * static_cast<std::size_t>(samples_per_ui));
    for (auto b : bits) x.insert(x.end(), static_cast<std::size_t>(samples_per_ui), b ? swing : 0.0);
    return x;
}

}  // namespace

Waveform drive_waveform(const std::vector<Bits>& segment_bits, std::span<const double> swings,
                        const WaveformParams& params) {
    check_shape(segment_bits, swings.size(), params.samples_per_ui, params.ui_ps);
    if (!(params.bandwidth_ghz > 0.0)) throw ArgumentError("driver bandwidth must be positive");
    Waveform w{params.samples_per_ui, params.ui_ps, {}};
    const double dt = params.ui_ps / params.samples_per_ui;
    for (std::size_t s = 0; s < segment_bits.size(); ++s) {
        if (!(swings[s] >= 0.0)) throw ArgumentError("swing must be non-negative");
        auto x = ideal_nrz(segment_bits[s], swings[s], params.samples_per_ui);
        filter_single_pole(x, dt, params.bandwidth_ghz);
        w.segments.push_back(std::move(x));
    }
    return w;
}

Waveform drive_waveform(const std::vector<Bits>& segment_bits, std::span<const DriverConfig> drivers,
                        int samples_per_ui, double ui_ps) {
    check_shape(segment_bits, drivers.size(), samples_per_ui, ui_ps);
    Waveform w{samples_per_ui, ui_ps, {}};
    const double dt = ui_ps / samples_per_ui;
    for (std::size_t s = 0; s < segment_bits.size(); ++s) {
        if (!(drivers[s].bandwidth_ghz > 0.0)) throw ArgumentError("driver bandwidth must be positive");
        auto x = ideal_nrz(segment_bits[s], drivers[s].swing_vpp(), samples_per_ui);
        filter_single_pole(x, dt, drivers[s].bandwidth_ghz);
        w.segments.push_back(std::move(x));
    }
    return w;
}

}  // namespace mrm
