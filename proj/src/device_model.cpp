#include "mrm/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mrm/error.hpp"
#include "mrm/format.hpp"

namespace mrm {

namespace {

constexpr double kNmPerCm = 1e7;

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

ElectroOpticResponse::ElectroOpticResponse(std::vector<ResponseRow> rows, double lambda_ref_nm)
    : rows_(std::move(rows)), lambda_ref_nm_(lambda_ref_nm) {
    if (!(lambda_ref_nm_ > 0.0) || !std::isfinite(lambda_ref_nm_))
        throw ConfigError("response: lambda_ref must be a positive wavelength in nm");
    if (rows_.size() < 2) throw ConfigError("response: need at least two rows");
    if (rows_.front().v_reverse != 0.0 || rows_.front().delta_n_eff != 0.0)
        throw ConfigError("response: first row must be v_reverse = 0 with delta_n_eff = 0");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!std::isfinite(r.v_reverse) || !std::isfinite(r.delta_n_eff) || !std::isfinite(r.alpha_db_cm))
            throw ConfigError("response: non-finite value in row " + std::to_string(i));
        if (r.alpha_db_cm < 0.0) throw ConfigError("response: negative loss in row " + std::to_string(i));
        if (i == 0) continue;
        const auto& p = rows_[i - 1];
        if (!(r.v_reverse > p.v_reverse))
            throw ConfigError("response: v_reverse must be strictly ascending (row " + std::to_string(i) + ")");
        if (r.delta_n_eff < p.delta_n_eff)
            throw ConfigError("response: delta_n_eff must be non-decreasing (row " + std::to_string(i) + ")");
        if (r.alpha_db_cm > p.alpha_db_cm)
            throw ConfigError("response: alpha must be non-increasing (row " + std::to_string(i) + ")");
    }
}

ResponsePoint ElectroOpticResponse::interpolate(double v) const {
    if (!(v >= v_min() && v <= v_max())) {
        throw RangeError("voltage " + format_double(v) + " V outside response table range [" +
                         format_double(v_min()) + ", " + format_double(v_max()) + "] V");
    }
    // First node with v_reverse > v; the bracketing interval is [hi-1, hi].
    auto it = std::upper_bound(rows_.begin(), rows_.end(), v,
                               [](double x, const ResponseRow& r) { return x < r.v_reverse; });
    if (it == rows_.end()) return {rows_.back().delta_n_eff, rows_.back().alpha_db_cm};
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (v == lo.v_reverse) return {lo.delta_n_eff, lo.alpha_db_cm};
    const double t = (v - lo.v_reverse) / (hi.v_reverse - lo.v_reverse);
    return {lo.delta_n_eff + t * (hi.delta_n_eff - lo.delta_n_eff),
            lo.alpha_db_cm + t * (hi.alpha_db_cm - lo.alpha_db_cm)};
}

ElectroOpticResponse make_depletion_response(const DepletionFit& fit) {
    if (!(fit.v_step > 0.0) || !(fit.v_max > 0.0) || !(fit.v_bi > 0.0))
        throw ArgumentError("depletion fit: v_step, v_max and v_bi must be positive");
    const auto width = [&](double v) { return std::sqrt(v + fit.v_bi) - std::sqrt(fit.v_bi); };
    const double full = width(fit.v_max);
    const auto n = static_cast<std::size_t>(std::llround(fit.v_max / fit.v_step));
    std::vector<ResponseRow> rows;
    rows.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double v = i == n ? fit.v_max : static_cast<double>(i) * fit.v_step;
        const double w = width(v);
        rows.push_back({v, fit.index_coeff * w, fit.alpha_0v_db_cm - fit.alpha_drop_db_cm * w / full});
    }
    return ElectroOpticResponse(std::move(rows), fit.lambda_ref_nm);
}

const ElectroOpticResponse& default_response() {
    static const ElectroOpticResponse resp = make_depletion_response();
    return resp;
}

ElectroOpticResponse read_response_csv(std::istream& in, double lambda_ref_nm) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("response csv: empty input");
    if (trim(line) != "v_reverse,delta_n_eff,alpha_db_per_cm")
        throw ConfigError("response csv: expected header 'v_reverse,delta_n_eff,alpha_db_per_cm'");
    std::vector<ResponseRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) {
            try {
                cells.push_back(parse_double(trim(cell)));
            } catch (const ArgumentError&) {
                throw ConfigError("response csv: bad number on line " + std::to_string(lineno));
            }
        }
        if (cells.size() != 3) throw ConfigError("response csv: expected 3 columns on line " + std::to_string(lineno));
        rows.push_back({cells[0], cells[1], cells[2]});
    }
    return ElectroOpticResponse(std::move(rows), lambda_ref_nm);
}

ElectroOpticResponse load_response_csv(const std::string& path, double lambda_ref_nm) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open response table '" + path + "'");
    return read_response_csv(in, lambda_ref_nm);
}

void write_response_csv(std::ostream& out, const ElectroOpticResponse& resp) {
    out << "v_reverse,delta_n_eff,alpha_db_per_cm\n";
    for (const auto& r : resp.rows())
        out << format_double(r.v_reverse) << ',' << format_double(r.delta_n_eff) << ','
            << format_double(r.alpha_db_cm) << '\n';
}

double RingConfig::circumference_nm() const { return 2.0 * std::numbers::pi * radius_um * 1e3; }

double RingConfig::doped_fraction() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.fraction;
    return sum;
}

void RingConfig::validate() const {
    if (!(radius_um > 0.0) || !std::isfinite(radius_um)) throw ConfigError("ring: radius must be positive");
    if (segments.empty()) throw ConfigError("ring: at least one segment is required");
    for (const auto& s : segments)
        if (!(s.fraction > 0.0)) throw ConfigError("ring: segment '" + s.label + "' has non-positive fraction");
    if (doped_fraction() > 1.0 + 1e-12) throw ConfigError("ring: segment fractions sum above 1");
    if (!(passive_n_eff > 0.0)) throw ConfigError("ring: passive_n_eff must be positive");
    if (!(group_index > 0.0)) throw ConfigError("ring: group_index must be positive");
    if (!(passive_alpha_db_cm >= 0.0)) throw ConfigError("ring: passive_alpha must be non-negative");
    if (!(self_coupling > 0.0 && self_coupling < 1.0)) throw ConfigError("ring: self_coupling must lie in (0, 1)");
    if (p_in != 1.0) throw ConfigError("ring: p_in is fixed at 1.0");
}

RingConfig three_segment_ring(const ElectroOpticResponse& resp, double coupling_ratio) {
    RingConfig cfg;
    cfg.segments = {{"S1", 0.20}, {"S2", 0.20}, {"S3", 0.20}};
    return with_coupling_ratio(std::move(cfg), resp, coupling_ratio);
}

RingConfig two_segment_ring(const ElectroOpticResponse& resp, double coupling_ratio) {
    constexpr double total = 0.60;
    constexpr double ratio = 1.9;
    RingConfig cfg;
    cfg.segments = {{"MSB", total * ratio / (ratio + 1.0)}, {"LSB", total / (ratio + 1.0)}};
    return with_coupling_ratio(std::move(cfg), resp, coupling_ratio);
}

double passive_index(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm) {
    const double lref = resp.lambda_ref_nm();
    return cfg.passive_n_eff - (cfg.group_index - cfg.passive_n_eff) * (lambda_nm - lref) / lref;
}

RoundTrip round_trip(const RingConfig& cfg, const ElectroOpticResponse& resp, double lambda_nm,
                     const DriveState& drive) {
    if (drive.volts.size() != cfg.segments.size())
        throw ArgumentError("drive has " + std::to_string(drive.volts.size()) + " voltages for " +
                            std::to_string(cfg.segments.size()) + " segments");
    if (!(lambda_nm > 0.0) || !std::isfinite(lambda_nm)) throw ArgumentError("wavelength must be positive");

    const double circumference = cfg.circumference_nm();
    const double n0 = passive_index(cfg, resp, lambda_nm);
    const double k0 = 2.0 * std::numbers::pi / lambda_nm;

    // Optical path (nm) and loss (dB) accumulated over driven then passive sections.
    double path = 0.0;
    double loss_db = 0.0;
    double doped = 0.0;
    const double alpha_0v = resp.rows().front().alpha_db_cm;
    for (std::size_t i = 0; i < cfg.segments.size(); ++i) {
        const double len = cfg.segments[i].fraction * circumference;
        const auto pt = resp.interpolate(drive.volts[i]);
        path += (n0 + pt.delta_n_eff) * len;
        loss_db += (cfg.freeze_loss ? alpha_0v : pt.alpha_db_cm) * len / kNmPerCm;
        doped += cfg.segments[i].fraction;
    }
    const double passive_len = std::max(0.0, 1.0 - doped) * circumference;
    path += n0 * passive_len;
    loss_db += cfg.passive_alpha_db_cm * passive_len / kNmPerCm;

    return {k0 * path, std::pow(10.0, -loss_db / 20.0)};
}

double zero_bias_amplitude(const RingConfig& cfg, const ElectroOpticResponse& resp) {
    // Loss does not depend on wavelength in this model, so any lambda works.
    return round_trip(cfg, resp, resp.lambda_ref_nm(), DriveState::zeros(cfg.segment_count())).amplitude;
}

RingConfig with_coupling_ratio(RingConfig cfg, const ElectroOpticResponse& resp, double ratio) {
    if (!(ratio > 0.0)) throw ArgumentError("coupling ratio must be positive");
    cfg.self_coupling = ratio * zero_bias_amplitude(cfg, resp);
    cfg.validate();
    return cfg;
}

std::optional<std::string> coupling_warning(const RingConfig& cfg, const ElectroOpticResponse& resp) {
    const double a0 = zero_bias_amplitude(cfg, resp);
    if (cfg.self_coupling >= a0) {
        return "ring is not over-coupled at 0 V: self_coupling " + format_double(cfg.self_coupling) +
               " >= round-trip amplitude " + format_double(a0);
    }
    return std::nullopt;
}

}  // namespace mrm
