#include "mrm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mrm/datapath.hpp"
#include "mrm/error.hpp"
#include "mrm/eye_analysis.hpp"
#include "mrm/format.hpp"
#include "mrm/io.hpp"
#include "mrm/linearity_search.hpp"
#include "mrm/pam_metrics.hpp"
#include "mrm/ring_sim.hpp"

namespace mrm::cli {

namespace {

struct Common {
    std::string config;
    std::string encoding = "three-seg";
    std::string out;
    std::string format;
    unsigned threads = 0;
};

struct Options {
    Common c;
    std::optional<double> lambda;
    std::optional<double> lambda_start, lambda_stop;
    double lambda_step = 0.0005;
    std::string drive;
    std::string voltages;
    double v1 = 2.0;
    std::string bounds = "1.5:3";
    double threshold = 0.95;
    std::string protocol = "bounded";
    double v_fixed = 2.0;
    std::string csv_out;
    // eye / prbs
    std::uint32_t seed = 0xFFFFFFFFu;
    int order = 7;
    std::size_t count = 0;
    double bandwidth_ghz = 25.0;
    double baud_gbd = 32.0;
    int samples_per_ui = 32;
    double window = 0.2;
    std::string raster;
    std::string raster_format = "pgm";
    std::string waveform;
    std::string dir = "data";
};

EncodingKind encoding_of(const Options& o) { return parse_encoding(o.c.encoding); }

Device device_for(const Options& o, std::ostream& err) {
    Device d = o.c.config.empty()
                   ? Device{encoding_of(o) == EncodingKind::three_segment_thermometer ? three_segment_ring()
                                                                                    : two_segment_ring(),
                            default_response()}
                   : load_device(o.c.config);
    if (auto w = coupling_warning(d.ring, d.response)) err << "warning: " << *w << '\n';
    return d;
}

void check_ring_matches(const Device& d, EncodingKind kind) {
    if (d.ring.segment_count() != segments_for(kind))
        throw ArgumentError("--encoding " + to_string(kind) + " needs a ring with " +
                            std::to_string(segments_for(kind)) + " segments; config has " +
                            std::to_string(d.ring.segment_count()));
}

VoltageBounds parse_bounds(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ArgumentError("--bounds expects LO:HI, got '" + s + "'");
    return {parse_double(std::string_view(s).substr(0, colon)), parse_double(std::string_view(s).substr(colon + 1))};
}

std::string format_or(const Options& o, const std::string& fallback, std::initializer_list<const char*> allowed) {
    const std::string f = o.c.format.empty() ? fallback : o.c.format;
    for (const char* a : allowed)
        if (f == a) return f;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ArgumentError("--format " + f + " not supported here (choose " + list + ")");
}

double need(const std::optional<double>& x, const char* flag) {
    if (!x) throw ArgumentError(std::string(flag) + " is required");
    return *x;
}

// Writes to --out when given, else to the caller's stream. Content is built
// in memory first so a failing command leaves no partial file.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}
    std::ostream& stream() { return buf_; }
    void commit() {
        if (path_.empty()) {
            fallback_ << buf_.str();
            return;
        }
        std::ofstream f(path_, std::ios::binary);
        if (!f) throw ArgumentError("cannot write '" + path_ + "'");
        f << buf_.str();
    }

private:
    std::string path_;
    std::ostream& fallback_;
    std::ostringstream buf_;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ArgumentError("cannot write '" + path + "'");
    f << content;
}

DriveState parse_drive(const Options& o, const Device& d) {
    if (o.drive.empty()) return DriveState::zeros(d.ring.segment_count());
    DriveState s{parse_double_list(o.drive)};
    if (s.volts.size() != d.ring.segment_count())
        throw ArgumentError("--drive needs " + std::to_string(d.ring.segment_count()) + " voltages");
    return s;
}

EncodingScheme parse_scheme(const Options& o, EncodingKind kind) {
    const std::string text = o.voltages.empty() ? (kind == EncodingKind::three_segment_thermometer ? "2,2,2" : "2,2")
                                                : o.voltages;
    EncodingScheme e{kind, parse_double_list(text)};
    if (e.voltages.size() != segments_for(kind))
        throw ArgumentError("--voltages needs " + std::to_string(segments_for(kind)) + " values for " +
                            to_string(kind));
    return e;
}

// ----------------------------------------------------------------------------

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
    const auto fmt = format_or(o, "csv", {"csv", "json"});
    const auto start = need(o.lambda_start, "--lambda-start");
    const auto stop = need(o.lambda_stop, "--lambda-stop");
    wavelength_grid(start, stop, o.lambda_step);  // validates before the device is touched
    const Device d = device_for(o, err);
    const auto drive = parse_drive(o, d);
    const auto pts = spectrum(d.ring, d.response, start, stop, o.lambda_step, drive, o.c.threads);
    Sink sink(o.c.out, out);
    if (fmt == "csv") {
        write_spectrum_csv(sink.stream(), pts);
    } else {
        json arr = json::array();
        for (const auto& p : pts) arr.push_back({{"lambda_nm", num(p.lambda_nm)}, {"transmission", num(p.transmission)}});
        write_json(sink.stream(), arr);
    }
    sink.commit();
    return kExitOk;
}

int cmd_resonance(const Options& o, std::ostream& out, std::ostream& err) {
    format_or(o, "json", {"json"});
    const auto lo = need(o.lambda_start, "--lambda-start");
    const auto hi = need(o.lambda_stop, "--lambda-stop");
    if (!(hi > lo) || !(lo > 0.0)) throw ArgumentError("resonance window needs 0 < start < stop");
    const Device d = device_for(o, err);
    auto info = find_resonance(d.ring, d.response, parse_drive(o, d), {lo, hi});
    info.fsr_nm = measure_fsr(d.ring, d.response, parse_drive(o, d), info);
    Sink sink(o.c.out, out);
    write_json(sink.stream(), to_json(info));
    sink.commit();
    return kExitOk;
}

int cmd_levels(const Options& o, std::ostream& out, std::ostream& err) {
    const auto fmt = format_or(o, "json", {"csv", "json"});
    const auto kind = encoding_of(o);
    std::vector<double> grid;
    if (o.lambda) {
        if (o.lambda_start || o.lambda_stop) throw ArgumentError("use either --lambda or --lambda-start/--lambda-stop");
        grid = {*o.lambda};
    } else {
        grid = wavelength_grid(need(o.lambda_start, "--lambda or --lambda-start"), need(o.lambda_stop, "--lambda-stop"),
                               o.lambda_step);
    }
    const auto scheme = parse_scheme(o, kind);
    const Device d = device_for(o, err);
    check_ring_matches(d, kind);

    Sink sink(o.c.out, out);
    json records = json::array();
    if (fmt == "csv") write_metrics_csv_header(sink.stream());
    for (double lam : grid) {
        const auto lv = levels_for(d.ring, d.response, lam, scheme);
        std::optional<LinearityMetrics> m;
        try {
            m = linearity_metrics(lv, d.ring.p_in);
        } catch (const DegenerateLevelsError&) {
        } catch (const MathDomainError&) {
        }
        if (fmt == "csv")
            write_metrics_csv_row(sink.stream(), lam, lv, m);
        else
            records.push_back(metrics_record(lam, lv, m));
    }
    if (fmt == "json") write_json(sink.stream(), grid.size() == 1 ? records.front() : records);
    sink.commit();
    return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
    format_or(o, "json", {"json"});
    const auto kind = encoding_of(o);
    const double lam = need(o.lambda, "--lambda");
    const auto bounds = parse_bounds(o.bounds);
    const Device d = device_for(o, err);
    check_ring_matches(d, kind);
    bounds.validate(d.response);

    SolveResult r;
    if (kind == EncodingKind::three_segment_thermometer) {
        if (o.v1 < d.response.v_min() || o.v1 > d.response.v_max())
            throw ArgumentError("--v1 outside the response table range");
        r = solve_three_segment(d.ring, d.response, lam, o.v1, bounds);
    } else {
        r = best_rlm_two_segment(d.ring, d.response, lam, bounds);
    }
    Sink sink(o.c.out, out);
    write_json(sink.stream(), to_json(r, lam));
    sink.commit();
    return kExitOk;
}

int cmd_range(const Options& o, std::ostream& out, std::ostream& err) {
    const auto fmt = format_or(o, "json", {"csv", "json"});
    RangeRequest req;
    req.encoding = encoding_of(o);
    req.protocol = parse_protocol(o.protocol);
    req.bounds = parse_bounds(o.bounds);
    req.lambda_start_nm = need(o.lambda_start, "--lambda-start");
    req.lambda_stop_nm = need(o.lambda_stop, "--lambda-stop");
    req.lambda_step_nm = o.lambda_step;
    req.threshold = o.threshold;
    req.v1 = o.v1;
    req.v_fixed = o.v_fixed;
    req.threads = o.c.threads;
    wavelength_grid(req.lambda_start_nm, req.lambda_stop_nm, req.lambda_step_nm);
    const Device d = device_for(o, err);
    check_ring_matches(d, req.encoding);

    const auto report = linear_range(d.ring, d.response, req);
    if (report.warning) err << "warning: " << *report.warning << '\n';
    Sink sink(o.c.out, out);
    if (fmt == "json")
        write_json(sink.stream(), to_json(report, false));
    else
        write_range_csv(sink.stream(), report);
    sink.commit();
    if (!o.csv_out.empty()) {
        std::ostringstream csv;
        write_range_csv(csv, report);
        write_file(o.csv_out, csv.str());
    }
    return kExitOk;
}

int cmd_eye(const Options& o, std::ostream& out, std::ostream& err) {
    format_or(o, "json", {"json"});
    const auto kind = encoding_of(o);
    const double lam = need(o.lambda, "--lambda");
    if (!(o.bandwidth_ghz > 0.0)) throw ArgumentError("--bandwidth must be positive");
    if (!(o.baud_gbd > 0.0)) throw ArgumentError("--baud must be positive");
    if (o.raster_format != "pgm" && o.raster_format != "csv")
        throw ArgumentError("--raster-format must be pgm or csv");
    const auto scheme = parse_scheme(o, kind);
    const std::size_t n_symbols = o.count == 0 ? 4096 : o.count;
    const Device d = device_for(o, err);
    check_ring_matches(d, kind);

    const auto symbols = pam4_symbols(PrbsConfig{o.order, o.seed}, n_symbols);
    const auto bits = segment_bits_for(symbols, kind);
    WaveformParams wp{o.samples_per_ui, 1e3 / o.baud_gbd, o.bandwidth_ghz};
    const auto wave = drive_waveform(bits, scheme.voltages, wp);
    const auto trace = optical_trace(wave, d.ring, d.response, lam, o.c.threads);
    const auto metrics = eye_metrics(trace, symbols, o.samples_per_ui, o.window);

    json doc = to_json(metrics);
    doc["lambda_nm"] = num(lam);
    doc["encoding"] = to_string(kind);
    doc["voltages"] = json::array();
    for (double v : scheme.voltages) doc["voltages"].push_back(num(v));
    doc["bandwidth_ghz"] = num(o.bandwidth_ghz);
    doc["baud_gbd"] = num(o.baud_gbd);
    doc["symbols"] = n_symbols;
    try {
        doc["static_rlm"] = num(rlm(levels_for(d.ring, d.response, lam, scheme)).rlm);
    } catch (const DegenerateLevelsError&) {
        doc["static_rlm"] = nullptr;
    }
    Sink sink(o.c.out, out);
    write_json(sink.stream(), doc);
    sink.commit();

    if (!o.raster.empty()) {
        const auto raster = fold_eye(trace, o.samples_per_ui, wp.ui_ps);
        std::ostringstream r;
        if (o.raster_format == "pgm")
            write_raster_pgm(r, raster);
        else
            write_raster_csv(r, raster);
        write_file(o.raster, r.str());
    }
    if (!o.waveform.empty()) {
        std::ostringstream w;
        write_waveform_csv(w, wave);
        write_file(o.waveform, w.str());
    }
    return kExitOk;
}

int cmd_prbs(const Options& o, std::ostream& out, std::ostream&) {
    const auto fmt = format_or(o, "bits", {"bits", "hex"});
    PrbsConfig cfg{o.order, o.seed};
    PrbsGenerator{cfg};  // validates order and seed
    if (o.count == 0 && cfg.order > 15) throw ArgumentError("--count is required for PRBS31");
    const std::size_t n = o.count == 0 ? static_cast<std::size_t>(cfg.period()) : o.count;
    const auto bits = prbs_sequence(cfg, n);
    Sink sink(o.c.out, out);
    auto& s = sink.stream();
    if (fmt == "bits") {
        for (auto b : bits) s << static_cast<int>(b) << '\n';
    } else {
        // First bit in the least significant position of each byte.
        Bits padded = bits;
        padded.resize((bits.size() + 7) / 8 * 8, 0);
        const auto bytes = to_parallel_words(padded, 8);
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            s << std::hex << std::setw(2) << std::setfill('0') << bytes[i];
            if ((i + 1) % 32 == 0 || i + 1 == bytes.size()) s << '\n';
        }
    }
    sink.commit();
    return kExitOk;
}

int cmd_defaults(const Options& o, std::ostream& out, std::ostream&) {
    namespace fs = std::filesystem;
    const fs::path dir = o.dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ArgumentError("cannot create '" + dir.string() + "': " + ec.message());
    const auto& resp = default_response();
    std::ostringstream csv;
    write_response_csv(csv, resp);
    write_file((dir / "default_response.csv").string(), csv.str());
    for (const auto& [name, ring] : {std::pair{"three_segment.json", three_segment_ring()},
                                     std::pair{"two_segment.json", two_segment_ring()}}) {
        std::ostringstream js;
        write_json(js, device_json(ring, resp, kDefaultCouplingRatio, std::string("default_response.csv")));
        write_file((dir / name).string(), js.str());
    }
    out << "wrote " << (dir / "default_response.csv").string() << ", three_segment.json, two_segment.json\n";
    return kExitOk;
}

// ----------------------------------------------------------------------------

void add_common(CLI::App* sub, Options& o, bool with_encoding = true) {
    sub->add_option("--config", o.c.config, "Device config JSON (default: built-in ring for --encoding)");
    if (with_encoding)
        sub->add_option("--encoding", o.c.encoding, "three-seg or two-seg")->capture_default_str();
    sub->add_option("--out", o.c.out, "Output path (default: stdout)");
    sub->add_option("--format", o.c.format, "csv or json where both apply");
    sub->add_option("--threads", o.c.threads, "Worker threads, 0 = all cores")->capture_default_str();
}

void add_lambda_range(CLI::App* sub, Options& o) {
    sub->add_option("--lambda-start", o.lambda_start, "Grid start (nm)");
    sub->add_option("--lambda-stop", o.lambda_stop, "Grid stop, inclusive (nm)");
    sub->add_option("--lambda-step", o.lambda_step, "Grid step (nm)")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Segmented micro-ring PAM-4 modulator simulator", "mrmpam"};
    app.require_subcommand(1);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Transmission versus wavelength at a fixed drive");
    add_common(spectrum_cmd, o);
    add_lambda_range(spectrum_cmd, o);
    spectrum_cmd->add_option("--drive", o.drive, "Per-segment reverse volts, comma separated (default 0)");

    auto* resonance_cmd = app.add_subcommand("resonance", "Locate a resonance and report FWHM, Q, extinction, FSR");
    add_common(resonance_cmd, o);
    add_lambda_range(resonance_cmd, o);
    resonance_cmd->add_option("--drive", o.drive, "Per-segment reverse volts, comma separated (default 0)");

    auto* levels_cmd = app.add_subcommand("levels", "PAM-4 levels and metrics for given voltages");
    add_common(levels_cmd, o);
    levels_cmd->add_option("--lambda", o.lambda, "Wavelength (nm)");
    add_lambda_range(levels_cmd, o);
    levels_cmd->add_option("--voltages", o.voltages, "V1,V2,V3 or V_MSB,V_LSB (default all 2 V)");

    auto* solve_cmd = app.add_subcommand("solve", "Voltages for equally spaced levels");
    add_common(solve_cmd, o);
    solve_cmd->add_option("--lambda", o.lambda, "Wavelength (nm)")->required();
    solve_cmd->add_option("--v1", o.v1, "Fixed V1 (three-seg)")->capture_default_str();
    solve_cmd->add_option("--bounds", o.bounds, "Allowed voltages LO:HI")->capture_default_str();

    auto* range_cmd = app.add_subcommand("range", "Linear-output wavelength window and IL tuning range");
    add_common(range_cmd, o);
    add_lambda_range(range_cmd, o);
    range_cmd->add_option("--bounds", o.bounds, "Allowed voltages LO:HI")->capture_default_str();
    range_cmd->add_option("--threshold", o.threshold, "Minimum RLM")->capture_default_str();
    range_cmd->add_option("--v1", o.v1, "Fixed V1 (three-seg, bounded protocol)")->capture_default_str();
    range_cmd->add_option("--protocol", o.protocol, "bounded or fixed")->capture_default_str();
    range_cmd->add_option("--v-fixed", o.v_fixed, "Drive of every segment (fixed protocol)")->capture_default_str();
    range_cmd->add_option("--csv-out", o.csv_out, "Also write the per-wavelength CSV here");

    auto* eye_cmd = app.add_subcommand("eye", "PRBS-driven eye: level statistics, raster, waveform");
    add_common(eye_cmd, o);
    eye_cmd->add_option("--lambda", o.lambda, "Wavelength (nm)")->required();
    eye_cmd->add_option("--voltages", o.voltages, "Driver swing per segment (default all 2 V)");
    eye_cmd->add_option("--seed", o.seed, "PRBS seed")->capture_default_str();
    eye_cmd->add_option("--order", o.order, "PRBS order: 7, 15 or 31")->capture_default_str();
    eye_cmd->add_option("--count", o.count, "Symbols (default 4096)");
    eye_cmd->add_option("--bandwidth", o.bandwidth_ghz, "Driver bandwidth (GHz)")->capture_default_str();
    eye_cmd->add_option("--baud", o.baud_gbd, "Symbol rate (GBd)")->capture_default_str();
    eye_cmd->add_option("--samples-per-ui", o.samples_per_ui, "Samples per UI")->capture_default_str();
    eye_cmd->add_option("--window", o.window, "Sampling window, fraction of a UI")->capture_default_str();
    eye_cmd->add_option("--raster", o.raster, "Write the folded eye raster here");
    eye_cmd->add_option("--raster-format", o.raster_format, "pgm or csv")->capture_default_str();
    eye_cmd->add_option("--waveform", o.waveform, "Write the drive waveform CSV here");

    auto* prbs_cmd = app.add_subcommand("prbs", "Dump a PRBS bit stream");
    prbs_cmd->add_option("--order", o.order, "7, 15 or 31")->capture_default_str();
    prbs_cmd->add_option("--seed", o.seed, "Seed")->capture_default_str();
    prbs_cmd->add_option("--count", o.count, "Bits (default one period)");
    prbs_cmd->add_option("--out", o.c.out, "Output path (default: stdout)");
    prbs_cmd->add_option("--format", o.c.format, "bits (one per line) or hex (packed)");

    auto* defaults_cmd = app.add_subcommand("defaults", "Write the built-in device configs and response table");
    defaults_cmd->add_option("--dir", o.dir, "Target directory")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*spectrum_cmd) return cmd_spectrum(o, out, err);
        if (*resonance_cmd) return cmd_resonance(o, out, err);
        if (*levels_cmd) return cmd_levels(o, out, err);
        if (*solve_cmd) return cmd_solve(o, out, err);
        if (*range_cmd) return cmd_range(o, out, err);
        if (*eye_cmd) return cmd_eye(o, out, err);
        if (*prbs_cmd) return cmd_prbs(o, out, err);
        if (*defaults_cmd) return cmd_defaults(o, out, err);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace mrm::cli
