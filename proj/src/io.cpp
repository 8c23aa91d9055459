#include "mrm/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "mrm/error.hpp"
#include "mrm/format.hpp"

namespace mrm {

json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round_sig(x);
}

namespace {

const std::set<std::string> kDeviceKeys = {
    "radius_um",   "passive_n_eff", "group_index",  "passive_alpha_db_cm", "p_in",          "freeze_loss",
    "self_coupling", "coupling_ratio", "segments", "response",         "response_csv", "lambda_ref_nm",
};

double number_field(const json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_number()) throw ConfigError(std::string("config field '") + key + "' must be a number");
    return v.get<double>();
}

ElectroOpticResponse embedded_response(const json& r) {
    if (!r.is_object() || !r.contains("rows") || !r.at("rows").is_array())
        throw ConfigError("'response' must be an object with a 'rows' array");
    for (const auto& [k, v] : r.items())
        if (k != "rows" && k != "lambda_ref_nm") throw ConfigError("unknown response field '" + k + "'");
    std::vector<ResponseRow> rows;
    for (const auto& row : r.at("rows")) {
        if (!row.is_array() || row.size() != 3)
            throw ConfigError("response rows must be [v_reverse, delta_n_eff, alpha_db_per_cm]");
        for (const auto& v : row)
            if (!v.is_number()) throw ConfigError("response row entries must be numbers");
        rows.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return ElectroOpticResponse(std::move(rows), number_field(r, "lambda_ref_nm", 1310.0));
}

}  // namespace

Device parse_device(const json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw ConfigError("device config must be a JSON object");
    for (const auto& [k, v] : doc.items())
        if (!kDeviceKeys.count(k)) throw ConfigError("unknown config field '" + k + "'");
    if (doc.contains("self_coupling") && doc.contains("coupling_ratio"))
        throw ConfigError("give either 'self_coupling' or 'coupling_ratio', not both");
    if (doc.contains("response") == doc.contains("response_csv"))
        throw ConfigError("config needs exactly one of 'response' or 'response_csv'");

    std::optional<ElectroOpticResponse> resp;
    if (doc.contains("response")) {
        if (doc.contains("lambda_ref_nm")) throw ConfigError("'lambda_ref_nm' belongs inside 'response' here");
        resp = embedded_response(doc.at("response"));
    } else {
        if (!doc.at("response_csv").is_string()) throw ConfigError("'response_csv' must be a string path");
        std::filesystem::path p = doc.at("response_csv").get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        resp = load_response_csv(p.string(), number_field(doc, "lambda_ref_nm", 1310.0));
    }

    RingConfig ring;
    ring.radius_um = number_field(doc, "radius_um", ring.radius_um);
    ring.passive_n_eff = number_field(doc, "passive_n_eff", ring.passive_n_eff);
    ring.group_index = number_field(doc, "group_index", ring.group_index);
    ring.passive_alpha_db_cm = number_field(doc, "passive_alpha_db_cm", ring.passive_alpha_db_cm);
    ring.p_in = number_field(doc, "p_in", ring.p_in);
    if (doc.contains("freeze_loss")) {
        if (!doc.at("freeze_loss").is_boolean()) throw ConfigError("'freeze_loss' must be true or false");
        ring.freeze_loss = doc.at("freeze_loss").get<bool>();
    }
    if (!doc.contains("segments") || !doc.at("segments").is_array())
        throw ConfigError("config needs a 'segments' array");
    for (const auto& s : doc.at("segments")) {
        if (!s.is_object() || !s.contains("fraction") || !s.at("fraction").is_number())
            throw ConfigError("each segment needs a numeric 'fraction'");
        Segment seg;
        seg.fraction = s.at("fraction").get<double>();
        if (s.contains("label")) {
            if (!s.at("label").is_string()) throw ConfigError("segment 'label' must be a string");
            seg.label = s.at("label").get<std::string>();
        } else {
            seg.label = "S" + std::to_string(ring.segments.size() + 1);
        }
        ring.segments.push_back(std::move(seg));
    }
    if (doc.contains("self_coupling")) {
        ring.self_coupling = number_field(doc, "self_coupling", ring.self_coupling);
        ring.validate();
    } else {
        const double ratio = number_field(doc, "coupling_ratio", kDefaultCouplingRatio);
        if (!(ratio > 0.0)) throw ConfigError("'coupling_ratio' must be positive");
        ring.self_coupling = 0.5;  // placeholder so validate() checks the geometry first
        ring.validate();
        ring = with_coupling_ratio(ring, *resp, ratio);
        ring.validate();
    }
    return Device{std::move(ring), std::move(*resp)};
}

Device load_device(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_device(doc, dir.empty() ? "." : dir.string());
}

json device_json(const RingConfig& ring, const ElectroOpticResponse& resp, double coupling_ratio,
                 const std::optional<std::string>& response_csv) {
    json doc;
    doc["radius_um"] = num(ring.radius_um);
    doc["passive_n_eff"] = num(ring.passive_n_eff);
    doc["group_index"] = num(ring.group_index);
    doc["passive_alpha_db_cm"] = num(ring.passive_alpha_db_cm);
    doc["p_in"] = num(ring.p_in);
    doc["freeze_loss"] = ring.freeze_loss;
    doc["coupling_ratio"] = num(coupling_ratio);
    json segs = json::array();
    for (const auto& s : ring.segments) segs.push_back({{"label", s.label}, {"fraction", num(s.fraction)}});
    doc["segments"] = segs;
    if (response_csv) {
        doc["response_csv"] = *response_csv;
        doc["lambda_ref_nm"] = num(resp.lambda_ref_nm());
    } else {
        json rows = json::array();
        for (const auto& r : resp.rows()) rows.push_back({num(r.v_reverse), num(r.delta_n_eff), num(r.alpha_db_cm)});
        doc["response"] = {{"lambda_ref_nm", num(resp.lambda_ref_nm())}, {"rows", rows}};
    }
    return doc;
}

json to_json(const ResonanceInfo& info) {
    json j;
    j["lambda_res_nm"] = num(info.lambda_res_nm);
    j["fwhm_nm"] = num(info.fwhm_nm);
    j["q_factor"] = num(info.q_factor);
    j["extinction_db"] = num(info.extinction_db);
    j["fsr_nm"] = info.fsr_nm ? num(*info.fsr_nm) : json(nullptr);
    return j;
}

namespace {

json voltages_json(const EncodingScheme& enc) {
    json v;
    if (enc.kind == EncodingKind::three_segment_thermometer) {
        v["v1"] = num(enc.voltages.at(0));
        v["v2"] = num(enc.voltages.at(1));
        v["v3"] = num(enc.voltages.at(2));
    } else {
        v["v_msb"] = num(enc.voltages.at(0));
        v["v_lsb"] = num(enc.voltages.at(1));
    }
    return v;
}

json metrics_json(const std::optional<LinearityMetrics>& m) {
    if (!m) return nullptr;
    return {{"rlm", num(m->rlm)},     {"es1", num(m->es1)},     {"es2", num(m->es2)},
            {"il_db", num(m->il_db)}, {"er_db", num(m->er_db)}, {"tp_db", num(m->tp_db)}};
}

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

}  // namespace

json to_json(const SolveResult& r, double lambda_nm) {
    json j;
    j["lambda_nm"] = num(lambda_nm);
    j["encoding"] = to_string(r.encoding.kind);
    j["voltages"] = voltages_json(r.encoding);
    j["achieved_rlm"] = num(r.achieved_rlm);
    j["converged"] = r.converged;
    j["status"] = to_string(r.status);
    j["metrics"] = metrics_json(r.metrics);
    return j;
}

json to_json(const RangeReport& r, bool with_points) {
    json j;
    const auto& q = r.request;
    j["encoding"] = to_string(q.encoding);
    j["protocol"] = to_string(q.protocol);
    j["bounds"] = {num(q.bounds.lo), num(q.bounds.hi)};
    j["lambda_start_nm"] = num(q.lambda_start_nm);
    j["lambda_stop_nm"] = num(q.lambda_stop_nm);
    j["lambda_step_nm"] = num(q.lambda_step_nm);
    j["threshold"] = num(q.threshold);
    if (q.protocol == RangeProtocol::fixed_drive)
        j["v_fixed"] = num(q.v_fixed);
    else if (q.encoding == EncodingKind::three_segment_thermometer)
        j["v1"] = num(q.v1);
    j["lambda_min_nm"] = opt_num(r.lambda_min_nm);
    j["lambda_max_nm"] = opt_num(r.lambda_max_nm);
    j["window_width_nm"] = num(r.window_width_nm);
    j["il_min_db"] = opt_num(r.il_min_db);
    j["il_max_db"] = opt_num(r.il_max_db);
    j["il_tuning_range_db"] = r.il_min_db && r.il_max_db ? num(*r.il_max_db - *r.il_min_db) : json(nullptr);
    json runs = json::array();
    for (const auto& [lo, hi] : r.runs) runs.push_back({num(lo), num(hi)});
    j["runs"] = runs;
    j["warning"] = r.warning ? json(*r.warning) : json(nullptr);
    if (with_points) {
        json pts = json::array();
        for (const auto& p : r.points) {
            json pj;
            pj["lambda_nm"] = num(p.lambda_nm);
            pj["best_rlm"] = num(p.best_rlm);
            pj["qualifies"] = p.qualifies;
            pj["source"] = p.source;
            pj["voltages"] = voltages_json(p.encoding);
            pj["metrics"] = metrics_json(p.metrics);
            pts.push_back(std::move(pj));
        }
        j["points"] = pts;
    }
    return j;
}

json to_json(const EyeMetrics& m) {
    json j;
    json means = json::array(), sds = json::array(), counts = json::array();
    for (int k = 0; k < 4; ++k) {
        means.push_back(num(m.mean[k]));
        sds.push_back(num(m.stddev[k]));
        counts.push_back(m.samples[k]);
    }
    json gaps = json::array(), heights = json::array();
    for (int k = 0; k < 3; ++k) {
        gaps.push_back(num(m.gap[k]));
        heights.push_back(num(m.height[k]));
    }
    j["level_mean"] = means;
    j["level_stddev"] = sds;
    j["level_samples"] = counts;
    j["eye_gap"] = gaps;
    j["eye_height_3sigma"] = heights;
    j["dynamic_rlm"] = num(m.dynamic_rlm);
    return j;
}

json metrics_record(double lambda_nm, const PamLevels& levels, const std::optional<LinearityMetrics>& m) {
    json j;
    j["lambda_nm"] = num(lambda_nm);
    for (int k = 0; k < 4; ++k) j["p" + std::to_string(k)] = num(levels.p[k]);
    j["rlm"] = m ? num(m->rlm) : json(nullptr);
    j["il_db"] = m ? num(m->il_db) : json(nullptr);
    j["er_db"] = m ? num(m->er_db) : json(nullptr);
    j["tp_db"] = m ? num(m->tp_db) : json(nullptr);
    return j;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& pts) {
    out << "lambda_nm,transmission\n";
    for (const auto& p : pts) out << format_double(p.lambda_nm) << ',' << format_double(p.transmission) << '\n';
}

namespace {

std::string opt_field(const std::optional<LinearityMetrics>& m, double LinearityMetrics::*field) {
    return m ? format_double((*m).*field) : std::string("nan");
}

}  // namespace

void write_range_csv(std::ostream& out, const RangeReport& r) {
    const bool three = r.request.encoding == EncodingKind::three_segment_thermometer;
    out << (three ? "lambda_nm,best_rlm,v2,v3,il_db,er_db,tp_db\n" : "lambda_nm,best_rlm,v_msb,v_lsb,il_db,er_db,tp_db\n");
    for (const auto& p : r.points) {
        const auto& v = p.encoding.voltages;
        out << format_double(p.lambda_nm) << ',' << format_double(p.best_rlm) << ','
            << format_double(three ? v.at(1) : v.at(0)) << ',' << format_double(three ? v.at(2) : v.at(1)) << ','
            << opt_field(p.metrics, &LinearityMetrics::il_db) << ',' << opt_field(p.metrics, &LinearityMetrics::er_db)
            << ',' << opt_field(p.metrics, &LinearityMetrics::tp_db) << '\n';
    }
}

void write_metrics_csv_header(std::ostream& out) { out << "lambda_nm,p0,p1,p2,p3,rlm,il_db,er_db,tp_db\n"; }

void write_metrics_csv_row(std::ostream& out, double lambda_nm, const PamLevels& levels,
                           const std::optional<LinearityMetrics>& m) {
    out << format_double(lambda_nm);
    for (double p : levels.p) out << ',' << format_double(p);
    out << ',' << opt_field(m, &LinearityMetrics::rlm) << ',' << opt_field(m, &LinearityMetrics::il_db) << ','
        << opt_field(m, &LinearityMetrics::er_db) << ',' << opt_field(m, &LinearityMetrics::tp_db) << '\n';
}

void write_waveform_csv(std::ostream& out, const Waveform& w) {
    out << "t_ps";
    for (std::size_t s = 0; s < w.segments.size(); ++s) out << ",v_s" << s + 1;
    out << '\n';
    for (std::size_t n = 0; n < w.size(); ++n) {
        out << format_double(w.t_ps(n));
        for (const auto& seg : w.segments) out << ',' << format_double(seg[n]);
        out << '\n';
    }
}

void write_json(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

}  // namespace mrm
