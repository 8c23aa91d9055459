#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrm/datapath.hpp"
#include "mrm/device_model.hpp"
#include "mrm/eye_analysis.hpp"
#include "mrm/linearity_search.hpp"
#include "mrm/pam_metrics.hpp"
#include "mrm/ring_sim.hpp"

namespace mrm {

using json = nlohmann::json;

// Rounded to 12 significant digits; NaN and infinities become null.
json num(double x);

// A ring plus the response table it is evaluated against.
struct Device {
    RingConfig ring;
    ElectroOpticResponse response;
};

// Device document:
//   {
//     "radius_um": 10, "passive_n_eff": ..., "group_index": 4,
//     "passive_alpha_db_cm": 2, "p_in": 1, "freeze_loss": false,
//     "self_coupling": 0.97            -- or "coupling_ratio": 0.995 (sigma / a(0 V))
//     "segments": [{"label": "S1", "fraction": 0.2}, ...],
//     "response": {"lambda_ref_nm": 1310, "rows": [[v, dn, alpha], ...]}
//       -- or "response_csv": "file.csv" (relative to the document) with "lambda_ref_nm"
//   }
// Omitted scalar fields take the built-in defaults; segments and a response
// are required. Unknown keys are rejected. Throws ConfigError.
Device parse_device(const json& doc, const std::string& base_dir = ".");
Device load_device(const std::string& path);

// Document referencing `response_csv` by name (embed == false) or carrying
// the rows inline.
json device_json(const RingConfig& ring, const ElectroOpticResponse& resp, double coupling_ratio,
                 const std::optional<std::string>& response_csv);

json to_json(const ResonanceInfo& info);
json to_json(const SolveResult& r, double lambda_nm);
json to_json(const RangeReport& r, bool with_points);
json to_json(const EyeMetrics& m);
json metrics_record(double lambda_nm, const PamLevels& levels, const std::optional<LinearityMetrics>& m);

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& pts);
void write_range_csv(std::ostream& out, const RangeReport& r);
void write_metrics_csv_header(std::ostream& out);
void write_metrics_csv_row(std::ostream& out, double lambda_nm, const PamLevels& levels,
                           const std::optional<LinearityMetrics>& m);
void write_waveform_csv(std::ostream& out, const Waveform& w);

// Pretty-printed with a trailing newline.
void write_json(std::ostream& out, const json& doc);

}  // namespace mrm
