#pragma once

// Serialisation of analysis results: CSV for curves (one row per bin or
// threshold, empty field where a value is undefined) and JSON for fits.

#include <filesystem>
#include <span>

#include "itn/gravity.hpp"
#include "itn/richclub.hpp"
#include "itn/scaling.hpp"
#include "json.hpp"

namespace itn {

using Json = nlohmann::ordered_json;

Json to_json(const PowerLawFit& fit);
Json to_json(const LogNormalParams& params);
Json to_json(const GammaSummary& summary);
Json to_json(const ModelObservables& obs);
Json to_json(const SimConfig& config);

/// Overlays the keys present in `j` (n, alpha, beta, theta, target_density,
/// target_links, seed, burn_in_window, drift_tol, max_transactions) on `base`.
SimConfig sim_config_from_json(const Json& j, SimConfig base = {});

/// `x,y,count`
void write_collapse_csv(const std::filesystem::path& path, const CollapseCurve& curve);

/// `threshold,coefficient,club_size`; thresholds are divided by threshold_scale.
void write_curve_csv(const std::filesystem::path& path, const RichClubCurve& curve,
                     double threshold_scale = 1.0);

/// `threshold,coefficient,club_size,null_mean,rho`
void write_curve_csv(const std::filesystem::path& path, const NullEnsembleResult& result,
                     double threshold_scale = 1.0);

/// `node,m`
void write_gdp_csv(const std::filesystem::path& path, std::span<const double> gdp);

/// `t,mean_m2`
void write_trace_csv(const std::filesystem::path& path, std::span<const TracePoint> trace);

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace itn
