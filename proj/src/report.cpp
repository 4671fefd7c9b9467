#include "itn/report.hpp"

#include <cmath>
#include <fstream>

#include "csv.hpp"
#include "itn/error.hpp"

namespace itn {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const PowerLawFit& fit) {
  return Json{{"exponent", fit.exponent},   {"intercept", fit.intercept},
              {"stderr", fit.std_error},    {"range", Json::array({fit.x_min, fit.x_max})},
              {"n_points", fit.n_points}};
}

Json to_json(const LogNormalParams& p) { return Json{{"w0", p.w0}, {"sigma", p.sigma}}; }

Json to_json(const GammaSummary& g) {
  Json hist = Json::array();
  for (const auto& b : g.histogram)
    hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"density", b.density}, {"count", b.count}});
  return Json{{"mean", g.mean},
              {"mean_excluding_outliers", std::isnan(g.mean_excluding_outliers)
                                              ? Json(nullptr)
                                              : Json(g.mean_excluding_outliers)},
              {"outlier_threshold", g.threshold},
              {"above_threshold", g.above_threshold},
              {"histogram", hist}};
}

Json to_json(const ModelObservables& obs) {
  Json j;
  if (obs.collapse) j["lognormal"] = to_json(obs.collapse->params);
  j["parabola_gof"] = optional_json(obs.parabola_gof);
  j["gdp_tail"] = obs.gdp_tail ? to_json(*obs.gdp_tail) : Json(nullptr);
  j["nu"] = obs.nu ? to_json(*obs.nu) : Json(nullptr);
  j["failures"] = obs.failures;
  return j;
}

Json to_json(const SimConfig& c) {
  Json j{{"n", c.n_countries},
         {"alpha", c.alpha},
         {"beta", c.beta},
         {"theta", c.theta},
         {"target_density", c.target_density}};
  j["target_links"] = c.target_links ? Json(*c.target_links) : Json(nullptr);
  j["seed"] = c.seed;
  j["burn_in_window"] = c.burn_in_window;
  j["drift_tol"] = c.drift_tol;
  j["max_transactions"] = c.max_transactions;
  return j;
}

SimConfig sim_config_from_json(const Json& j, SimConfig c) {
  try {
    if (j.contains("n")) c.n_countries = j.at("n").get<std::size_t>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("theta")) c.theta = j.at("theta").get<double>();
    if (j.contains("target_density")) c.target_density = j.at("target_density").get<double>();
    if (j.contains("target_links")) {
      if (j.at("target_links").is_null())
        c.target_links.reset();
      else
        c.target_links = j.at("target_links").get<std::size_t>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("burn_in_window")) c.burn_in_window = j.at("burn_in_window").get<std::size_t>();
    if (j.contains("drift_tol")) c.drift_tol = j.at("drift_tol").get<double>();
    if (j.contains("max_transactions"))
      c.max_transactions = j.at("max_transactions").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return c;
}

void write_collapse_csv(const std::filesystem::path& path, const CollapseCurve& curve) {
  auto out = open_output(path);
  out << "x,y,count\n";
  for (const auto& p : curve.points)
    out << csv::format_double(p.x) << ',' << csv::format_double(p.y) << ',' << p.count << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const RichClubCurve& curve,
                     double threshold_scale) {
  auto out = open_output(path);
  out << "threshold,coefficient,club_size\n";
  for (std::size_t t = 0; t < curve.thresholds.size(); ++t)
    out << csv::format_double(curve.thresholds[t] / threshold_scale) << ','
        << optional_field(curve.coefficient[t]) << ',' << curve.club_size[t] << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const NullEnsembleResult& r,
                     double threshold_scale) {
  auto out = open_output(path);
  out << "threshold,coefficient,club_size,null_mean,rho\n";
  for (std::size_t t = 0; t < r.thresholds.size(); ++t)
    out << csv::format_double(r.thresholds[t] / threshold_scale) << ','
        << optional_field(r.original[t]) << ',' << r.club_size[t] << ','
        << optional_field(r.null_mean[t]) << ',' << optional_field(r.rho[t]) << '\n';
}

void write_gdp_csv(const std::filesystem::path& path, std::span<const double> gdp) {
  auto out = open_output(path);
  out << "node,m\n";
  for (std::size_t i = 0; i < gdp.size(); ++i) out << i << ',' << csv::format_double(gdp[i]) << '\n';
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TracePoint> trace) {
  auto out = open_output(path);
  out << "t,mean_m2\n";
  for (const auto& p : trace) out << p.t << ',' << csv::format_double(p.mean_m2) << '\n';
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace itn
