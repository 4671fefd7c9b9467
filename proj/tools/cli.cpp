#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "itn/error.hpp"
#include "itn/gravity.hpp"
#include "itn/ingest.hpp"
#include "itn/network.hpp"
#include "itn/report.hpp"
#include "itn/richclub.hpp"
#include "itn/scaling.hpp"
#include "itn/simd.hpp"

#ifndef ITN_VERSION
#define ITN_VERSION "0.0.0"
#endif

namespace itn::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetExhausted:
    case ErrorCode::NonConvergence:
      return kBudgetError;
    case ErrorCode::InvalidConfig:
      return kUsage;
    default:
      return kDataError;
  }
}

std::size_t default_threads() {
  if (const char* env = std::getenv("ITN_THREADS")) {
    std::size_t n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    if (std::from_chars(env, end, n).ptr == end && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string fnv1a_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream hex;
  hex << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

// Runs fn(0..n-1) on up to `threads` workers; rethrows the first failure by index.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> failures(n);
  auto guarded = [&](std::size_t k) {
    try {
      fn(k);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t k = 0; k < n; ++k) guarded(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) guarded(k);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
}

Json insufficient(const std::string& why) { return Json{{"insufficient", true}, {"error", why}}; }

template <class Fn>
Json attempt(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return insufficient(e.what());
  }
}

// Option registry: each option is a CLI flag `--some-key` and a config key
// `some_key`. Config values fill in whatever was not given on the command line.
class Options {
public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& field, const std::string& help) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = app_->add_option("--" + flag, field, help)->capture_default_str();
    bindings_.push_back({key, opt, [&field](const Json& j) { field = j.get<T>(); },
                         [&field] { return Json(field); }});
    return opt;
  }

  void apply(const Json& config) {
    if (!config.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : config.items()) {
      auto it = std::find_if(bindings_.begin(), bindings_.end(),
                             [&](const Binding& b) { return b.key == key; });
      if (it == bindings_.end()) throw UsageError("unknown config key '" + key + "'");
      if (it->option->count() > 0) continue;
      try {
        it->load(value);
      } catch (const Json::exception& e) {
        throw UsageError("config key '" + key + "': " + e.what());
      }
    }
  }

  Json snapshot() const {
    Json j = Json::object();
    for (const auto& b : bindings_) j[b.key] = b.save();
    return j;
  }

private:
  struct Binding {
    std::string key;
    CLI::Option* option;
    std::function<void(const Json&)> load;
    std::function<Json()> save;
  };
  CLI::App* app_;
  std::vector<Binding> bindings_;
};

struct Common {
  std::string out;
  std::string config;
  std::size_t threads = default_threads();
  std::string simd = "auto";
};

void add_common(CLI::App* app, Options& opts, Common& c) {
  opts.add("out", c.out, "Output directory (required)");
  opts.add("threads", c.threads, "Worker threads (default: ITN_THREADS or hardware concurrency)")
      ->check(CLI::PositiveNumber);
  opts.add("simd", c.simd, "Kernel set: auto, scalar, avx2, neon");
  app->add_option("--config", c.config, "JSON config (or a previous manifest.json)");
}

void load_config(const Common& c, Options& opts, const std::string& command) {
  if (c.config.empty()) return;
  std::ifstream in(c.config);
  if (!in) throw UsageError("cannot open config " + c.config);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("config " + c.config + ": " + e.what());
  }
  if (j.contains("command") && j.contains("config")) {
    if (j.at("command") != command)
      throw UsageError("manifest is for '" + j.at("command").get<std::string>() + "', not '" +
                       command + "'");
    j = j.at("config");
  }
  opts.apply(j);
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void select_simd(const std::string& name) {
  simd::Isa isa;
  try {
    isa = simd::parse_isa(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!simd::supported(isa))
    throw UsageError("instruction set '" + name + "' is not available on this machine");
  simd::set_active_isa(isa);
}

// One command invocation: checks inputs before touching the output directory,
// then records every output and writes the manifest whether or not the body
// succeeded.
class Run {
public:
  Run(std::string command, const Common& common, Json config)
      : out_(common.out), manifest_(Json::object()) {
    manifest_["command"] = std::move(command);
    manifest_["version"] = ITN_VERSION;
    manifest_["config"] = std::move(config);
    manifest_["seeds"] = Json::object();
    manifest_["inputs"] = Json::object();
    manifest_["simd"] = std::string(simd::to_string(simd::active_isa()));
    manifest_["threads"] = common.threads;
  }

  void input(const std::string& role, const fs::path& path) {
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::Io, "cannot open " + path.string());
    manifest_["inputs"][role] = {{"path", path.string()}, {"digest", fnv1a_digest(path)}};
  }
  void seed(const std::string& name, std::uint64_t value) { manifest_["seeds"][name] = value; }

  fs::path output(const std::string& relative) {
    outputs_.push_back(relative);
    const fs::path p = out_ / relative;
    fs::create_directories(p.parent_path());
    return p;
  }
  const fs::path& dir() const { return out_; }

  void execute(const std::function<void(Run&)>& body) {
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + out_.string() + ": " + ec.message());
    try {
      body(*this);
    } catch (const std::exception& e) {
      manifest_["status"] = "failed";
      manifest_["error"] = e.what();
      finish();
      throw;
    }
    manifest_["status"] = "ok";
    finish();
  }

private:
  void finish() {
    manifest_["outputs"] = outputs_;
    write_json(out_ / "manifest.json", manifest_);
  }

  fs::path out_;
  Json manifest_;
  std::vector<std::string> outputs_;
};

// ingest ----------------------------------------------------------------------

struct IngestArgs {
  Common common;
  std::string trade;
  std::string gdp;
  int first_year = 0;
  int last_year = 0;
  std::string reporter_column = "reporter";
  std::string partner_column = "partner";
  std::string year_column = "year";
  std::string export_column = "export";
  std::string import_column = "import";
  std::string reverse_export_column;
  std::string reverse_import_column;
  std::vector<std::string> missing{""};
  std::string delimiter = ",";
};

void register_ingest(CLI::App* app, Options& o, IngestArgs& a) {
  add_common(app, o, a.common);
  o.add("trade", a.trade, "Dyadic trade CSV (required)");
  o.add("gdp", a.gdp, "GDP CSV `country,year,gdp` (optional)");
  o.add("first_year", a.first_year, "First year kept (0: no bound)");
  o.add("last_year", a.last_year, "Last year kept (0: no bound)");
  o.add("reporter_column", a.reporter_column, "Reporter column name");
  o.add("partner_column", a.partner_column, "Partner column name");
  o.add("year_column", a.year_column, "Year column name");
  o.add("export_column", a.export_column, "Reporter-to-partner flow column");
  o.add("import_column", a.import_column, "Partner-to-reporter flow column");
  o.add("reverse_export_column", a.reverse_export_column,
        "Partner-to-reporter export column of dyad-per-row files");
  o.add("reverse_import_column", a.reverse_import_column,
        "Partner-from-reporter import column of dyad-per-row files");
  o.add("missing", a.missing, "Tokens meaning 'not reported' (e.g. -9)");
  o.add("delimiter", a.delimiter, "Field delimiter");
}

void cmd_ingest(const IngestArgs& a, const Json& config, std::ostream& out) {
  require(a.trade, "--trade");
  if (a.delimiter.size() != 1) throw UsageError("delimiter must be a single character");
  Run run("ingest", a.common, config);
  run.input("trade", a.trade);
  if (!a.gdp.empty()) run.input("gdp", a.gdp);

  run.execute([&](Run& r) {
    TradeFormat f;
    f.reporter = a.reporter_column;
    f.partner = a.partner_column;
    f.year = a.year_column;
    f.exports = a.export_column;
    f.imports = a.import_column;
    f.reverse_exports = a.reverse_export_column;
    f.reverse_imports = a.reverse_import_column;
    f.missing_tokens = a.missing;
    f.delimiter = a.delimiter[0];
    if (a.first_year != 0) f.min_year = a.first_year;
    if (a.last_year != 0) f.max_year = a.last_year;

    const auto records = parse_trade_file(a.trade, f);
    std::vector<GdpSeries> gdp;
    if (!a.gdp.empty()) gdp = parse_gdp_file(a.gdp);
    const auto set = build_year_networks(records);

    std::ofstream summary(r.output("summary.csv"));
    summary << "year,N,L,density,mean_weight,discrepancies\n" << std::setprecision(17);
    for (const auto& [year, net] : set.networks) {
      write_edge_list(r.output("networks/" + std::to_string(year) + ".csv"), net);
      summary << year << ',' << net.node_count() << ',' << net.edge_count() << ','
              << link_density(net) << ',' << mean_link_weight(net) << ','
              << set.stats.at(year).discrepant_mirror_reports << '\n';
    }
    if (!summary) throw Error(ErrorCode::Io, "cannot write summary.csv");

    if (!a.gdp.empty()) {
      std::ofstream g(r.output("gdp.csv"));
      g << "country,year,gdp\n" << std::setprecision(17);
      for (const auto& s : gdp)
        for (const auto& [year, value] : s.entries) {
          if (a.first_year != 0 && year < a.first_year) continue;
          if (a.last_year != 0 && year > a.last_year) continue;
          g << s.country << ',' << year << ',' << value << '\n';
        }
      if (!g) throw Error(ErrorCode::Io, "cannot write gdp.csv");
    }
    out << "ingest: " << records.size() << " records, " << set.networks.size() << " yearly networks, "
        << set.labels.size() << " countries -> " << r.dir().string() << '\n';
  });
}

// analyze ---------------------------------------------------------------------

struct AnalyzeArgs {
  Common common;
  std::string input;
  std::string gdp;
  std::size_t bins = 40;
  std::size_t min_count = 10;
  double gof_window = 2.0;
  std::size_t corr_bins = 20;
  double decades = 3.0;
  int block = 5;
  int anchor = 1951;
  double gamma_threshold = 2.0;
};

void register_analyze(CLI::App* app, Options& o, AnalyzeArgs& a) {
  add_common(app, o, a.common);
  o.add("input", a.input, "Directory written by `itn ingest` (required)");
  o.add("gdp", a.gdp, "GDP CSV (default: <input>/gdp.csv when present)");
  o.add("bins", a.bins, "Histogram bins in ln w")->check(CLI::PositiveNumber);
  o.add("min_count", a.min_count, "Minimum samples per collapse bin");
  o.add("gof_window", a.gof_window, "Parabola fit window |x| <= gof_window * sigma");
  o.add("corr_bins", a.corr_bins, "Log bins of w for the <s_i s_j> fit")->check(CLI::PositiveNumber);
  o.add("decades", a.decades, "Top decades of w used in the <s_i s_j> fit (<= 0: all)");
  o.add("block", a.block, "Years pooled per collapse curve")->check(CLI::PositiveNumber);
  o.add("anchor", a.anchor, "First year of the first pooled block");
  o.add("gamma_threshold", a.gamma_threshold, "gamma above this counts as an outlier");
}

struct YearAnalysis {
  int year = 0;
  fs::path path;
  Json json;
  std::vector<double> weights;
  std::map<std::string, double> strengths;
};

void analyse_year(YearAnalysis& y, const AnalyzeArgs& a) {
  const WeightedNetwork net = read_edge_list(y.path);
  const auto s = strength(net);
  for (const auto& e : net.edges()) y.weights.push_back(e.weight);
  for (NodeId i = 0; i < net.node_count(); ++i) y.strengths[net.label(i)] = s[i];

  Json& j = y.json;
  j["year"] = y.year;
  j["N"] = net.node_count();
  j["L"] = net.edge_count();
  j["density"] = attempt([&] { return Json(link_density(net)); });
  j["mean_weight"] = attempt([&] { return Json(mean_link_weight(net)); });
  j["total_weight"] = net.total_weight();
  if (!s.empty())
    j["strength"] = {{"mean", net.total_weight() * 2.0 / static_cast<double>(s.size())},
                     {"max", *std::max_element(s.begin(), s.end())}};
  j["s"] = y.strengths;
  j["lognormal"] = attempt([&] { return to_json(lognormal_params(y.weights)); });
  j["collapse_gof"] = attempt([&] {
    const auto curve = collapse_curve(y.weights, {a.bins, a.min_count});
    return Json(parabola_gof(curve, a.gof_window * curve.params.sigma));
  });
  j["nu"] = attempt([&] { return to_json(strength_correlation_exponent(net, {a.corr_bins, a.decades})); });
  j["mu"] = attempt([&] { return to_json(strength_degree_exponent(net)); });
}

void cmd_analyze(const AnalyzeArgs& a, const Json& config, std::ostream& out) {
  require(a.input, "--input");
  const fs::path networks = fs::path(a.input) / "networks";
  if (!fs::is_directory(networks))
    throw Error(ErrorCode::Io, "no networks/ directory under " + a.input);
  std::vector<YearAnalysis> years;
  for (const auto& entry : fs::directory_iterator(networks)) {
    if (entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    int year = 0;
    if (std::from_chars(stem.data(), stem.data() + stem.size(), year).ptr != stem.data() + stem.size())
      continue;
    years.push_back({year, entry.path(), Json::object(), {}, {}});
  }
  std::sort(years.begin(), years.end(), [](const auto& x, const auto& y) { return x.year < y.year; });
  if (years.empty()) throw Error(ErrorCode::Io, "no yearly networks under " + networks.string());

  fs::path gdp_path = a.gdp;
  if (gdp_path.empty() && fs::is_regular_file(fs::path(a.input) / "gdp.csv"))
    gdp_path = fs::path(a.input) / "gdp.csv";

  Run run("analyze", a.common, config);
  for (const auto& y : years) run.input("networks/" + std::to_string(y.year), y.path);
  if (!gdp_path.empty()) run.input("gdp", gdp_path);

  run.execute([&](Run& r) {
    parallel_for(years.size(), a.common.threads, [&](std::size_t k) { analyse_year(years[k], a); });

    Json report = Json::object();
    report["years"] = Json::array();
    for (const auto& y : years) report["years"].push_back(y.json);

    std::map<int, const YearAnalysis*> by_year;
    for (const auto& y : years) by_year[y.year] = &y;
    report["blocks"] = Json::array();
    for (int first = a.anchor; first + a.block - 1 <= years.back().year; first += a.block) {
      const int last = first + a.block - 1;
      std::vector<double> pooled;
      bool complete = true;
      for (int year = first; year <= last; ++year) {
        const auto it = by_year.find(year);
        if (it == by_year.end()) {
          complete = false;
          break;
        }
        pooled.insert(pooled.end(), it->second->weights.begin(), it->second->weights.end());
      }
      if (!complete) continue;
      Json block{{"first", first}, {"last", last}, {"samples", pooled.size()}};
      try {
        const auto curve = collapse_curve(pooled, {a.bins, a.min_count});
        const std::string name = "collapse_" + std::to_string(first) + "_" + std::to_string(last) + ".csv";
        write_collapse_csv(r.output(name), curve);
        block["file"] = name;
        block["lognormal"] = to_json(curve.params);
        block["collapse_gof"] = attempt([&] {
          return Json(parabola_gof(curve, a.gof_window * curve.params.sigma));
        });
      } catch (const Error& e) {
        block["collapse"] = insufficient(e.what());
      }
      report["blocks"].push_back(block);
    }

    if (!gdp_path.empty()) {
      const auto series = parse_gdp_file(gdp_path);
      std::vector<double> gammas;
      std::size_t skipped = 0;
      std::ofstream csv(r.output("gamma.csv"));
      csv << "country,gamma,std_error,n_years\n" << std::setprecision(17);
      for (const auto& g : series) {
        std::map<int, double> s_by_year;
        for (const auto& y : years) {
          const auto it = y.strengths.find(g.country);
          if (it != y.strengths.end() && it->second > 0.0) s_by_year[y.year] = it->second;
        }
        try {
          const auto fit = elasticity_gamma(s_by_year, g.entries);
          gammas.push_back(fit.exponent);
          csv << g.country << ',' << fit.exponent << ',' << fit.std_error << ',' << fit.n_points << '\n';
        } catch (const Error&) {
          ++skipped;
        }
      }
      if (!csv) throw Error(ErrorCode::Io, "cannot write gamma.csv");
      report["gamma"] = attempt([&] {
        Json j = to_json(gamma_distribution(gammas, a.gamma_threshold));
        j["countries"] = gammas.size();
        j["skipped"] = skipped;
        return j;
      });
    }
    write_json(r.output("fits.json"), report);
    out << "analyze: " << years.size() << " years, " << report["blocks"].size() << " pooled blocks -> "
        << r.dir().string() << '\n';
  });
}

// richclub --------------------------------------------------------------------

struct RichClubArgs {
  Common common;
  std::string network;
  std::size_t ensemble = 20;
  std::uint64_t seed = 1;
  double swap_factor = 10.0;
  std::string grid = "log";
  std::size_t grid_count = 100;
  double grid_min = 1e-4;
  double mrwn_tol = 1e-10;
  std::size_t mrwn_max_sweeps = 100000;
  std::size_t min_club = 10;
};

void register_richclub(CLI::App* app, Options& o, RichClubArgs& a) {
  add_common(app, o, a.common);
  o.add("network", a.network, "Edge list CSV `i,j,weight` (required)");
  o.add("ensemble", a.ensemble, "Null-model ensemble size (0: original curves only)");
  o.add("seed", a.seed, "Master seed of the null ensemble");
  o.add("swap_factor", a.swap_factor, "Accepted link-end exchanges per link");
  o.add("grid", a.grid, "Strength thresholds: log or realized")
      ->check(CLI::IsMember({"log", "realized"}));
  o.add("grid_count", a.grid_count, "Number of log thresholds")->check(CLI::PositiveNumber);
  o.add("grid_min", a.grid_min, "Lowest log threshold as a fraction of s_max");
  o.add("mrwn_tol", a.mrwn_tol, "Weight balancing tolerance (relative strength residual)");
  o.add("mrwn_max_sweeps", a.mrwn_max_sweeps, "Weight balancing sweep budget");
  o.add("min_club", a.min_club, "Smallest club counted in the reported rho range");
}

Json rho_range(const NullEnsembleResult& r, std::size_t min_club) {
  std::optional<double> lo, hi;
  for (std::size_t t = 0; t < r.rho.size(); ++t) {
    if (!r.rho[t] || r.club_size[t] < min_club) continue;
    lo = std::min(lo.value_or(*r.rho[t]), *r.rho[t]);
    hi = std::max(hi.value_or(*r.rho[t]), *r.rho[t]);
  }
  if (!lo) return nullptr;
  return Json{{"min", *lo}, {"max", *hi}, {"min_club", min_club}};
}

void cmd_richclub(const RichClubArgs& a, const Json& config, std::ostream& out) {
  require(a.network, "--network");
  Run run("richclub", a.common, config);
  run.input("network", a.network);
  run.seed("seed", a.seed);

  run.execute([&](Run& r) {
    const WeightedNetwork net = read_edge_list(a.network);
    const auto s = strength(net);
    if (s.empty() || net.total_weight() <= 0.0)
      throw Error(ErrorCode::EmptyNetwork, a.network + " carries no weight");
    const double s_max = *std::max_element(s.begin(), s.end());
    const auto k_grid = degree_thresholds(net);
    const auto s_grid = a.grid == "realized" ? strength_thresholds(net)
                                             : log_strength_thresholds(s_max, a.grid_count, a.grid_min);

    Json summary{{"N", net.node_count()}, {"L", net.edge_count()}};
    summary["density"] = attempt([&] { return Json(link_density(net)); });
    summary["total_weight"] = net.total_weight();
    summary["s_max"] = s_max;
    summary["half_trade_club_size"] = half_trade_club_size(net);
    summary["half_trade_strength_ratio"] = half_trade_strength_ratio(net);
    summary["ensemble_size"] = a.ensemble;

    if (a.ensemble > 0) {
      NullEnsembleOptions o;
      o.ensemble_size = a.ensemble;
      o.seed = a.seed;
      o.swap_factor = a.swap_factor;
      o.mrwn.tol = a.mrwn_tol;
      o.mrwn.max_sweeps = a.mrwn_max_sweeps;
      o.threads = a.common.threads;
      o.degree_grid = k_grid;
      o.strength_grid = s_grid;
      const auto ens = null_ensemble_curves(net, o);
      write_curve_csv(r.output("phi.csv"), ens.unweighted);
      write_curve_csv(r.output("rw.csv"), ens.weighted, s_max);
      summary["mean_adjacency_difference"] = ens.mean_adjacency_difference;
      summary["rho_unweighted_range"] = rho_range(ens.unweighted, a.min_club);
      summary["rho_weighted_range"] = rho_range(ens.weighted, a.min_club);
    } else {
      write_curve_csv(r.output("phi.csv"), phi_curve(net, k_grid));
      write_curve_csv(r.output("rw.csv"), rw_curve(net, s_grid), s_max);
    }
    write_curve_csv(r.output("fw.csv"), fw_curve(net, s_grid), s_max);
    write_json(r.output("summary.json"), summary);
    out << "richclub: N=" << net.node_count() << " L=" << net.edge_count()
        << " half-trade club size " << summary["half_trade_club_size"].get<double>() << " -> "
        << r.dir().string() << '\n';
  });
}

// simulate --------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::size_t n = 187;
  double alpha = 0.5;
  double beta = 1.0;
  double theta = 0.5;
  double target_density = 0.59;
  std::size_t target_links = 0;
  std::uint64_t seed = 1;
  std::size_t burn_in_window = 0;
  double drift_tol = 1e-3;
  std::uint64_t max_transactions = 1'000'000'000;
  std::size_t replicas = 1;
  std::size_t bins = 40;
  std::size_t min_count = 10;
  double gof_window = 2.0;
  double tail_decades = 1.0;
  std::size_t corr_bins = 20;
  double decades = 3.0;
};

void register_simulate(CLI::App* app, Options& o, SimulateArgs& a) {
  add_common(app, o, a.common);
  o.add("n", a.n, "Number of countries");
  o.add("alpha", a.alpha, "Exponent of the investing country's GDP");
  o.add("beta", a.beta, "Exponent of the partner's GDP");
  o.add("theta", a.theta, "Distance exponent");
  o.add("target_density", a.target_density, "Stop at this link density");
  o.add("target_links", a.target_links, "Stop at this many links (0: use target_density)");
  o.add("seed", a.seed, "Random seed");
  o.add("burn_in_window", a.burn_in_window, "Transactions per stationarity window (0: 1000 N)");
  o.add("drift_tol", a.drift_tol, "Relative drift of windowed <m^2> accepted as stationary");
  o.add("max_transactions", a.max_transactions, "Total transaction budget");
  o.add("replicas", a.replicas, "Independent runs with seeds seed, seed+1, ...")
      ->check(CLI::PositiveNumber);
  o.add("bins", a.bins, "Histogram bins in ln w")->check(CLI::PositiveNumber);
  o.add("min_count", a.min_count, "Minimum samples per collapse bin");
  o.add("gof_window", a.gof_window, "Parabola fit window |x| <= gof_window * sigma");
  o.add("tail_decades", a.tail_decades, "Decades of m in the GDP tail fit");
  o.add("corr_bins", a.corr_bins, "Log bins of w for the <s_i s_j> fit")->check(CLI::PositiveNumber);
  o.add("decades", a.decades, "Top decades of w used in the <s_i s_j> fit (<= 0: all)");
}

SimConfig sim_config(const SimulateArgs& a, std::uint64_t seed) {
  SimConfig c;
  c.n_countries = a.n;
  c.alpha = a.alpha;
  c.beta = a.beta;
  c.theta = a.theta;
  c.target_density = a.target_density;
  if (a.target_links > 0) c.target_links = a.target_links;
  c.seed = seed;
  c.burn_in_window = a.burn_in_window;
  c.drift_tol = a.drift_tol;
  c.max_transactions = a.max_transactions;
  return c;
}

void cmd_simulate(const SimulateArgs& a, const Json& config, std::ostream& out) {
  validate(sim_config(a, a.seed));
  Run run("simulate", a.common, config);
  for (std::size_t k = 0; k < a.replicas; ++k)
    run.seed(a.replicas == 1 ? "seed" : "replica_" + std::to_string(k), a.seed + k);

  run.execute([&](Run& r) {
    ObservableOptions obs_opts;
    obs_opts.collapse = {a.bins, a.min_count};
    obs_opts.gof_max_abs_x_sigmas = a.gof_window;
    obs_opts.gdp_tail_decades = a.tail_decades;
    obs_opts.correlation = {a.corr_bins, a.decades};

    struct Replica {
      std::uint64_t seed;
      std::string prefix;
      std::optional<GravityWorld> world;
      StationarityReport stationarity;
      std::optional<ModelNetwork> model;
      ModelObservables observables;
    };
    std::vector<Replica> replicas(a.replicas);
    for (std::size_t k = 0; k < a.replicas; ++k) {
      replicas[k].seed = a.seed + k;
      replicas[k].prefix = a.replicas == 1 ? "" : "seed_" + std::to_string(a.seed + k) + "/";
    }
    parallel_for(replicas.size(), a.common.threads, [&](std::size_t k) {
      Replica& rep = replicas[k];
      rep.world.emplace(sim_config(a, rep.seed));
      rep.stationarity = run_to_stationarity(*rep.world);
      rep.model = run_to_density(*rep.world);
      rep.observables = model_observables(rep.model->network, rep.model->gdp, obs_opts);
    });

    for (auto& rep : replicas) {
      const ModelNetwork& m = *rep.model;
      write_edge_list(r.output(rep.prefix + "edges.csv"), m.network);
      write_gdp_csv(r.output(rep.prefix + "gdp.csv"), m.gdp);
      write_trace_csv(r.output(rep.prefix + "trace.csv"), rep.world->trace());
      Json j;
      j["config"] = to_json(rep.world->config());
      j["simd"] = std::string(simd::to_string(rep.world->isa()));
      j["stationarity"] = {{"transactions", rep.stationarity.transactions},
                           {"windows", rep.stationarity.windows},
                           {"last_drift", rep.stationarity.last_drift}};
      j["network"] = {{"N", m.network.node_count()},
                      {"L", m.network.edge_count()},
                      {"density", link_density(m.network)},
                      {"total_weight", m.network.total_weight()},
                      {"transactions", m.transactions}};
      j["weights_include_no_debt_subsidies"] = false;
      j["observables"] = to_json(rep.observables);
      write_json(r.output(rep.prefix + "observables.json"), j);
      out << "simulate: seed " << rep.seed << " L=" << m.network.edge_count() << " after "
          << rep.stationarity.transactions << "+" << m.transactions << " transactions";
      if (rep.observables.parabola_gof) out << ", gof " << *rep.observables.parabola_gof;
      if (rep.observables.nu) out << ", nu " << rep.observables.nu->exponent;
      if (rep.observables.gdp_tail) out << ", gdp tail " << rep.observables.gdp_tail->exponent;
      out << '\n';
    }
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"International trade network toolkit and gravity exchange simulator", "itn"};
  app.set_version_flag("--version", ITN_VERSION);
  app.require_subcommand(1);

  CLI::App* ingest = app.add_subcommand("ingest", "Build yearly networks from dyadic trade data");
  CLI::App* analyze = app.add_subcommand("analyze", "Weight, strength and GDP scaling analyses");
  CLI::App* richclub = app.add_subcommand("richclub", "Rich-club curves and null-model ratios");
  CLI::App* simulate = app.add_subcommand("simulate", "Gravity-law exchange model network");

  IngestArgs ingest_args;
  AnalyzeArgs analyze_args;
  RichClubArgs richclub_args;
  SimulateArgs simulate_args;
  Options ingest_opts(ingest), analyze_opts(analyze), richclub_opts(richclub), simulate_opts(simulate);
  register_ingest(ingest, ingest_opts, ingest_args);
  register_analyze(analyze, analyze_opts, analyze_args);
  register_richclub(richclub, richclub_opts, richclub_args);
  register_simulate(simulate, simulate_opts, simulate_args);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto dispatch = [&](auto& opts, auto& a, const char* name, auto&& command) {
    load_config(a.common, opts, name);
    require(a.common.out, "--out");
    select_simd(a.common.simd);
    command(a, opts.snapshot(), out);
  };

  try {
    if (ingest->parsed()) dispatch(ingest_opts, ingest_args, "ingest", cmd_ingest);
    else if (analyze->parsed()) dispatch(analyze_opts, analyze_args, "analyze", cmd_analyze);
    else if (richclub->parsed()) dispatch(richclub_opts, richclub_args, "richclub", cmd_richclub);
    else dispatch(simulate_opts, simulate_args, "simulate", cmd_simulate);
  } catch (const UsageError& e) {
    err << "itn: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "itn: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "itn: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace itn::cli
