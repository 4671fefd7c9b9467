#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itn/network.hpp"

namespace itn {

/// One directed dyad-year observation, values in M$. An empty optional means
/// the flow was not reported, which is distinct from a reported zero.
struct TradeRecord {
  std::string reporter;
  std::string partner;
  int year = 0;
  std::optional<double> exports;  // reporter -> partner
  std::optional<double> imports;  // reporter <- partner
  std::size_t line = 0;           // 1-based source line
};

/// Column mapping for trade files. The defaults read the native
/// `reporter,partner,year,export,import` schema; other layouts (e.g. a
/// Gleditsch export) are handled by renaming columns and listing their
/// missing-value sentinels. When reverse_exports/reverse_imports name columns,
/// each row also yields the mirrored (partner -> reporter) record.
struct TradeFormat {
  std::string reporter = "reporter";
  std::string partner = "partner";
  std::string year = "year";
  std::string exports = "export";
  std::string imports = "import";
  std::string reverse_exports;
  std::string reverse_imports;
  std::vector<std::string> missing_tokens{""};
  std::optional<int> min_year;
  std::optional<int> max_year;
  char delimiter = ',';
};

/// Throws MalformedRow (with line), UnknownColumn, NegativeValue, Io.
std::vector<TradeRecord> parse_trade_file(const std::filesystem::path& path,
                                          const TradeFormat& format = {});
std::vector<TradeRecord> parse_trade_csv(std::istream& in, const TradeFormat& format = {},
                                         const std::string& source = "<stream>");

struct SymmetricLink {
  std::string a;  // a < b lexicographically
  std::string b;
  double weight;
};

struct SymmetrizeStats {
  std::size_t pairs = 0;
  std::size_t discrepant_mirror_reports = 0;  // exp_ij != imp_ji (or vice versa)
};

/// w_ab = (exp_ab + exp_ba + imp_ab + imp_ba) / 2 over the records of a single
/// year; absent flows count as 0 and pairs with w = 0 produce no link.
std::vector<SymmetricLink> symmetrize(std::span<const TradeRecord> records,
                                      SymmetrizeStats* stats = nullptr);

struct YearNetworkSet {
  std::map<int, WeightedNetwork> networks;
  std::map<int, SymmetrizeStats> stats;
  std::vector<std::string> labels;  // union over all years, sorted
};

/// One network per year holding only the countries with at least one
/// non-zero link that year (labels sorted, ids dense). An empty `years`
/// keeps every year present in the records.
YearNetworkSet build_year_networks(std::span<const TradeRecord> records,
                                   std::span<const int> years = {});

/// Link weights of every network with first <= year <= last, pooled as
/// separate samples.
std::vector<double> pooled_weights(const YearNetworkSet& set, int first, int last);

struct GdpSeries {
  std::string country;
  std::map<int, double> entries;  // year -> total GDP
};

/// `country,year,gdp`. Throws MalformedRow (incl. duplicate country-year),
/// NonPositiveGdp, Io.
std::vector<GdpSeries> parse_gdp_file(const std::filesystem::path& path);
std::vector<GdpSeries> parse_gdp_csv(std::istream& in, const std::string& source = "<stream>");

/// Edge list CSV `i,j,weight` with node labels in the i/j columns.
void write_edge_list(const std::filesystem::path& path, const WeightedNetwork& net);
WeightedNetwork read_edge_list(const std::filesystem::path& path);
WeightedNetwork read_edge_list(std::istream& in, const std::string& source = "<stream>");

}  // namespace itn
