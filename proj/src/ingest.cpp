#include "itn/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>
#include <unordered_map>

#include "csv.hpp"
#include "itn/error.hpp"

namespace itn {
namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

/// Header name -> column position.
std::unordered_map<std::string, std::size_t> header_map(const std::vector<std::string>& header) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t k = 0; k < header.size(); ++k) out.emplace(csv::trim(header[k]), k);
  return out;
}

std::size_t require_column(const std::unordered_map<std::string, std::size_t>& cols,
                           const std::string& name, const std::string& source) {
  auto it = cols.find(name);
  if (it == cols.end())
    throw Error(ErrorCode::UnknownColumn, "column '" + name + "' not found in header of " + source);
  return it->second;
}

}  // namespace

std::vector<TradeRecord> parse_trade_csv(std::istream& in, const TradeFormat& format,
                                         const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, line_no))
    throw Error(ErrorCode::MalformedRow, source + ": missing header");
  const auto header = csv::split(line, format.delimiter);
  if (!header) throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": unterminated quote");
  const auto cols = header_map(*header);

  const std::size_t c_rep = require_column(cols, format.reporter, source);
  const std::size_t c_par = require_column(cols, format.partner, source);
  const std::size_t c_year = require_column(cols, format.year, source);
  const std::size_t c_exp = require_column(cols, format.exports, source);
  const std::size_t c_imp = require_column(cols, format.imports, source);
  const bool mirrored = !format.reverse_exports.empty() || !format.reverse_imports.empty();
  std::optional<std::size_t> c_rexp, c_rimp;
  if (!format.reverse_exports.empty()) c_rexp = require_column(cols, format.reverse_exports, source);
  if (!format.reverse_imports.empty()) c_rimp = require_column(cols, format.reverse_imports, source);

  auto is_missing = [&](const std::string& field) {
    const std::string t = csv::trim(field);
    return std::find(format.missing_tokens.begin(), format.missing_tokens.end(), t) !=
           format.missing_tokens.end();
  };

  std::vector<TradeRecord> records;
  std::set<std::tuple<std::string, std::string, int>> seen;
  while (csv::next_line(in, line, line_no)) {
    const auto fields = csv::split(line, format.delimiter);
    const std::string at = where(source, line_no);
    if (!fields) throw Error(ErrorCode::MalformedRow, at + ": unterminated quote");
    if (fields->size() != header->size())
      throw Error(ErrorCode::MalformedRow, at + ": expected " + std::to_string(header->size()) +
                                               " fields, got " + std::to_string(fields->size()));

    auto value = [&](std::optional<std::size_t> col, const char* name) -> std::optional<double> {
      if (!col) return std::nullopt;
      const std::string& f = (*fields)[*col];
      if (is_missing(f)) return std::nullopt;
      const auto v = csv::to_double(f);
      if (!v) throw Error(ErrorCode::MalformedRow, at + ": " + name + " '" + f + "' is not a number");
      if (*v < 0.0) throw Error(ErrorCode::NegativeValue, at + ": " + name + " = " + f);
      return v;
    };

    TradeRecord rec;
    rec.reporter = csv::trim((*fields)[c_rep]);
    rec.partner = csv::trim((*fields)[c_par]);
    rec.line = line_no;
    if (rec.reporter.empty() || rec.partner.empty())
      throw Error(ErrorCode::MalformedRow, at + ": empty country label");
    if (rec.reporter == rec.partner)
      throw Error(ErrorCode::MalformedRow, at + ": reporter equals partner (" + rec.reporter + ")");
    const auto year = csv::to_integer((*fields)[c_year]);
    if (!year) throw Error(ErrorCode::MalformedRow, at + ": bad year '" + (*fields)[c_year] + "'");
    rec.year = static_cast<int>(*year);
    rec.exports = value(c_exp, "export");
    rec.imports = value(c_imp, "import");
    const auto rev_exports = value(c_rexp, "reverse export");
    const auto rev_imports = value(c_rimp, "reverse import");

    if (format.min_year && rec.year < *format.min_year) continue;
    if (format.max_year && rec.year > *format.max_year) continue;

    auto push = [&](TradeRecord r) {
      if (!seen.emplace(r.reporter, r.partner, r.year).second)
        throw Error(ErrorCode::MalformedRow, at + ": duplicate record " + r.reporter + "->" +
                                                 r.partner + " " + std::to_string(r.year));
      records.push_back(std::move(r));
    };
    if (mirrored) {
      TradeRecord rev{rec.partner, rec.reporter, rec.year, rev_exports, rev_imports, line_no};
      push(std::move(rec));
      push(std::move(rev));
    } else {
      push(std::move(rec));
    }
  }
  return records;
}

std::vector<TradeRecord> parse_trade_file(const std::filesystem::path& path,
                                          const TradeFormat& format) {
  auto in = open_input(path);
  return parse_trade_csv(in, format, path.string());
}

std::vector<SymmetricLink> symmetrize(std::span<const TradeRecord> records, SymmetrizeStats* stats) {
  // (a, b) with a < b -> the two directed records, a-side first
  std::map<std::pair<std::string, std::string>, std::pair<const TradeRecord*, const TradeRecord*>> dyads;
  for (const auto& r : records) {
    const bool forward = r.reporter < r.partner;
    auto key = forward ? std::make_pair(r.reporter, r.partner) : std::make_pair(r.partner, r.reporter);
    auto& slot = dyads[key];
    (forward ? slot.first : slot.second) = &r;
  }

  SymmetrizeStats local;
  std::vector<SymmetricLink> links;
  for (const auto& [key, pair] : dyads) {
    const auto [ab, ba] = pair;
    auto flow = [](const TradeRecord* r, bool exports) {
      if (!r) return 0.0;
      const auto& v = exports ? r->exports : r->imports;
      return v.value_or(0.0);
    };
    const double w = (flow(ab, true) + flow(ba, true) + flow(ab, false) + flow(ba, false)) / 2.0;
    if (ab && ba) {
      auto differs = [](const std::optional<double>& x, const std::optional<double>& y) {
        return x && y && *x != *y;
      };
      if (differs(ab->exports, ba->imports) || differs(ba->exports, ab->imports))
        ++local.discrepant_mirror_reports;
    }
    if (w > 0.0) {
      links.push_back({key.first, key.second, w});
      ++local.pairs;
    }
  }
  if (stats) *stats = local;
  return links;
}

YearNetworkSet build_year_networks(std::span<const TradeRecord> records, std::span<const int> years) {
  std::map<int, std::vector<TradeRecord>> by_year;
  for (const auto& r : records) {
    if (!years.empty() && std::find(years.begin(), years.end(), r.year) == years.end()) continue;
    by_year[r.year].push_back(r);
  }

  YearNetworkSet set;
  std::set<std::string> all;
  for (const auto& [year, recs] : by_year) {
    SymmetrizeStats stats;
    const auto links = symmetrize(recs, &stats);
    std::set<std::string> active;
    for (const auto& l : links) {
      active.insert(l.a);
      active.insert(l.b);
    }
    std::vector<std::string> labels(active.begin(), active.end());
    std::unordered_map<std::string, NodeId> id;
    for (NodeId i = 0; i < labels.size(); ++i) id.emplace(labels[i], i);
    std::vector<WeightedEdge> edges;
    edges.reserve(links.size());
    for (const auto& l : links) edges.push_back({id.at(l.a), id.at(l.b), l.weight});
    all.insert(labels.begin(), labels.end());
    const std::size_t n = labels.size();
    set.networks.emplace(year, WeightedNetwork(n, edges, std::move(labels)));
    set.stats.emplace(year, stats);
  }
  set.labels.assign(all.begin(), all.end());
  return set;
}

std::vector<double> pooled_weights(const YearNetworkSet& set, int first, int last) {
  std::vector<double> out;
  for (auto it = set.networks.lower_bound(first); it != set.networks.end() && it->first <= last; ++it)
    for (const auto& e : it->second.edges()) out.push_back(e.weight);
  return out;
}

std::vector<GdpSeries> parse_gdp_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, line_no))
    throw Error(ErrorCode::MalformedRow, source + ": missing header");
  const auto header = csv::split(line);
  if (!header) throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": unterminated quote");
  const auto cols = header_map(*header);
  const std::size_t c_country = require_column(cols, "country", source);
  const std::size_t c_year = require_column(cols, "year", source);
  const std::size_t c_gdp = require_column(cols, "gdp", source);

  std::map<std::string, GdpSeries> series;
  while (csv::next_line(in, line, line_no)) {
    const std::string at = where(source, line_no);
    const auto fields = csv::split(line);
    if (!fields || fields->size() != header->size())
      throw Error(ErrorCode::MalformedRow, at + ": wrong field count");
    const std::string country = csv::trim((*fields)[c_country]);
    const auto year = csv::to_integer((*fields)[c_year]);
    const auto gdp = csv::to_double((*fields)[c_gdp]);
    if (country.empty() || !year || !gdp)
      throw Error(ErrorCode::MalformedRow, at + ": cannot parse '" + line + "'");
    if (!(*gdp > 0.0)) throw Error(ErrorCode::NonPositiveGdp, at + ": gdp = " + (*fields)[c_gdp]);
    auto& s = series[country];
    s.country = country;
    if (!s.entries.emplace(static_cast<int>(*year), *gdp).second)
      throw Error(ErrorCode::MalformedRow,
                  at + ": duplicate entry for " + country + " " + std::to_string(*year));
  }
  std::vector<GdpSeries> out;
  for (auto& [name, s] : series) out.push_back(std::move(s));
  return out;
}

std::vector<GdpSeries> parse_gdp_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_gdp_csv(in, path.string());
}

void write_edge_list(const std::filesystem::path& path, const WeightedNetwork& net) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "i,j,weight\n";
  for (const auto& e : net.edges())
    out << csv::escape(net.label(e.u)) << ',' << csv::escape(net.label(e.v)) << ','
        << csv::format_double(e.weight) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

WeightedNetwork read_edge_list(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, line_no))
    throw Error(ErrorCode::MalformedRow, source + ": missing header");
  const auto header = csv::split(line);
  if (!header) throw Error(ErrorCode::MalformedRow, source + ": bad header");
  const auto cols = header_map(*header);
  const std::size_t ci = require_column(cols, "i", source);
  const std::size_t cj = require_column(cols, "j", source);
  const std::size_t cw = require_column(cols, "weight", source);

  struct Row {
    std::string a, b;
    double w;
    std::size_t line;
  };
  std::vector<Row> rows;
  bool numeric = true;
  long long max_id = -1;
  while (csv::next_line(in, line, line_no)) {
    const std::string at = where(source, line_no);
    const auto fields = csv::split(line);
    if (!fields || fields->size() != header->size())
      throw Error(ErrorCode::MalformedRow, at + ": wrong field count");
    const auto w = csv::to_double((*fields)[cw]);
    if (!w) throw Error(ErrorCode::MalformedRow, at + ": bad weight");
    Row r{csv::trim((*fields)[ci]), csv::trim((*fields)[cj]), *w, line_no};
    for (const auto* label : {&r.a, &r.b}) {
      const auto id = csv::to_integer(*label);
      if (id && *id >= 0) max_id = std::max(max_id, *id);
      else numeric = false;
    }
    rows.push_back(std::move(r));
  }

  std::vector<WeightedEdge> edges;
  edges.reserve(rows.size());
  if (numeric) {
    for (const auto& r : rows)
      edges.push_back({static_cast<NodeId>(*csv::to_integer(r.a)),
                       static_cast<NodeId>(*csv::to_integer(r.b)), r.w});
    return WeightedNetwork(static_cast<std::size_t>(max_id + 1), edges);
  }
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> id;
  auto intern = [&](const std::string& s) {
    auto [it, fresh] = id.emplace(s, static_cast<NodeId>(labels.size()));
    if (fresh) labels.push_back(s);
    return it->second;
  };
  for (const auto& r : rows) {
    const NodeId a = intern(r.a);
    const NodeId b = intern(r.b);
    edges.push_back({a, b, r.w});
  }
  const std::size_t n = labels.size();
  return WeightedNetwork(n, edges, std::move(labels));
}

WeightedNetwork read_edge_list(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_edge_list(in, path.string());
}

}  // namespace itn
