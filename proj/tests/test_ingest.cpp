#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "itn/error.hpp"
#include "itn/ingest.hpp"

using namespace itn;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an itn::Error");
  return ErrorCode::InvalidArgument;
}

std::vector<TradeRecord> parse(const std::string& text, const TradeFormat& f = {}) {
  std::istringstream in(text);
  return parse_trade_csv(in, f);
}

const std::string kHeader = "reporter,partner,year,export,import\n";

TradeRecord rec(std::string r, std::string p, std::optional<double> e, std::optional<double> i,
                int year = 2000) {
  return {std::move(r), std::move(p), year, e, i, 0};
}

// Direct evaluation of the four-flow average for a single pair.
double pair_weight_oracle(std::span<const TradeRecord> recs, const std::string& a, const std::string& b) {
  double sum = 0.0;
  for (const auto& r : recs) {
    const bool match = (r.reporter == a && r.partner == b) || (r.reporter == b && r.partner == a);
    if (!match) continue;
    if (r.exports) sum += *r.exports;
    if (r.imports) sum += *r.imports;
  }
  return sum / 2.0;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("trade rows map field by field") {
    const auto r = parse(kHeader + "USA,CAN,2000,100.0,95.0\n");
    REQUIRE(r.size() == 1);
    CHECK(r[0].reporter == "USA");
    CHECK(r[0].partner == "CAN");
    CHECK(r[0].year == 2000);
    CHECK(*r[0].exports == 100.0);
    CHECK(*r[0].imports == 95.0);
    CHECK(r[0].line == 2);
  }

  TEST_CASE("absent values stay absent") {
    const auto r = parse(kHeader + "USA,CAN,2000,,0\n");
    REQUIRE(r.size() == 1);
    CHECK_FALSE(r[0].exports.has_value());
    CHECK(r[0].imports == 0.0);
  }

  TEST_CASE("row errors") {
    CHECK(code_of([] { parse(kHeader + "USA,USA,2000,1,1\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { parse(kHeader + "USA,CAN,2000,-5,1\n"); }) == ErrorCode::NegativeValue);
    CHECK(code_of([] { parse(kHeader + "USA,CAN,2000,x,1\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { parse(kHeader + "USA,CAN,2000,1\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { parse(kHeader + "USA,CAN,2000,1,1\nUSA,CAN,2000,2,2\n"); }) ==
          ErrorCode::MalformedRow);
    CHECK(code_of([] { parse("reporter,partner,year,export\nUSA,CAN,2000,1\n"); }) ==
          ErrorCode::UnknownColumn);
    try {
      parse(kHeader + "A,B,2000,1,1\nA,C,2000,-1,1\n");
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
  }

  TEST_CASE("year range filter") {
    TradeFormat f;
    f.min_year = 1999;
    f.max_year = 2000;
    const auto r = parse(kHeader + "A,B,1998,1,1\nA,B,1999,1,1\nA,B,2000,1,1\nA,B,2001,1,1\n", f);
    CHECK(r.size() == 2);
  }

  TEST_CASE("Gleditsch-style rows with sentinels and reverse columns") {
    TradeFormat f;
    f.reporter = "acra";
    f.partner = "acrb";
    f.exports = "expab";
    f.imports = "impab";
    f.reverse_exports = "expba";
    f.reverse_imports = "impba";
    f.missing_tokens = {"", "-9"};
    std::istringstream in(
        "acra,acrb,year,impab,expab,impba,expba\n"
        "USA,CAN,1990,80,100,-9,70\n");
    const auto r = parse_trade_csv(in, f);
    REQUIRE(r.size() == 2);
    CHECK(r[0].reporter == "USA");
    CHECK(*r[0].exports == 100.0);
    CHECK(*r[0].imports == 80.0);
    CHECK(r[1].reporter == "CAN");
    CHECK(*r[1].exports == 70.0);
    CHECK_FALSE(r[1].imports.has_value());
    const auto links = symmetrize(r);
    REQUIRE(links.size() == 1);
    CHECK(links[0].weight == doctest::Approx((100.0 + 80.0 + 70.0) / 2.0));
  }

  TEST_CASE("symmetrize examples") {
    const std::vector<TradeRecord> four{rec("I", "J", 10, 20), rec("J", "I", 20, 10)};
    auto links = symmetrize(four);
    REQUIRE(links.size() == 1);
    CHECK(links[0].weight == 30.0);
    CHECK(links[0].a == "I");
    CHECK(links[0].b == "J");

    const std::vector<TradeRecord> zero{rec("I", "J", 0, std::nullopt), rec("J", "I", std::nullopt, 0)};
    CHECK(symmetrize(zero).empty());

    const std::vector<TradeRecord> one{rec("I", "J", 4, std::nullopt)};
    links = symmetrize(one);
    REQUIRE(links.size() == 1);
    CHECK(links[0].weight == 2.0);
    CHECK(links[0].weight == pair_weight_oracle(one, "I", "J"));
  }

  TEST_CASE("symmetrize matches a per-pair oracle and counts mirror discrepancies") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::bernoulli_distribution absent(0.2);
    const std::vector<std::string> names{"A", "B", "C", "D", "E", "F"};
    std::vector<TradeRecord> recs;
    for (const auto& a : names)
      for (const auto& b : names) {
        if (a == b || absent(rng)) continue;
        recs.push_back(rec(a, b, absent(rng) ? std::nullopt : std::optional(u(rng)),
                           absent(rng) ? std::nullopt : std::optional(u(rng))));
      }
    SymmetrizeStats stats;
    const auto links = symmetrize(recs, &stats);
    CHECK(stats.pairs == links.size());
    for (const auto& l : links) {
      CHECK(l.a < l.b);
      CHECK(l.weight == doctest::Approx(pair_weight_oracle(recs, l.a, l.b)).epsilon(1e-14));
    }
    CHECK(stats.discrepant_mirror_reports > 0);
  }

  TEST_CASE("symmetrize is invariant under mirroring reporter and partner") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    std::vector<TradeRecord> recs, mirrored;
    const std::vector<std::string> names{"P", "Q", "R", "S", "T"};
    for (const auto& a : names)
      for (const auto& b : names)
        if (a != b) {
          const double e = u(rng), i = u(rng);
          recs.push_back(rec(a, b, e, i));
          mirrored.push_back(rec(b, a, i, e));
        }
    const auto x = symmetrize(recs), y = symmetrize(mirrored);
    REQUIRE(x.size() == y.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      CHECK(x[k].a == y[k].a);
      CHECK(x[k].b == y[k].b);
      CHECK(x[k].weight == doctest::Approx(y[k].weight).epsilon(1e-14));
    }
    double total = 0.0, half = 0.0;
    for (const auto& l : x) total += l.weight;
    for (const auto& r : recs) half += (*r.exports + *r.imports) / 2.0;
    CHECK(total == doctest::Approx(half).epsilon(1e-13));
  }

  TEST_CASE("build_year_networks") {
    const std::vector<TradeRecord> recs{rec("A", "B", 1, 1, 1999), rec("B", "C", 2, 0, 2000),
                                        rec("A", "C", 0, 0, 2000)};
    const auto set = build_year_networks(recs);
    REQUIRE(set.networks.size() == 2);
    const auto& n2000 = set.networks.at(2000);
    CHECK(n2000.node_count() == 2);
    CHECK(n2000.edge_count() == 1);
    CHECK(n2000.label(0) == "B");
    CHECK(n2000.label(1) == "C");
    CHECK(n2000.weight(0, 1) == 1.0);
    CHECK(set.labels == std::vector<std::string>{"A", "B", "C"});

    const std::vector<int> only{1999};
    CHECK(build_year_networks(recs, only).networks.size() == 1);
    CHECK(build_year_networks(std::vector<TradeRecord>{}).networks.empty());

    const auto pooled = pooled_weights(set, 1990, 2010);
    CHECK(pooled.size() == 2);
  }

  TEST_CASE("GDP parsing") {
    auto gdp = [](const std::string& body) {
      std::istringstream in("country,year,gdp\n" + body);
      return parse_gdp_csv(in);
    };
    const auto s = gdp("IND,1990,3.2e5\nIND,1991,3.3e5\nBRA,1990,4e5\n");
    REQUIRE(s.size() == 2);
    CHECK(s[1].country == "IND");
    CHECK(s[1].entries.at(1990) == 3.2e5);
    CHECK(s[1].entries.size() == 2);
    CHECK(code_of([&] { gdp("IND,1990,0\n"); }) == ErrorCode::NonPositiveGdp);
    CHECK(code_of([&] { gdp("IND,1990,1\nIND,1990,2\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { gdp("IND,abc,1\n"); }) == ErrorCode::MalformedRow);
  }

  TEST_CASE("edge list round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "itn_ingest_test";
    std::filesystem::create_directories(dir);
    const std::vector<WeightedEdge> e{{0, 1, 0.1}, {1, 2, 1.0 / 3.0}, {0, 3, 7.25e9}};
    const WeightedNetwork labelled(4, e, {"USA", "CAN", "a,b", "MEX"});
    write_edge_list(dir / "l.csv", labelled);
    const auto back = read_edge_list(dir / "l.csv");
    REQUIRE(back.edge_count() == 3);
    const auto usa = *back.find("USA"), can = *back.find("CAN"), ab = *back.find("a,b");
    CHECK(back.weight(usa, can) == 0.1);
    CHECK(back.weight(can, ab) == 1.0 / 3.0);

    const WeightedNetwork plain(5, e);
    write_edge_list(dir / "p.csv", plain);
    const auto p = read_edge_list(dir / "p.csv");
    CHECK(p.node_count() == 4);
    CHECK(p.weight(0, 3) == 7.25e9);
    std::filesystem::remove_all(dir);

    CHECK(code_of([] { read_edge_list(std::filesystem::path("/nonexistent/x.csv")); }) == ErrorCode::Io);
  }
}
