#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "doctest.h"
#include "itn/error.hpp"
#include "itn/scaling.hpp"

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

std::vector<double> lognormal_sample(std::size_t n, double w0, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> d(std::log(w0), sigma);
  std::vector<double> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

// Independent regression oracle: slope of the normal equations from raw sums.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    n += 1;
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("scaling") {
  TEST_CASE("lognormal_params moments") {
    const std::vector<double> same(5, 7.0);
    const auto p = lognormal_params(same);
    CHECK(p.w0 == 7.0);
    CHECK(p.sigma == 0.0);

    const std::vector<double> two{std::exp(1.0), std::exp(3.0)};
    const auto q = lognormal_params(two);
    CHECK(q.w0 == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(q.sigma == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(code_of([] { lognormal_params(std::vector<double>{1.0}); }) == ErrorCode::TooFewSamples);
    CHECK(code_of([] { lognormal_params(std::vector<double>{1.0, 0.0}); }) ==
          ErrorCode::NonPositiveSample);
  }

  TEST_CASE("lognormal_params recovers generator parameters") {
    const std::size_t n = 100000;
    const auto w = lognormal_sample(n, 10.0, 2.0, 2024);
    const auto p = lognormal_params(w);
    // stderr of <ln w> is sigma/sqrt(n), of the log-std about sigma/sqrt(2n)
    CHECK(std::abs(std::log(p.w0) - std::log(10.0)) < 3.0 * 2.0 / std::sqrt(double(n)));
    CHECK(std::abs(p.sigma - 2.0) < 3.0 * 2.0 / std::sqrt(2.0 * double(n)));
  }

  TEST_CASE("property: scale covariance of the lognormal collapse") {
    const auto w = lognormal_sample(20000, 3.0, 1.3, 11);
    const auto base = collapse_curve(w);
    for (double c : {1e-3, 0.5, 17.0, 4e6}) {
      std::vector<double> scaled(w);
      for (auto& v : scaled) v *= c;
      const auto p = lognormal_params(scaled);
      CHECK(p.w0 == doctest::Approx(base.params.w0 * c).epsilon(1e-10));
      CHECK(p.sigma == doctest::Approx(base.params.sigma).epsilon(1e-10));
      const auto curve = collapse_curve(scaled);
      REQUIRE(curve.points.size() == base.points.size());
      for (std::size_t k = 0; k < curve.points.size(); ++k) {
        CHECK(curve.points[k].x == doctest::Approx(base.points[k].x).epsilon(1e-8));
        CHECK(curve.points[k].y == doctest::Approx(base.points[k].y).epsilon(1e-8));
        CHECK(curve.points[k].count == base.points[k].count);
      }
    }
  }

  TEST_CASE("analytic lognormal density maps onto y = x^2") {
    const LogNormalParams params{5.0, 1.7};
    std::vector<double> log_w, density;
    for (int k = -30; k <= 30; ++k) {
      const double l = std::log(params.w0) + 0.2 * k;
      const double z = l - std::log(params.w0);
      log_w.push_back(l);
      density.push_back(std::exp(-z * z / (2 * params.sigma * params.sigma)) /
                        std::sqrt(2 * std::numbers::pi * params.sigma * params.sigma));
    }
    const auto curve = collapse_transform(log_w, density, params);
    for (const auto& p : curve.points) CHECK(p.y == doctest::Approx(p.x * p.x).epsilon(1e-12).scale(1.0));
    CHECK(parabola_gof(curve) < 1e-18);
  }

  TEST_CASE("Monte Carlo lognormal sample collapses near the parabola") {
    const auto w = lognormal_sample(100000, 10.0, 2.0, 99);
    const auto curve = collapse_curve(w);
    const double gof = parabola_gof(curve, 2.0 * curve.params.sigma);
    MESSAGE("gof = " << gof);
    CHECK(gof < 0.1);
    for (const auto& p : curve.points) CHECK(p.count >= 10);
  }

  TEST_CASE("collapse_curve errors") {
    CHECK(code_of([] { collapse_curve(std::vector<double>(10, 2.0)); }) == ErrorCode::DegenerateSigma);
  }

  TEST_CASE("parabola_gof residuals") {
    CollapseCurve on, shifted;
    for (double x : {-2.0, -1.0, 0.0, 1.5, 3.0}) {
      on.points.push_back({x, x * x, 20});
      shifted.points.push_back({x, x * x + 1.0, 20});
    }
    CHECK(parabola_gof(on) == 0.0);
    CHECK(parabola_gof(shifted) == doctest::Approx(1.0));
    CHECK(parabola_gof(shifted, 1.5) == doctest::Approx(1.0));
    CHECK(code_of([&] { parabola_gof(on, 0.5); }) == ErrorCode::TooFewBins);
  }

  TEST_CASE("elasticity_gamma") {
    std::map<int, double> g, s1, s2;
    for (int y = 1990; y < 2000; ++y) {
      const double gdp = 1e5 * std::pow(1.07, y - 1990) * (1.0 + 0.1 * (y % 3));
      g[y] = gdp;
      s1[y] = 0.3 * gdp;
      s2[y] = 4e-9 * gdp * gdp;
    }
    CHECK(elasticity_gamma(s1, g).exponent == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(elasticity_gamma(s2, g).exponent == doctest::Approx(2.0).epsilon(1e-12));

    // invariance under positive rescaling of either series
    std::map<int, double> g_scaled, s_scaled;
    for (auto [y, v] : g) g_scaled[y] = 123.0 * v;
    for (auto [y, v] : s2) s_scaled[y] = 1e-3 * v;
    CHECK(elasticity_gamma(s_scaled, g_scaled).exponent == doctest::Approx(2.0).epsilon(1e-12));

    std::map<int, double> short_s{{1990, 1.0}, {1991, 2.0}, {2005, 4.0}};
    CHECK(code_of([&] { elasticity_gamma(short_s, g); }) == ErrorCode::InsufficientOverlap);
    std::map<int, double> flat{{1990, 5.0}, {1991, 5.0}, {1992, 5.0}};
    CHECK(code_of([&] { elasticity_gamma(s1, flat); }) == ErrorCode::DegenerateAbscissa);
  }

  TEST_CASE("gamma_distribution summaries") {
    const auto ones = gamma_distribution(std::vector<double>{1, 1, 1});
    CHECK(ones.mean == 1.0);
    CHECK(ones.above_threshold == 0);
    const auto split = gamma_distribution(std::vector<double>{0.5, 2.5}, 2.0);
    CHECK(split.mean == doctest::Approx(1.5));
    CHECK(split.mean_excluding_outliers == doctest::Approx(0.5));
    CHECK(split.above_threshold == 1);
    double mass = 0.0;
    for (const auto& b : split.histogram) mass += b.density * (b.hi - b.lo);
    CHECK(mass == doctest::Approx(1.0));
  }

  TEST_CASE("strength correlation exponent: exact recoveries") {
    // star: s_centre * s_leaf = W * w_leaf, so nu = 1 whatever the binning
    std::vector<WeightedEdge> star;
    for (NodeId leaf = 1; leaf <= 40; ++leaf) star.push_back({0, leaf, std::pow(1.13, leaf)});
    const auto star_fit = strength_correlation_exponent(build_network(41, star));
    CHECK(star_fit.exponent == doctest::Approx(1.0).epsilon(1e-9));

    // disjoint links: s_i = s_j = w, so <s_i s_j> = w^2; one weight value per bin
    std::vector<WeightedEdge> matching;
    const std::size_t bins = 20;
    for (std::size_t k = 0; k < bins; ++k)
      for (int copy = 0; copy < 3; ++copy) {
        const auto base = static_cast<NodeId>(2 * (3 * k + copy));
        matching.push_back({base, base + 1, std::exp(0.3 * double(k))});
      }
    const auto fit = strength_correlation_exponent(build_network(6 * bins, matching), {bins, 0.0});
    CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.n_points == bins);
  }

  TEST_CASE("strength correlation exponent: MRWN-like weights give nu near 1") {
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> fitness(0.0, 1.0);
    const std::size_t n = 120;
    std::vector<double> x(n);
    double total = 0.0;
    for (auto& v : x) total += (v = fitness(rng));
    std::vector<WeightedEdge> edges;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) edges.push_back({i, j, x[i] * x[j] / total});
    const auto net = build_network(n, edges);
    const CorrelationOptions opts{20, 3.0};
    const auto fit = strength_correlation_exponent(net, opts);

    // oracle: independent binning + normal-equation regression
    const auto s = strength(net);
    double w_max = 0, w_min = 1e300;
    for (const auto& e : edges) w_max = std::max(w_max, e.weight), w_min = std::min(w_min, e.weight);
    const double lo = std::max(w_min, w_max * 1e-3);
    std::vector<double> wsum(20), psum(20), cnt(20);
    for (const auto& e : edges) {
      if (e.weight < lo) continue;
      int b = int((std::log(e.weight) - std::log(lo)) / ((std::log(w_max) - std::log(lo)) / 20));
      b = std::min(b, 19);
      wsum[b] += e.weight;
      psum[b] += s[e.u] * s[e.v];
      cnt[b] += 1;
    }
    std::vector<double> bx, by;
    for (int b = 0; b < 20; ++b)
      if (cnt[b] > 0) bx.push_back(wsum[b] / cnt[b]), by.push_back(psum[b] / cnt[b]);
    CHECK(fit.exponent == doctest::Approx(ols_slope(bx, by)).epsilon(1e-10));
    CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("strength correlation exponent errors") {
    std::vector<WeightedEdge> star{{0, 1, 2.0}, {0, 2, 2.0}, {0, 3, 2.0}};
    CHECK(code_of([&] { strength_correlation_exponent(build_network(4, star)); }) ==
          ErrorCode::DegenerateAbscissa);
    std::vector<WeightedEdge> few{{0, 1, 1.0}, {1, 2, 3.0}};
    CHECK(code_of([&] { strength_correlation_exponent(build_network(3, few)); }) ==
          ErrorCode::TooFewEdges);
  }

  TEST_CASE("strength degree exponent") {
    // unit weights: s = k
    std::mt19937_64 rng(8);
    std::vector<WeightedEdge> edges;
    for (NodeId i = 0; i < 60; ++i)
      for (NodeId j = i + 1; j < 60; ++j)
        if (rng() % 4 == 0) edges.push_back({i, j, 1.0});
    CHECK(strength_degree_exponent(build_network(60, edges)).exponent ==
          doctest::Approx(1.0).epsilon(1e-12));

    std::vector<std::size_t> k;
    std::vector<double> s;
    for (std::size_t deg : {1, 2, 4, 8})
      for (int copy = 0; copy < 3; ++copy) {
        k.push_back(deg);
        s.push_back(std::pow(double(deg), 3.0));
      }
    CHECK(strength_degree_exponent(k, s).exponent == doctest::Approx(3.0).epsilon(1e-12));

    const std::vector<std::size_t> two_classes{1, 2, 2};
    const std::vector<double> s2{1, 2, 2};
    CHECK(code_of([&] { strength_degree_exponent(two_classes, s2); }) ==
          ErrorCode::TooFewDegreeClasses);
  }

  TEST_CASE("tail exponent of exact Pareto quantiles") {
    const double tau = 1.92;
    const std::size_t n = 500;
    std::vector<double> x;
    for (std::size_t r = 1; r <= n; ++r) x.push_back(std::pow(double(r) / double(n), -1.0 / (tau - 1.0)));
    const auto fit = tail_exponent(x, 0.0);
    CHECK(fit.exponent == doctest::Approx(tau).epsilon(1e-12));
    const auto top = tail_exponent(x, 1.0);
    CHECK(top.exponent == doctest::Approx(tau).epsilon(1e-12));
    CHECK(top.x_max / top.x_min <= 10.0 + 1e-12);
  }
}
