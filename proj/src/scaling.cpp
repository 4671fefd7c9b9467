#include "itn/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "itn/error.hpp"

namespace itn {
namespace {

void require_positive(std::span<const double> values, const char* what) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0) || !std::isfinite(values[k]))
      throw Error(ErrorCode::NonPositiveSample, std::string(what) + "[" + std::to_string(k) +
                                                    "] = " + std::to_string(values[k]));
  }
}

}  // namespace

LogNormalParams lognormal_params(std::span<const double> weights) {
  if (weights.size() < 2)
    throw Error(ErrorCode::TooFewSamples, "need >= 2 samples, got " + std::to_string(weights.size()));
  require_positive(weights, "weight");

  std::vector<double> logs(weights.size());
  std::transform(weights.begin(), weights.end(), logs.begin(), [](double w) { return std::log(w); });
  const auto [lo, hi] = std::minmax_element(logs.begin(), logs.end());
  if (*lo == *hi) return {weights.front(), 0.0};

  const double n = static_cast<double>(logs.size());
  const double mean = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
  double ss = 0.0;
  for (double l : logs) ss += (l - mean) * (l - mean);
  return {std::exp(mean), std::sqrt(ss / n)};
}

CollapseCurve collapse_curve(std::span<const double> weights, const CollapseOptions& opts) {
  const LogNormalParams params = lognormal_params(weights);
  if (params.sigma == 0.0) throw Error(ErrorCode::DegenerateSigma, "all weights are equal");
  if (opts.n_bins == 0) throw Error(ErrorCode::TooFewBins, "n_bins = 0");

  std::vector<double> logs(weights.size());
  std::transform(weights.begin(), weights.end(), logs.begin(), [](double w) { return std::log(w); });
  const auto [lo_it, hi_it] = std::minmax_element(logs.begin(), logs.end());
  const double lo = *lo_it;
  const double width = (*hi_it - lo) / static_cast<double>(opts.n_bins);

  std::vector<std::size_t> counts(opts.n_bins, 0);
  for (double l : logs) {
    auto bin = static_cast<std::size_t>((l - lo) / width);
    ++counts[std::min(bin, opts.n_bins - 1)];
  }

  const double n = static_cast<double>(logs.size());
  const double two_var = 2.0 * params.sigma * params.sigma;
  const double norm = std::sqrt(std::numbers::pi * two_var);
  const double log_w0 = std::log(params.w0);

  CollapseCurve curve{params, {}};
  for (std::size_t b = 0; b < opts.n_bins; ++b) {
    if (counts[b] == 0 || counts[b] < opts.min_count) continue;
    const double centre = lo + (static_cast<double>(b) + 0.5) * width;
    const double density = static_cast<double>(counts[b]) / (n * width);
    curve.points.push_back({centre - log_w0, -two_var * std::log(density * norm), counts[b]});
  }
  return curve;
}

CollapseCurve collapse_transform(std::span<const double> log_w, std::span<const double> density,
                                 const LogNormalParams& params) {
  if (log_w.size() != density.size())
    throw Error(ErrorCode::InvalidArgument, "abscissa and density sizes differ");
  if (params.sigma == 0.0) throw Error(ErrorCode::DegenerateSigma, "sigma = 0");
  const double two_var = 2.0 * params.sigma * params.sigma;
  const double norm = std::sqrt(std::numbers::pi * two_var);
  const double log_w0 = std::log(params.w0);

  CollapseCurve curve{params, {}};
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    if (!(density[k] > 0.0)) continue;
    curve.points.push_back({log_w[k] - log_w0, -two_var * std::log(density[k] * norm), 0});
  }
  return curve;
}

double parabola_gof(const CollapseCurve& curve, double max_abs_x) {
  double ss = 0.0;
  std::size_t used = 0;
  for (const auto& p : curve.points) {
    if (std::abs(p.x) > max_abs_x) continue;
    const double r = p.y - p.x * p.x;
    ss += r * r;
    ++used;
  }
  if (used < 3) throw Error(ErrorCode::TooFewBins, std::to_string(used) + " usable bins");
  return ss / static_cast<double>(used);
}

PowerLawFit log_log_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "x and y sizes differ");
  if (x.size() < 2)
    throw Error(ErrorCode::TooFewSamples, "need >= 2 points, got " + std::to_string(x.size()));
  require_positive(x, "x");
  require_positive(y, "y");

  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t k = 0; k < n; ++k) {
    lx[k] = std::log(x[k]);
    ly[k] = std::log(y[k]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  if (sxx == 0.0 || *xlo == *xhi)
    throw Error(ErrorCode::DegenerateAbscissa, "all abscissa values equal");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.x_min = *xlo;
  fit.x_max = *xhi;
  fit.n_points = n;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = ly[k] - fit.intercept - fit.exponent * lx[k];
      ssr += r * r;
    }
    fit.std_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

PowerLawFit elasticity_gamma(const std::map<int, double>& strength_by_year,
                             const std::map<int, double>& gdp_by_year) {
  std::vector<double> g, s;
  for (const auto& [year, sv] : strength_by_year) {
    auto it = gdp_by_year.find(year);
    if (it == gdp_by_year.end() || !(sv > 0.0) || !(it->second > 0.0)) continue;
    g.push_back(it->second);
    s.push_back(sv);
  }
  if (g.size() < 3)
    throw Error(ErrorCode::InsufficientOverlap, std::to_string(g.size()) + " common years");
  return log_log_fit(g, s);
}

GammaSummary gamma_distribution(std::span<const double> gammas, double threshold,
                                std::size_t n_bins) {
  GammaSummary out;
  out.threshold = threshold;
  if (gammas.empty()) throw Error(ErrorCode::TooFewSamples, "no fits");

  double total = 0.0, kept = 0.0;
  std::size_t n_kept = 0;
  for (double g : gammas) {
    total += g;
    if (g > threshold) {
      ++out.above_threshold;
    } else {
      kept += g;
      ++n_kept;
    }
  }
  out.mean = total / static_cast<double>(gammas.size());
  out.mean_excluding_outliers =
      n_kept ? kept / static_cast<double>(n_kept) : std::numeric_limits<double>::quiet_NaN();

  n_bins = std::max<std::size_t>(n_bins, 1);
  const auto [lo_it, hi_it] = std::minmax_element(gammas.begin(), gammas.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  for (double g : gammas)
    ++counts[std::min(static_cast<std::size_t>((g - lo) / width), n_bins - 1)];
  const double n = static_cast<double>(gammas.size());
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double a = lo + static_cast<double>(b) * width;
    out.histogram.push_back({a, a + width, static_cast<double>(counts[b]) / (n * width), counts[b]});
  }
  return out;
}

PowerLawFit strength_correlation_exponent(const WeightedNetwork& net,
                                          const CorrelationOptions& opts) {
  if (net.edge_count() == 0) throw Error(ErrorCode::TooFewEdges, "no links");
  const auto s = strength(net);

  double w_min = std::numeric_limits<double>::infinity(), w_max = 0.0;
  for (const auto& e : net.edges()) {
    w_min = std::min(w_min, e.weight);
    w_max = std::max(w_max, e.weight);
  }
  if (w_min == w_max) throw Error(ErrorCode::DegenerateAbscissa, "all link weights equal");
  const std::size_t n_bins = std::max<std::size_t>(opts.n_bins, 2);
  if (net.edge_count() < n_bins)
    throw Error(ErrorCode::TooFewEdges, std::to_string(net.edge_count()) + " links for " +
                                            std::to_string(n_bins) + " bins");

  const double lo = opts.decades > 0.0 ? std::max(w_min, w_max * std::pow(10.0, -opts.decades))
                                       : w_min;
  const double log_lo = std::log(lo);
  const double width = (std::log(w_max) - log_lo) / static_cast<double>(n_bins);

  std::vector<double> w_sum(n_bins, 0.0), prod_sum(n_bins, 0.0);
  std::vector<std::size_t> counts(n_bins, 0);
  for (const auto& e : net.edges()) {
    if (e.weight < lo) continue;
    auto bin = static_cast<std::size_t>((std::log(e.weight) - log_lo) / width);
    bin = std::min(bin, n_bins - 1);
    w_sum[bin] += e.weight;
    prod_sum[bin] += s[e.u] * s[e.v];
    ++counts[bin];
  }

  std::vector<double> x, y;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (counts[b] == 0) continue;
    x.push_back(w_sum[b] / static_cast<double>(counts[b]));
    y.push_back(prod_sum[b] / static_cast<double>(counts[b]));
  }
  return log_log_fit(x, y);
}

PowerLawFit strength_degree_exponent(std::span<const std::size_t> degrees,
                                     std::span<const double> strengths) {
  if (degrees.size() != strengths.size())
    throw Error(ErrorCode::InvalidArgument, "degree and strength sizes differ");
  std::map<std::size_t, std::pair<double, std::size_t>> classes;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] == 0) continue;
    auto& [sum, count] = classes[degrees[i]];
    sum += strengths[i];
    ++count;
  }
  if (classes.size() < 3)
    throw Error(ErrorCode::TooFewDegreeClasses, std::to_string(classes.size()) + " degree classes");
  std::vector<double> k, sk;
  for (const auto& [deg, acc] : classes) {
    k.push_back(static_cast<double>(deg));
    sk.push_back(acc.first / static_cast<double>(acc.second));
  }
  return log_log_fit(k, sk);
}

PowerLawFit strength_degree_exponent(const WeightedNetwork& net) {
  const auto k = degree_sequence(net);
  const auto s = strength(net);
  return strength_degree_exponent(k, s);
}

PowerLawFit tail_exponent(std::span<const double> samples, double decades) {
  std::vector<double> sorted;
  sorted.reserve(samples.size());
  for (double v : samples)
    if (v > 0.0) sorted.push_back(v);
  if (sorted.size() < 3)
    throw Error(ErrorCode::TooFewSamples, std::to_string(sorted.size()) + " positive samples");
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  const double cut = decades > 0.0 ? sorted.front() * std::pow(10.0, -decades) : 0.0;
  const double n = static_cast<double>(sorted.size());
  std::vector<double> x, ccdf;
  for (std::size_t r = 0; r < sorted.size() && sorted[r] >= cut; ++r) {
    x.push_back(sorted[r]);
    ccdf.push_back(static_cast<double>(r + 1) / n);
  }
  if (x.size() < 3)
    throw Error(ErrorCode::TooFewSamples, std::to_string(x.size()) + " samples in the tail");
  PowerLawFit fit = log_log_fit(x, ccdf);
  fit.exponent = 1.0 - fit.exponent;
  return fit;
}

}  // namespace itn
