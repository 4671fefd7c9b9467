#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "itn/network.hpp"

namespace itn {

struct LogNormalParams {
  double w0 = 1.0;     // exp(<ln w>)
  double sigma = 0.0;  // std of ln w (population moments)
};

struct CollapsePoint {
  double x;  // ln(w / w0) at the bin centre
  double y;  // -2 sigma^2 ln[ Prob{ln w} sqrt(2 pi sigma^2) ]
  std::size_t count;
};

struct CollapseCurve {
  LogNormalParams params;
  std::vector<CollapsePoint> points;
};

struct CollapseOptions {
  std::size_t n_bins = 40;
  std::size_t min_count = 10;
};

/// Least-squares line through (ln x, ln y).
struct PowerLawFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n_points = 0;
};

/// Throws NonPositiveSample, TooFewSamples (< 2).
LogNormalParams lognormal_params(std::span<const double> weights);

/// Histogram of ln w on n_bins uniform bins over [min ln w, max ln w],
/// normalised to a density in ln w, then mapped onto the parabola
/// coordinates. Bins with fewer than min_count samples are dropped.
/// Throws DegenerateSigma when every sample is equal.
CollapseCurve collapse_curve(std::span<const double> weights, const CollapseOptions& opts = {});

/// The same transform applied to a density of ln w that is already known
/// (e.g. evaluated analytically) at the given ln w positions.
CollapseCurve collapse_transform(std::span<const double> log_w, std::span<const double> density,
                                 const LogNormalParams& params);

/// Mean squared residual of y against x^2 over points with |x| <= max_abs_x.
/// Throws TooFewBins when fewer than 3 points qualify.
double parabola_gof(const CollapseCurve& curve,
                    double max_abs_x = std::numeric_limits<double>::infinity());

/// OLS of ln y on ln x. Throws TooFewSamples (< 2 points), NonPositiveSample,
/// DegenerateAbscissa (all x equal).
PowerLawFit log_log_fit(std::span<const double> x, std::span<const double> y);

/// s proportional to G^gamma over the years both series share (s, G > 0).
/// Throws InsufficientOverlap (< 3 common years), DegenerateAbscissa.
PowerLawFit elasticity_gamma(const std::map<int, double>& strength_by_year,
                             const std::map<int, double>& gdp_by_year);

struct HistogramBin {
  double lo;
  double hi;
  double density;
  std::size_t count;
};

struct GammaSummary {
  std::vector<HistogramBin> histogram;
  double mean = 0.0;
  double mean_excluding_outliers = 0.0;  // NaN when every value is an outlier
  std::size_t above_threshold = 0;
  double threshold = 2.0;
};

GammaSummary gamma_distribution(std::span<const double> gammas, double threshold = 2.0,
                                std::size_t n_bins = 20);

struct CorrelationOptions {
  std::size_t n_bins = 20;
  // Fit only the top `decades` decades of link weight; <= 0 keeps all.
  double decades = 3.0;
};

/// <s_i s_j> against w_ij: per-edge products binned logarithmically in w,
/// bin means fitted on log-log axes. Exponent is nu.
/// Throws DegenerateAbscissa (single weight value), TooFewEdges (L < n_bins).
PowerLawFit strength_correlation_exponent(const WeightedNetwork& net,
                                          const CorrelationOptions& opts = {});

/// <s(k)> against k over realised degree classes (k >= 1). Exponent is mu.
/// Throws TooFewDegreeClasses (< 3 classes).
PowerLawFit strength_degree_exponent(const WeightedNetwork& net);
PowerLawFit strength_degree_exponent(std::span<const std::size_t> degrees,
                                     std::span<const double> strengths);

/// Exponent tau of a density p(x) ~ x^-tau, from a least-squares fit of the
/// complementary cumulative distribution over the top `decades` of the sample.
/// Returned exponent is tau = 1 - (CCDF slope).
PowerLawFit tail_exponent(std::span<const double> samples, double decades = 1.0);

}  // namespace itn
