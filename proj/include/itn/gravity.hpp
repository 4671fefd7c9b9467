#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itn/network.hpp"
#include "itn/random.hpp"
#include "itn/scaling.hpp"
#include "itn/simd.hpp"

namespace itn {

struct SimConfig {
  std::size_t n_countries = 187;
  double alpha = 0.5;
  double beta = 1.0;
  double theta = 0.5;
  double target_density = 0.59;
  std::optional<std::size_t> target_links;  // overrides target_density when set
  std::uint64_t seed = 1;
  std::size_t burn_in_window = 0;  // transactions per stationarity window; 0 means 1000 * N
  double drift_tol = 1e-3;
  std::uint64_t max_transactions = 1'000'000'000;
};

/// Throws InvalidConfig.
void validate(const SimConfig& config);

/// ceil(target_density * N(N-1)/2), or target_links when given.
std::size_t target_link_count(const SimConfig& config);

struct Point {
  double x;
  double y;
};

struct TransactionOutcome {
  NodeId i = 0;
  NodeId j = 0;
  double f_ij = 0.0;
  double f_ji = 0.0;
  double f_tilde = 0.0;
  double epsilon = 0.0;
  double delta_i = 0.0;
  double delta_j = 0.0;
  double m_i_pre = 0.0;
  double m_j_pre = 0.0;
};

struct TracePoint {
  std::uint64_t t;
  double mean_m2;  // window average of <m^2>
};

/// World state of the gravity exchange model: N capitals at random points of
/// the unit square, GDP shares m summing to one, and the investment
/// accumulated on every pair since the last reset.
class GravityWorld {
public:
  /// Uniform positions (re-drawn on exact coincidence) and uniform m, normalised.
  explicit GravityWorld(const SimConfig& config);

  /// Fixed geometry and GDP shares; m is normalised. Throws CoincidentPoints.
  GravityWorld(const SimConfig& config, std::vector<Point> positions, std::vector<double> gdp);

  const SimConfig& config() const noexcept { return config_; }
  std::size_t size() const noexcept { return n_; }
  std::span<const Point> positions() const noexcept { return positions_; }
  std::span<const double> gdp() const noexcept { return m_; }
  std::uint64_t transactions() const noexcept { return t_; }
  simd::Isa isa() const noexcept { return isa_; }

  /// m_i^alpha * (m_j^beta / l_ij^theta) / sum_{k != i} m_k^beta / l_ik^theta.
  double gravity_flow(NodeId i, NodeId j) const;

  /// One exchange between i and j with a given sharing fraction.
  TransactionOutcome transact(NodeId i, NodeId j, double epsilon);
  /// One exchange on a uniformly drawn unordered pair with a fresh epsilon.
  TransactionOutcome transact();

  /// <m^2> = sum_i m_i^2 / N.
  double mean_m2() const;

  double pair_weight(NodeId i, NodeId j) const { return weight_[pair_slot(i, j)]; }
  std::uint32_t pair_transactions(NodeId i, NodeId j) const { return count_[pair_slot(i, j)]; }
  std::size_t link_count() const noexcept { return links_; }
  double accumulated_weight() const noexcept { return accumulated_; }
  void reset_links();

  /// Pairs that traded since the last reset, weighted by their accumulated investment.
  WeightedNetwork network() const;

  std::vector<TracePoint>& trace() noexcept { return trace_; }
  const std::vector<TracePoint>& trace() const noexcept { return trace_; }

private:
  std::size_t pair_slot(NodeId i, NodeId j) const noexcept {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i + 1) / 2 + (j - i - 1);
  }
  std::span<const double> mass_weights() const noexcept {
    return config_.beta == 1.0 ? std::span<const double>(m_) : std::span<const double>(m_beta_);
  }
  void build_kernel_matrix();
  void refresh_mass_weights();

  SimConfig config_;
  std::size_t n_ = 0;
  Rng rng_;
  simd::Isa isa_;
  const simd::KernelTable* kern_;
  std::vector<Point> positions_;
  std::vector<double> m_;
  std::vector<double> m_beta_;    // m^beta, maintained only when beta != 1
  std::vector<double> distance_;  // row-major l_ik^-theta, zero diagonal
  std::vector<double> weight_;    // upper-triangle pair accumulators
  std::vector<std::uint32_t> count_;
  std::size_t links_ = 0;
  double accumulated_ = 0.0;
  std::uint64_t t_ = 0;
  std::vector<TracePoint> trace_;
};

struct StationarityReport {
  std::uint64_t transactions = 0;  // spent in this phase
  std::size_t windows = 0;
  double last_drift = 0.0;
};

/// Transacts in windows until the window-averaged <m^2> of two consecutive
/// windows differs by less than drift_tol (relative), then clears the pair
/// accumulators. window = 0 uses the configured burn-in window.
/// Throws BudgetExhausted when max_transactions is hit first.
StationarityReport run_to_stationarity(GravityWorld& world, std::size_t window = 0,
                                       double drift_tol = -1.0);

struct ModelNetwork {
  WeightedNetwork network;
  std::vector<double> gdp;
  std::uint64_t transactions = 0;  // spent in this phase
};

/// Keeps transacting until target_link_count distinct pairs have traded.
/// Throws BudgetExhausted.
ModelNetwork run_to_density(GravityWorld& world);

struct ObservableOptions {
  CollapseOptions collapse;
  double gof_max_abs_x_sigmas = 2.0;  // fit window |x| <= this * sigma
  double gdp_tail_decades = 1.0;
  CorrelationOptions correlation;
};

struct ModelObservables {
  std::optional<CollapseCurve> collapse;
  std::optional<double> parabola_gof;
  std::optional<PowerLawFit> gdp_tail;
  std::optional<PowerLawFit> nu;
  std::vector<std::string> failures;  // "<observable>: <error>" for each one that failed
};

ModelObservables model_observables(const WeightedNetwork& network, std::span<const double> gdp,
                                   const ObservableOptions& opts = {});

}  // namespace itn
