#include "itn/gravity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itn/error.hpp"

namespace itn {
namespace {

// m^beta is rescaled in place after every transaction; recompute it from m
// this often to keep rounding from accumulating.
constexpr std::uint64_t kMassRefreshInterval = 4096;

}  // namespace

void validate(const SimConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (c.n_countries < 2) fail("n must be >= 2");
  if (c.n_countries > 65536) fail("n must be <= 65536");
  if (!std::isfinite(c.alpha) || !std::isfinite(c.beta) || !std::isfinite(c.theta))
    fail("exponents must be finite");
  if (!c.target_links && !(c.target_density > 0.0 && c.target_density <= 1.0))
    fail("target_density must be in (0, 1], got " + std::to_string(c.target_density));
  const std::size_t pairs = c.n_countries * (c.n_countries - 1) / 2;
  if (c.target_links && (*c.target_links == 0 || *c.target_links > pairs))
    fail("target_links must be in [1, " + std::to_string(pairs) + "]");
  if (!(c.drift_tol > 0.0)) fail("drift_tol must be > 0");
  if (c.max_transactions == 0) fail("max_transactions must be >= 1");
}

std::size_t target_link_count(const SimConfig& c) {
  if (c.target_links) return *c.target_links;
  const std::size_t pairs = c.n_countries * (c.n_countries - 1) / 2;
  const auto links = static_cast<std::size_t>(std::ceil(c.target_density * static_cast<double>(pairs)));
  return std::min(links, pairs);
}

GravityWorld::GravityWorld(const SimConfig& config)
    : config_(config), n_(config.n_countries), rng_(config.seed), isa_(simd::active_isa()),
      kern_(&simd::table(isa_)) {
  validate(config_);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  positions_.reserve(n_);
  while (positions_.size() < n_) {
    const Point p{unit(rng_), unit(rng_)};
    const bool clash = std::any_of(positions_.begin(), positions_.end(),
                                   [&](const Point& q) { return q.x == p.x && q.y == p.y; });
    if (!clash) positions_.push_back(p);
  }
  m_.resize(n_);
  for (double& v : m_) v = uniform_open_closed(rng_);
  const double total = kern_->sum(m_.data(), n_);
  kern_->scale(m_.data(), n_, 1.0 / total);
  build_kernel_matrix();
  refresh_mass_weights();
  weight_.assign(n_ * (n_ - 1) / 2, 0.0);
  count_.assign(weight_.size(), 0);
}

GravityWorld::GravityWorld(const SimConfig& config, std::vector<Point> positions,
                           std::vector<double> gdp)
    : config_(config), n_(config.n_countries), rng_(config.seed), isa_(simd::active_isa()),
      kern_(&simd::table(isa_)), positions_(std::move(positions)), m_(std::move(gdp)) {
  validate(config_);
  if (positions_.size() != n_ || m_.size() != n_)
    throw Error(ErrorCode::InvalidConfig, "positions/gdp must have n entries");
  for (double v : m_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "gdp must be >= 0");
  const double total = kern_->sum(m_.data(), n_);
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidConfig, "total gdp must be > 0");
  kern_->scale(m_.data(), n_, 1.0 / total);
  build_kernel_matrix();
  refresh_mass_weights();
  weight_.assign(n_ * (n_ - 1) / 2, 0.0);
  count_.assign(weight_.size(), 0);
}

void GravityWorld::build_kernel_matrix() {
  distance_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (k == i) continue;
      const double l = std::hypot(positions_[i].x - positions_[k].x, positions_[i].y - positions_[k].y);
      if (!(l > 0.0))
        throw Error(ErrorCode::CoincidentPoints,
                    "nodes " + std::to_string(i) + " and " + std::to_string(k) + " coincide");
      distance_[i * n_ + k] = std::pow(l, -config_.theta);
    }
  }
}

void GravityWorld::refresh_mass_weights() {
  if (config_.beta == 1.0) return;
  m_beta_.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) m_beta_[k] = std::pow(m_[k], config_.beta);
}

double GravityWorld::gravity_flow(NodeId i, NodeId j) const {
  const auto mb = mass_weights();
  const double* row = distance_.data() + static_cast<std::size_t>(i) * n_;
  const double denominator = kern_->dot(row, mb.data(), n_);
  if (!(denominator > 0.0)) return 0.0;
  // the j term is part of the denominator, so the ratio never exceeds one
  const double share = (mb[j] * row[j]) / denominator;
  return std::pow(m_[i], config_.alpha) * share;
}

TransactionOutcome GravityWorld::transact(NodeId i, NodeId j, double epsilon) {
  TransactionOutcome out;
  out.i = i;
  out.j = j;
  out.epsilon = epsilon;
  out.m_i_pre = m_[i];
  out.m_j_pre = m_[j];
  out.f_ij = gravity_flow(i, j);
  out.f_ji = gravity_flow(j, i);
  out.f_tilde = out.f_ij + out.f_ji;
  // no debt: top up whatever the investment exceeds the current balance by
  out.delta_i = out.f_ij > out.m_i_pre ? out.f_ij - out.m_i_pre : 0.0;
  out.delta_j = out.f_ji > out.m_j_pre ? out.f_ji - out.m_j_pre : 0.0;

  m_[i] = out.m_i_pre - out.f_ij + epsilon * out.f_tilde + out.delta_i;
  m_[j] = out.m_j_pre - out.f_ji + (1.0 - epsilon) * out.f_tilde + out.delta_j;

  const double total = kern_->sum(m_.data(), n_);
  const double factor = 1.0 / total;
  kern_->scale(m_.data(), n_, factor);
  ++t_;
  if (config_.beta != 1.0) {
    if (t_ % kMassRefreshInterval == 0) {
      refresh_mass_weights();
    } else {
      kern_->scale(m_beta_.data(), n_, std::pow(factor, config_.beta));
      m_beta_[i] = std::pow(m_[i], config_.beta);
      m_beta_[j] = std::pow(m_[j], config_.beta);
    }
  }

  const std::size_t slot = pair_slot(i, j);
  if (out.f_tilde > 0.0) {
    if (count_[slot] == 0) ++links_;
    ++count_[slot];
    weight_[slot] += out.f_tilde;
    accumulated_ += out.f_tilde;
  }
  return out;
}

TransactionOutcome GravityWorld::transact() {
  std::uniform_int_distribution<std::size_t> first(0, n_ - 1);
  std::uniform_int_distribution<std::size_t> second(0, n_ - 2);
  const auto i = static_cast<NodeId>(first(rng_));
  auto j = static_cast<NodeId>(second(rng_));
  if (j >= i) ++j;
  const double epsilon = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  return transact(i, j, epsilon);
}

double GravityWorld::mean_m2() const {
  return kern_->sum_squares(m_.data(), n_) / static_cast<double>(n_);
}

void GravityWorld::reset_links() {
  std::fill(weight_.begin(), weight_.end(), 0.0);
  std::fill(count_.begin(), count_.end(), 0u);
  links_ = 0;
  accumulated_ = 0.0;
}

WeightedNetwork GravityWorld::network() const {
  std::vector<WeightedEdge> edges;
  edges.reserve(links_);
  for (NodeId i = 0; i < n_; ++i)
    for (NodeId j = i + 1; j < n_; ++j) {
      const std::size_t slot = pair_slot(i, j);
      if (count_[slot] > 0) edges.push_back({i, j, weight_[slot]});
    }
  return WeightedNetwork(n_, edges);
}

StationarityReport run_to_stationarity(GravityWorld& world, std::size_t window, double drift_tol) {
  const SimConfig& c = world.config();
  if (window == 0) window = c.burn_in_window ? c.burn_in_window : 1000 * c.n_countries;
  if (!(drift_tol > 0.0)) drift_tol = c.drift_tol;

  StationarityReport report;
  report.last_drift = std::numeric_limits<double>::infinity();
  std::optional<double> previous;
  const std::uint64_t start = world.transactions();
  for (;;) {
    double acc = 0.0;
    for (std::size_t k = 0; k < window; ++k) {
      if (world.transactions() >= c.max_transactions)
        throw Error(ErrorCode::BudgetExhausted,
                    "stationarity not reached after " + std::to_string(world.transactions()) +
                        " transactions (last drift " + std::to_string(report.last_drift) + ")");
      world.transact();
      acc += world.mean_m2();
    }
    const double mean = acc / static_cast<double>(window);
    world.trace().push_back({world.transactions(), mean});
    ++report.windows;
    if (previous) {
      report.last_drift = *previous > 0.0 ? std::abs(mean - *previous) / *previous : 0.0;
      if (report.last_drift < drift_tol) break;
    }
    previous = mean;
  }
  report.transactions = world.transactions() - start;
  world.reset_links();
  return report;
}

ModelNetwork run_to_density(GravityWorld& world) {
  const SimConfig& c = world.config();
  const std::size_t target = target_link_count(c);
  const std::uint64_t start = world.transactions();
  while (world.link_count() < target) {
    if (world.transactions() >= c.max_transactions)
      throw Error(ErrorCode::BudgetExhausted,
                  std::to_string(world.link_count()) + " of " + std::to_string(target) +
                      " links after " + std::to_string(world.transactions()) + " transactions");
    world.transact();
  }
  ModelNetwork out;
  out.network = world.network();
  out.gdp.assign(world.gdp().begin(), world.gdp().end());
  out.transactions = world.transactions() - start;
  return out;
}

ModelObservables model_observables(const WeightedNetwork& network, std::span<const double> gdp,
                                   const ObservableOptions& opts) {
  ModelObservables out;
  std::vector<double> weights;
  weights.reserve(network.edge_count());
  for (const auto& e : network.edges()) weights.push_back(e.weight);

  auto attempt = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      out.failures.push_back(std::string(name) + ": " + e.what());
    }
  };
  attempt("collapse", [&] {
    out.collapse = collapse_curve(weights, opts.collapse);
    out.parabola_gof =
        parabola_gof(*out.collapse, opts.gof_max_abs_x_sigmas * out.collapse->params.sigma);
  });
  attempt("gdp_tail", [&] { out.gdp_tail = tail_exponent(gdp, opts.gdp_tail_decades); });
  attempt("nu", [&] { out.nu = strength_correlation_exponent(network, opts.correlation); });
  return out;
}

}  // namespace itn
