#include "itn/richclub.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_set>

#include "itn/error.hpp"
#include "itn/random.hpp"
#include "itn/simd.hpp"

namespace itn {
namespace {

struct ClubSums {
  std::size_t members = 0;
  std::size_t links = 0;
  double weight = 0.0;
};

template <class InClub>
ClubSums club_sums(const WeightedNetwork& net, InClub in_club) {
  ClubSums out;
  for (NodeId i = 0; i < net.node_count(); ++i)
    if (in_club(i)) ++out.members;
  for (const auto& e : net.edges()) {
    if (in_club(e.u) && in_club(e.v)) {
      ++out.links;
      out.weight += e.weight;
    }
  }
  return out;
}

double pair_count(std::size_t n) {
  return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

/// Node ids grouped by equal strength, groups in descending strength order.
std::vector<std::vector<NodeId>> strength_groups(std::span<const double> s) {
  std::vector<NodeId> order(s.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return s[a] > s[b]; });
  std::vector<std::vector<NodeId>> groups;
  for (NodeId i : order) {
    if (groups.empty() || s[groups.back().front()] != s[i]) groups.emplace_back();
    groups.back().push_back(i);
  }
  return groups;
}

/// Walks clubs of decreasing strength threshold and returns the first one
/// whose intra-club weight reaches half the total: (club size, threshold).
std::pair<std::size_t, double> half_trade_club(const WeightedNetwork& net) {
  if (net.edge_count() == 0 || !(net.total_weight() > 0.0))
    throw Error(ErrorCode::EmptyNetwork, "network carries no weight");
  const auto s = strength(net);
  const double half = 0.5 * net.total_weight();
  std::vector<char> member(net.node_count(), 0);
  std::size_t size = 0;
  double inside = 0.0;
  for (const auto& group : strength_groups(s)) {
    for (NodeId i : group) member[i] = 1;
    for (NodeId i : group) {
      for (const auto& nb : net.neighbors(i)) {
        // links inside the group are seen twice; count them from the lower id
        if (!member[nb.node]) continue;
        const bool same_group = s[nb.node] == s[i];
        if (same_group && nb.node < i) continue;
        inside += net.edges()[nb.edge].weight;
      }
    }
    size += group.size();
    if (size >= 2 && inside >= half) return {size, s[group.front()]};
  }
  return {net.node_count(), 0.0};
}

}  // namespace

std::optional<double> phi_unweighted(const WeightedNetwork& net, std::size_t k) {
  const auto sums = club_sums(net, [&](NodeId i) { return net.degree(i) >= k; });
  if (sums.members < 2) return std::nullopt;
  return static_cast<double>(sums.links) / pair_count(sums.members);
}

std::optional<double> rw_weighted(const WeightedNetwork& net, std::span<const double> membership,
                                  double s_threshold) {
  const auto sums = club_sums(net, [&](NodeId i) { return membership[i] >= s_threshold; });
  if (sums.members < 2) return std::nullopt;
  return sums.weight / pair_count(sums.members);
}

std::optional<double> rw_weighted(const WeightedNetwork& net, double s_threshold) {
  const auto s = strength(net);
  return rw_weighted(net, s, s_threshold);
}

double fw_fraction(const WeightedNetwork& net, double s_threshold) {
  if (net.edge_count() == 0 || !(net.total_weight() > 0.0))
    throw Error(ErrorCode::EmptyNetwork, "network carries no weight");
  const auto s = strength(net);
  const auto sums = club_sums(net, [&](NodeId i) { return s[i] >= s_threshold; });
  return sums.weight / net.total_weight();
}

double half_trade_club_size(const WeightedNetwork& net) {
  return static_cast<double>(half_trade_club(net).first) / static_cast<double>(net.node_count());
}

double half_trade_strength_ratio(const WeightedNetwork& net) {
  const double threshold = half_trade_club(net).second;
  const auto s = strength(net);
  return threshold / *std::max_element(s.begin(), s.end());
}

std::vector<double> degree_thresholds(const WeightedNetwork& net) {
  std::vector<double> k;
  for (NodeId i = 0; i < net.node_count(); ++i) k.push_back(static_cast<double>(net.degree(i)));
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

std::vector<double> strength_thresholds(const WeightedNetwork& net) {
  std::vector<double> s;
  for (double v : strength(net))
    if (v > 0.0) s.push_back(v);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::vector<double> log_strength_thresholds(double s_max, std::size_t count, double lo_ratio) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = s_max;
    return out;
  }
  const double a = std::log(lo_ratio);
  for (std::size_t k = 0; k < count; ++k) {
    const double r = std::exp(a * (1.0 - static_cast<double>(k) / static_cast<double>(count - 1)));
    out[k] = (k + 1 == count) ? s_max : s_max * r;
  }
  return out;
}

RichClubCurve phi_curve(const WeightedNetwork& net, std::span<const double> k_thresholds) {
  RichClubCurve curve;
  for (double k : k_thresholds) {
    const auto sums = club_sums(net, [&](NodeId i) { return static_cast<double>(net.degree(i)) >= k; });
    curve.thresholds.push_back(k);
    curve.club_size.push_back(sums.members);
    curve.coefficient.push_back(sums.members < 2 ? std::nullopt
                                                 : std::optional<double>(static_cast<double>(sums.links) /
                                                                         pair_count(sums.members)));
  }
  return curve;
}

RichClubCurve rw_curve(const WeightedNetwork& net, std::span<const double> membership,
                       std::span<const double> s_thresholds) {
  RichClubCurve curve;
  for (double s : s_thresholds) {
    const auto sums = club_sums(net, [&](NodeId i) { return membership[i] >= s; });
    curve.thresholds.push_back(s);
    curve.club_size.push_back(sums.members);
    curve.coefficient.push_back(sums.members < 2
                                    ? std::nullopt
                                    : std::optional<double>(sums.weight / pair_count(sums.members)));
  }
  return curve;
}

RichClubCurve rw_curve(const WeightedNetwork& net, std::span<const double> s_thresholds) {
  const auto s = strength(net);
  return rw_curve(net, s, s_thresholds);
}

RichClubCurve fw_curve(const WeightedNetwork& net, std::span<const double> s_thresholds) {
  if (net.edge_count() == 0 || !(net.total_weight() > 0.0))
    throw Error(ErrorCode::EmptyNetwork, "network carries no weight");
  const auto s = strength(net);
  RichClubCurve curve;
  for (double threshold : s_thresholds) {
    const auto sums = club_sums(net, [&](NodeId i) { return s[i] >= threshold; });
    curve.thresholds.push_back(threshold);
    curve.club_size.push_back(sums.members);
    curve.coefficient.push_back(sums.weight / net.total_weight());
  }
  return curve;
}

MrnResult generate_mrn(const WeightedNetwork& net, std::uint64_t seed, double swap_factor,
                       double max_attempt_factor) {
  struct Link {
    NodeId a, b;
  };
  std::vector<Link> links;
  links.reserve(net.edge_count());
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * net.edge_count());
  for (const auto& e : net.edges()) {
    links.push_back({e.u, e.v});
    present.insert(pair_key(e.u, e.v));
  }

  MrnResult out;
  const auto target = static_cast<std::size_t>(std::llround(swap_factor * static_cast<double>(links.size())));
  const auto max_attempts = static_cast<std::size_t>(
      std::ceil(max_attempt_factor * static_cast<double>(std::max<std::size_t>(target, 1))));
  if (links.size() >= 2 && target > 0) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, links.size() - 1);
    std::bernoulli_distribution flip(0.5);
    while (out.accepted < target && out.attempts < max_attempts) {
      ++out.attempts;
      const std::size_t e1 = pick(rng);
      const std::size_t e2 = pick(rng);
      if (e1 == e2) continue;
      const NodeId a = links[e1].a, b = links[e1].b;
      NodeId c = links[e2].a, d = links[e2].b;
      if (flip(rng)) std::swap(c, d);
      // (a,b),(c,d) -> (a,d),(c,b)
      if (a == d || c == b) continue;
      if (present.contains(pair_key(a, d)) || present.contains(pair_key(c, b))) continue;
      present.erase(pair_key(a, b));
      present.erase(pair_key(c, d));
      present.insert(pair_key(a, d));
      present.insert(pair_key(c, b));
      links[e1] = {a, d};
      links[e2] = {c, b};
      ++out.accepted;
    }
  }

  std::vector<WeightedEdge> edges;
  edges.reserve(links.size());
  for (const auto& l : links) edges.push_back({l.a, l.b, 1.0});
  out.network = WeightedNetwork(net.node_count(), edges, net.labels());
  return out;
}

double adjacency_difference(const WeightedNetwork& a, const WeightedNetwork& b) {
  if (a.edge_count() == 0) return 0.0;
  std::size_t missing = 0;
  for (const auto& e : a.edges())
    if (!b.has_edge(e.u, e.v)) ++missing;
  return static_cast<double>(missing) / static_cast<double>(a.edge_count());
}

std::vector<double> mrwn_initial_weights(const WeightedNetwork& topology, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(topology.edge_count());
  for (double& v : w) v = uniform_open_closed(rng);
  return w;
}

MrwnResult balance_weights(const WeightedNetwork& topology, std::span<const double> targets,
                           std::span<const double> initial_weights, const MrwnOptions& opts) {
  const std::size_t n = topology.node_count();
  if (targets.size() != n)
    throw Error(ErrorCode::InvalidArgument, "target strength vector has " +
                                                std::to_string(targets.size()) + " entries for " +
                                                std::to_string(n) + " nodes");
  if (initial_weights.size() != topology.edge_count())
    throw Error(ErrorCode::InvalidArgument, "initial weight vector size mismatch");
  for (NodeId i = 0; i < n; ++i) {
    if (!(targets[i] >= 0.0) || !std::isfinite(targets[i]))
      throw Error(ErrorCode::InvalidArgument, "target strength of node " + std::to_string(i));
    if (targets[i] > 0.0 && topology.degree(i) == 0)
      throw Error(ErrorCode::IsolatedPositiveStrength,
                  "node " + topology.label(i) + " has s = " + std::to_string(targets[i]) +
                      " but no links");
    if (targets[i] == 0.0 && topology.degree(i) > 0)
      throw Error(ErrorCode::InvalidArgument,
                  "node " + topology.label(i) + " has links but zero target strength");
  }
  for (double w : initial_weights)
    if (!(w > 0.0)) throw Error(ErrorCode::NonPositiveWeight, "initial weights must be > 0");

  // Per-node rows of (initial weight, neighbour) for the gather kernel.
  std::vector<std::size_t> offsets(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + topology.degree(i);
  std::vector<double> row_weight(offsets[n]);
  std::vector<std::uint32_t> row_index(offsets[n]);
  for (NodeId i = 0; i < n; ++i) {
    std::size_t k = offsets[i];
    for (const auto& nb : topology.neighbors(i)) {
      row_weight[k] = initial_weights[nb.edge];
      row_index[k] = nb.node;
      ++k;
    }
  }

  const simd::KernelTable& kern = simd::table(simd::active_isa());
  auto row_sum = [&](NodeId i, const std::vector<double>& x) {
    const std::size_t b = offsets[i], len = offsets[i + 1] - b;
    return kern.gather_dot(row_weight.data() + b, row_index.data() + b, x.data(), len);
  };
  auto scaled_residual = [&](NodeId i, double current) {
    return std::abs(targets[i] - current) / std::max(targets[i], opts.floor);
  };

  std::vector<double> x(n, 1.0);
  MrwnResult out;
  out.residual = std::numeric_limits<double>::infinity();
  while (out.sweeps < opts.max_sweeps) {
    double worst_delta = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      if (offsets[i + 1] == offsets[i]) continue;
      const double rs = row_sum(i, x);
      worst_delta = std::max(worst_delta, scaled_residual(i, x[i] * rs));
      x[i] = targets[i] / rs;
    }
    ++out.sweeps;
    if (worst_delta < opts.tol) {
      double worst = 0.0;
      for (NodeId i = 0; i < n; ++i)
        if (offsets[i + 1] > offsets[i]) worst = std::max(worst, scaled_residual(i, x[i] * row_sum(i, x)));
      out.residual = worst;
      if (worst < opts.tol) break;
    }
  }

  std::vector<double> weights(topology.edge_count());
  const auto edges = topology.edges();
  for (std::size_t k = 0; k < weights.size(); ++k)
    weights[k] = initial_weights[k] * x[edges[k].u] * x[edges[k].v];
  out.network = topology.with_weights(weights);

  const auto s = strength(out.network);
  double worst = 0.0;
  for (NodeId i = 0; i < n; ++i) worst = std::max(worst, scaled_residual(i, s[i]));
  out.residual = worst;
  out.converged = worst < opts.tol;
  return out;
}

MrwnResult generate_mrwn(const WeightedNetwork& topology, std::span<const double> targets,
                         std::uint64_t seed, const MrwnOptions& opts) {
  const auto init = mrwn_initial_weights(topology, seed);
  MrwnResult result = balance_weights(topology, targets, init, opts);
  if (!result.converged)
    throw Error(ErrorCode::NonConvergence, "strength residual " + std::to_string(result.residual) +
                                               " after " + std::to_string(result.sweeps) + " sweeps");
  return result;
}

namespace {

struct MemberCurves {
  std::vector<std::optional<double>> phi;
  std::vector<std::optional<double>> rw;
  double adjacency_difference = 0.0;
};

NullEnsembleResult summarise(std::span<const double> thresholds, const RichClubCurve& original,
                             const std::vector<std::vector<std::optional<double>>>& members) {
  NullEnsembleResult out;
  out.ensemble_size = members.size();
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  out.original = original.coefficient;
  out.club_size = original.club_size;
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (const auto& m : members) {
      if (!m[t]) continue;
      sum += *m[t];
      sq += *m[t] * *m[t];
      ++n;
    }
    if (n == 0) {
      out.null_mean.push_back(std::nullopt);
      out.null_spread.push_back(0.0);
      out.rho.push_back(std::nullopt);
      continue;
    }
    const double mean = sum / static_cast<double>(n);
    out.null_mean.push_back(mean);
    out.null_spread.push_back(std::sqrt(std::max(0.0, sq / static_cast<double>(n) - mean * mean)));
    if (original.coefficient[t] && mean > 0.0)
      out.rho.push_back(*original.coefficient[t] / mean);
    else
      out.rho.push_back(std::nullopt);
  }
  return out;
}

}  // namespace

NullEnsembles null_ensemble_curves(const WeightedNetwork& net, const NullEnsembleOptions& opts) {
  if (opts.ensemble_size == 0) throw Error(ErrorCode::InvalidArgument, "ensemble size must be >= 1");
  const auto s = strength(net);
  const std::vector<double> k_grid = opts.degree_grid.empty() ? degree_thresholds(net) : opts.degree_grid;
  const std::vector<double> s_grid =
      opts.strength_grid.empty() ? log_strength_thresholds(*std::max_element(s.begin(), s.end()))
                                 : opts.strength_grid;

  const RichClubCurve phi_orig = phi_curve(net, k_grid);
  const RichClubCurve rw_orig = rw_curve(net, s, s_grid);

  std::vector<MemberCurves> members(opts.ensemble_size);
  std::vector<std::exception_ptr> failures(opts.ensemble_size);
  auto run_member = [&](std::size_t m) {
    try {
      const std::uint64_t member_seed = derive_seed(opts.seed, m);
      const MrnResult mrn = generate_mrn(net, derive_seed(member_seed, 0), opts.swap_factor);
      const MrwnResult mrwn = generate_mrwn(mrn.network, s, derive_seed(member_seed, 1), opts.mrwn);
      members[m].phi = phi_curve(mrn.network, k_grid).coefficient;
      members[m].rw = rw_curve(mrwn.network, s, s_grid).coefficient;
      members[m].adjacency_difference = adjacency_difference(net, mrn.network);
    } catch (...) {
      failures[m] = std::current_exception();
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(opts.threads, 1, opts.ensemble_size);
  if (threads == 1) {
    for (std::size_t m = 0; m < opts.ensemble_size; ++m) run_member(m);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t m = next++; m < opts.ensemble_size; m = next++) run_member(m);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<std::vector<std::optional<double>>> phi_members, rw_members;
  double adjacency = 0.0;
  for (auto& m : members) {
    phi_members.push_back(std::move(m.phi));
    rw_members.push_back(std::move(m.rw));
    adjacency += m.adjacency_difference;
  }

  NullEnsembles out;
  out.unweighted = summarise(k_grid, phi_orig, phi_members);
  out.weighted = summarise(s_grid, rw_orig, rw_members);
  out.mean_adjacency_difference = adjacency / static_cast<double>(opts.ensemble_size);
  return out;
}

}  // namespace itn
