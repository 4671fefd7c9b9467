#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "itn/error.hpp"
#include "itn/random.hpp"
#include "itn/richclub.hpp"

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

WeightedNetwork triangle() {
  const std::vector<WeightedEdge> e{{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}};
  return build_network(3, e);
}

WeightedNetwork complete(std::size_t n, double w = 1.0) {
  std::vector<WeightedEdge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.push_back({i, j, w});
  return build_network(n, e);
}

WeightedNetwork star(std::size_t leaves) {
  std::vector<WeightedEdge> e;
  for (NodeId l = 1; l <= leaves; ++l) e.push_back({0, l, 1.0});
  return build_network(leaves + 1, e);
}

WeightedNetwork random_weighted(std::uint64_t seed, std::size_t n, double p) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution link(p);
  std::lognormal_distribution<double> w(0.0, 1.5);
  std::vector<WeightedEdge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (link(rng)) e.push_back({i, j, w(rng)});
  return build_network(n, e);
}

// Literal edge-level balancing step: w_ij += delta_i * w_ij / sum_j w_ij for
// every node in ascending order, weights held once per edge.
void literal_sweep(const WeightedNetwork& topo, std::span<const double> targets,
                   std::vector<double>& w) {
  for (NodeId i = 0; i < topo.node_count(); ++i) {
    if (topo.degree(i) == 0) continue;
    double sum = 0.0;
    for (const auto& nb : topo.neighbors(i)) sum += w[nb.edge];
    const double delta = targets[i] - sum;
    for (const auto& nb : topo.neighbors(i)) w[nb.edge] += delta * (w[nb.edge] / sum);
  }
}

}  // namespace

TEST_SUITE("richclub") {
  TEST_CASE("phi_unweighted") {
    CHECK(phi_unweighted(complete(4), 1) == 1.0);
    CHECK(phi_unweighted(star(3), 1) == doctest::Approx(0.5));
    CHECK_FALSE(phi_unweighted(star(3), 2).has_value());
  }

  TEST_CASE("rw_weighted on the triangle") {
    const auto t = triangle();
    CHECK(rw_weighted(t, 4.0) == doctest::Approx(3.0));
    CHECK(rw_weighted(t, 0.0) == doctest::Approx(2.0 * 6.0 / (3.0 * 2.0)));
    CHECK_FALSE(rw_weighted(t, 6.0).has_value());
    const auto net = random_weighted(5, 30, 0.3);
    CHECK(*rw_weighted(net, 0.0) ==
          doctest::Approx(2.0 * net.total_weight() / (30.0 * 29.0)).epsilon(1e-12));
  }

  TEST_CASE("fw_fraction") {
    const auto t = triangle();
    CHECK(fw_fraction(t, 4.0) == doctest::Approx(0.5));
    CHECK(fw_fraction(t, 0.0) == 1.0);
    CHECK(code_of([] { fw_fraction(WeightedNetwork(3, {}), 0.0); }) == ErrorCode::EmptyNetwork);
  }

  TEST_CASE("half-trade club size") {
    const std::vector<WeightedEdge> one{{0, 1, 3.0}};
    CHECK(half_trade_club_size(build_network(2, one)) == 1.0);
    // s = [4,3,5]: club {2,0} holds w02 = 3 = half of 6
    CHECK(half_trade_club_size(triangle()) == doctest::Approx(2.0 / 3.0));
    CHECK(half_trade_strength_ratio(triangle()) == doctest::Approx(4.0 / 5.0));
    // brute force over thresholds on random networks
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto net = random_weighted(seed, 40, 0.4);
      const auto s = strength(net);
      std::vector<double> sorted(s);
      std::sort(sorted.rbegin(), sorted.rend());
      double expected = 1.0;
      for (double threshold : sorted) {
        std::size_t members = 0;
        for (double v : s) members += v >= threshold;
        if (members >= 2 && fw_fraction(net, threshold) >= 0.5) {
          expected = double(members) / 40.0;
          break;
        }
      }
      CHECK(half_trade_club_size(net) == doctest::Approx(expected));
    }
  }

  TEST_CASE("property: nested clubs, monotone f_w, flat R_w on uniform complete graphs") {
    const auto net = random_weighted(17, 60, 0.5);
    const auto s = strength(net);
    const auto grid = log_strength_thresholds(*std::max_element(s.begin(), s.end()));
    const auto fw = fw_curve(net, grid);
    const auto rw = rw_curve(net, grid);
    for (std::size_t t = 1; t < grid.size(); ++t) {
      CHECK(grid[t] > grid[t - 1]);
      CHECK(*fw.coefficient[t] <= *fw.coefficient[t - 1]);
      CHECK(rw.club_size[t] <= rw.club_size[t - 1]);
    }
    const auto phi = phi_curve(net, degree_thresholds(net));
    for (std::size_t t = 1; t < phi.club_size.size(); ++t) CHECK(phi.club_size[t] <= phi.club_size[t - 1]);

    const auto k7 = complete(7, 2.5);
    const auto flat = rw_curve(k7, std::vector<double>{0.0, 1.0, 15.0});
    for (const auto& c : flat.coefficient) CHECK(*c == doctest::Approx(2.5));
  }

  TEST_CASE("MRN preserves degrees and simplicity") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto net = random_weighted(seed, 50, 0.2 + 0.03 * double(seed));
      const auto mrn = generate_mrn(net, seed * 31);
      CHECK(degree_sequence(mrn.network) == degree_sequence(net));
      CHECK(mrn.accepted == 10 * net.edge_count());
      std::set<std::uint64_t> keys;
      for (const auto& e : mrn.network.edges()) {
        CHECK(e.u != e.v);
        CHECK(keys.insert(pair_key(e.u, e.v)).second);
      }
    }
  }

  TEST_CASE("MRN cannot rewire a complete graph") {
    const auto mrn = generate_mrn(triangle(), 3);
    CHECK(mrn.accepted == 0);
    CHECK(adjacency_difference(triangle(), mrn.network) == 0.0);
    const auto k6 = generate_mrn(complete(6), 3);
    CHECK(adjacency_difference(complete(6), k6.network) == 0.0);
  }

  TEST_CASE("MRN is reproducible per seed") {
    const auto net = random_weighted(4, 40, 0.3);
    const auto a = generate_mrn(net, 99), b = generate_mrn(net, 99), c = generate_mrn(net, 100);
    CHECK(adjacency_difference(a.network, b.network) == 0.0);
    CHECK(adjacency_difference(a.network, c.network) > 0.0);
  }

  TEST_CASE("MRWN: forced single link and the unique triangle solution") {
    const std::vector<WeightedEdge> one{{0, 1, 1.0}};
    const std::vector<double> five{5.0, 5.0};
    const auto link = generate_mrwn(build_network(2, one), five, 1);
    CHECK(link.network.edges()[0].weight == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(link.sweeps <= 2);

    // oracle: w01 + w02 = s0, w01 + w12 = s1, w02 + w12 = s2 solved by elimination
    const double s0 = 4, s1 = 3, s2 = 5;
    const double w01 = (s0 + s1 - s2) / 2, w02 = (s0 + s2 - s1) / 2, w12 = (s1 + s2 - s0) / 2;
    REQUIRE(w01 == 1.0);
    REQUIRE(w12 == 2.0);
    REQUIRE(w02 == 3.0);
    const std::vector<double> targets{s0, s1, s2};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto r = generate_mrwn(triangle(), targets, seed, {1e-14, 100000, 1e-12});
      CHECK(std::abs(*r.network.weight(0, 1) - w01) < 1e-10);
      CHECK(std::abs(*r.network.weight(1, 2) - w12) < 1e-10);
      CHECK(std::abs(*r.network.weight(0, 2) - w02) < 1e-10);
    }
  }

  TEST_CASE("MRWN factored sweep equals the literal edge update") {
    const auto net = random_weighted(21, 40, 0.4);
    const auto targets = strength(net);
    const auto init = mrwn_initial_weights(net, 5);
    std::vector<double> literal(init);
    for (std::size_t sweeps = 1; sweeps <= 4; ++sweeps) {
      literal_sweep(net, targets, literal);
      const auto r = balance_weights(net, targets, init, {0.0, sweeps, 1e-12});
      CHECK(r.sweeps == sweeps);
      for (std::size_t k = 0; k < literal.size(); ++k)
        CHECK(r.network.edges()[k].weight == doctest::Approx(literal[k]).epsilon(1e-11));
    }
  }

  TEST_CASE("MRWN preserves topology and strengths with positive weights") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto net = random_weighted(seed, 60, 0.5);
      const auto s = strength(net);
      const auto topo = generate_mrn(net, seed).network;
      const auto r = generate_mrwn(topo, s, seed);
      CHECK(r.converged);
      CHECK(r.residual < 1e-10);
      CHECK(adjacency_difference(topo, r.network) == 0.0);
      CHECK(adjacency_difference(r.network, topo) == 0.0);
      for (const auto& e : r.network.edges()) CHECK(e.weight > 0.0);
      const auto got = strength(r.network);
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(got[i] - s[i]) <= 1e-10 * s[i]);
    }
  }

  TEST_CASE("MRWN errors") {
    const std::vector<WeightedEdge> one{{0, 1, 1.0}};
    const std::vector<double> isolated{1.0, 1.0, 2.0};
    CHECK(code_of([&] { generate_mrwn(build_network(3, one), isolated, 1); }) ==
          ErrorCode::IsolatedPositiveStrength);
    // path a-b-c forces w_ab = s_a and w_bc = s_c, so s_b = 5 cannot be met
    const std::vector<WeightedEdge> path{{0, 1, 1.0}, {1, 2, 1.0}};
    const std::vector<double> infeasible{1.0, 5.0, 1.0};
    CHECK(code_of([&] { generate_mrwn(build_network(3, path), infeasible, 1, {1e-10, 500, 1e-12}); }) ==
          ErrorCode::NonConvergence);
  }

  TEST_CASE("null ensemble: identity rewiring gives rho(k) = 1") {
    const auto net = random_weighted(8, 50, 0.5);
    NullEnsembleOptions opts;
    opts.ensemble_size = 1;
    opts.swap_factor = 0.0;
    const auto out = null_ensemble_curves(net, opts);
    for (const auto& r : out.unweighted.rho)
      if (r) CHECK(*r == 1.0);
    CHECK(out.mean_adjacency_difference == 0.0);
    CHECK(out.unweighted.ensemble_size == 1);
  }

  TEST_CASE("null ensemble is independent of the thread count") {
    const auto net = random_weighted(9, 40, 0.5);
    NullEnsembleOptions opts;
    opts.ensemble_size = 6;
    opts.seed = 77;
    const auto one = null_ensemble_curves(net, opts);
    opts.threads = 3;
    const auto three = null_ensemble_curves(net, opts);
    CHECK(one.weighted.null_mean == three.weighted.null_mean);
    CHECK(one.unweighted.null_mean == three.unweighted.null_mean);
    CHECK(one.mean_adjacency_difference == three.mean_adjacency_difference);
    CHECK(one.mean_adjacency_difference > 0.0);
  }
}
