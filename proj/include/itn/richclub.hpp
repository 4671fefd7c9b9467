#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "itn/network.hpp"

namespace itn {

/// Coefficient per threshold; std::nullopt where the club has fewer than two
/// members.
struct RichClubCurve {
  std::vector<double> thresholds;
  std::vector<std::optional<double>> coefficient;
  std::vector<std::size_t> club_size;
};

// Single-threshold measures ---------------------------------------------------

/// phi(k) = 2 E_k / [n_k (n_k - 1)] over nodes with degree >= k.
std::optional<double> phi_unweighted(const WeightedNetwork& net, std::size_t k);

/// R_w(s) = 2 W_club / [n_s (n_s - 1)] over nodes with strength >= s, where
/// W_club sums each intra-club link once.
std::optional<double> rw_weighted(const WeightedNetwork& net, double s_threshold);

/// Same, with club membership decided by `membership` strengths instead of
/// the network's own (used to evaluate null models on the original clubs).
std::optional<double> rw_weighted(const WeightedNetwork& net, std::span<const double> membership,
                                  double s_threshold);

/// Fraction of the total weight carried inside the club of strength >= s.
/// Throws EmptyNetwork when the network carries no weight.
double fw_fraction(const WeightedNetwork& net, double s_threshold);

/// Smallest strength-ranked club holding at least half of the total weight,
/// as a fraction of N. Nodes with equal strength join together.
double half_trade_club_size(const WeightedNetwork& net);

/// Largest s/s_max at which f_w is still >= 1/2 (where Fig.-style curves
/// cross one half).
double half_trade_strength_ratio(const WeightedNetwork& net);

// Threshold grids and curves -----------------------------------------------------

/// Distinct realised degrees, ascending.
std::vector<double> degree_thresholds(const WeightedNetwork& net);
/// Distinct realised strengths (> 0), ascending.
std::vector<double> strength_thresholds(const WeightedNetwork& net);
/// `count` logarithmically spaced values of s in [lo_ratio, 1] * s_max.
std::vector<double> log_strength_thresholds(double s_max, std::size_t count = 100,
                                            double lo_ratio = 1e-4);

RichClubCurve phi_curve(const WeightedNetwork& net, std::span<const double> k_thresholds);
RichClubCurve rw_curve(const WeightedNetwork& net, std::span<const double> s_thresholds);
RichClubCurve rw_curve(const WeightedNetwork& net, std::span<const double> membership,
                       std::span<const double> s_thresholds);
RichClubCurve fw_curve(const WeightedNetwork& net, std::span<const double> s_thresholds);

// Null models ---------------------------------------------------------------------

struct MrnResult {
  WeightedNetwork network;  // unit weights: topology only
  std::size_t accepted = 0;
  std::size_t attempts = 0;
};

/// Degree-preserving randomisation by pairwise link-end exchange: pick two
/// links (a,b), (c,d), rewire to (a,d), (c,b); reject self-loops and
/// duplicates. Runs until swap_factor * L swaps were accepted, or
/// max_attempt_factor times that many attempts (rigid graphs such as K_n
/// admit no swap at all).
MrnResult generate_mrn(const WeightedNetwork& net, std::uint64_t seed, double swap_factor = 10.0,
                       double max_attempt_factor = 100.0);

/// Fraction of the links of `a` that are absent from `b`.
double adjacency_difference(const WeightedNetwork& a, const WeightedNetwork& b);

struct MrwnOptions {
  double tol = 1e-10;
  std::size_t max_sweeps = 100000;
  double floor = 1e-12;
};

struct MrwnResult {
  WeightedNetwork network;
  std::size_t sweeps = 0;
  double residual = 0.0;  // max_i |s_i - sum_j w_ij| / max(s_i, floor)
  bool converged = false;
};

/// Uniform (0,1] starting weights, one per edge of `topology`.
std::vector<double> mrwn_initial_weights(const WeightedNetwork& topology, std::uint64_t seed);

/// Self-consistent balancing: sweep nodes in ascending id order and rescale
/// every link at node i by s_i / sum_j w_ij, i.e.
/// w_ij <- w_ij + delta_i * w_ij / sum_j w_ij. Because each update multiplies
/// all links of one node by a common factor, the weights stay of the form
/// w0_ij * x_i * x_j; the sweep is carried out on the factors x.
/// Returns after convergence or max_sweeps without throwing.
MrwnResult balance_weights(const WeightedNetwork& topology, std::span<const double> targets,
                           std::span<const double> initial_weights, const MrwnOptions& opts = {});

/// Maximally random weighted network on `topology` with strengths `targets`.
/// Throws NonConvergence (with residual), IsolatedPositiveStrength.
MrwnResult generate_mrwn(const WeightedNetwork& topology, std::span<const double> targets,
                         std::uint64_t seed, const MrwnOptions& opts = {});

struct NullEnsembleResult {
  std::vector<double> thresholds;
  std::vector<std::optional<double>> original;
  std::vector<std::optional<double>> null_mean;
  std::vector<double> null_spread;  // standard deviation across members
  std::vector<std::optional<double>> rho;  // original / null_mean
  std::vector<std::size_t> club_size;
  std::size_t ensemble_size = 0;
};

struct NullEnsembleOptions {
  std::size_t ensemble_size = 20;
  std::uint64_t seed = 1;
  double swap_factor = 10.0;
  MrwnOptions mrwn;
  std::size_t threads = 1;
  std::vector<double> degree_grid;    // empty: realised degrees
  std::vector<double> strength_grid;  // empty: 100 log thresholds on s/s_max
};

struct NullEnsembles {
  NullEnsembleResult unweighted;  // phi vs phi_ran (MRN)
  NullEnsembleResult weighted;    // R_w vs R_w^ran (MRWN on the MRN)
  double mean_adjacency_difference = 0.0;
};

/// Member m uses derive_seed(seed, m) for both its rewiring and its initial
/// weights, so results do not depend on the thread count.
NullEnsembles null_ensemble_curves(const WeightedNetwork& net, const NullEnsembleOptions& opts);

}  // namespace itn
