#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace itn {

using NodeId = std::uint32_t;

struct WeightedEdge {
  NodeId u;
  NodeId v;
  double weight;
};

/// Undirected simple graph with strictly positive link weights.
///
/// Nodes are dense ids 0..N-1, optionally paired with unique external labels
/// (country codes). Edges keep their insertion order and are normalized so
/// that u < v. Neighbour lists are stored CSR-style for O(deg) iteration and
/// a hash index gives O(1) pair lookup. Instances are immutable once built.
class WeightedNetwork {
public:
  struct Incidence {
    NodeId node;       // the neighbour
    std::uint32_t edge;  // index into edges()
  };

  WeightedNetwork() = default;

  /// Throws Error{SelfLoop | DuplicateEdge | NonPositiveWeight | NodeOutOfRange}.
  WeightedNetwork(std::size_t n_nodes, std::span<const WeightedEdge> edges,
                  std::vector<std::string> labels = {});

  std::size_t node_count() const noexcept { return n_nodes_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const WeightedEdge> edges() const noexcept { return edges_; }

  std::span<const Incidence> neighbors(NodeId i) const noexcept {
    return {incidence_.data() + offsets_[i], incidence_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

  std::optional<std::uint32_t> edge_index(NodeId i, NodeId j) const;
  bool has_edge(NodeId i, NodeId j) const { return edge_index(i, j).has_value(); }
  std::optional<double> weight(NodeId i, NodeId j) const;

  double total_weight() const noexcept { return total_weight_; }

  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// External name of node i; the decimal id when the network is unlabelled.
  std::string label(NodeId i) const;
  std::optional<NodeId> find(const std::string& label) const;

  /// Same topology and labels, new weights (one per edge, in edges() order).
  WeightedNetwork with_weights(std::span<const double> weights) const;

private:
  std::size_t n_nodes_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidence_;
  std::unordered_map<std::uint64_t, std::uint32_t> pair_index_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_index_;
  double total_weight_ = 0.0;
};

inline std::uint64_t pair_key(NodeId i, NodeId j) noexcept {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

WeightedNetwork build_network(std::size_t n_nodes, std::span<const WeightedEdge> edges,
                              std::vector<std::string> labels = {});

/// s_i = sum of incident weights; isolated nodes get 0.
std::vector<double> strength(const WeightedNetwork& net);

std::vector<std::size_t> degree_sequence(const WeightedNetwork& net);

/// L / [N(N-1)/2]. Throws TooFewNodes for N < 2.
double link_density(const WeightedNetwork& net);
double link_density(std::size_t n_nodes, std::size_t n_links);

/// Arithmetic mean of the edge weights. Throws EmptyNetwork when L = 0.
double mean_link_weight(const WeightedNetwork& net);

}  // namespace itn
