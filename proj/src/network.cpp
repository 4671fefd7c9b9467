#include "itn/network.hpp"

#include <algorithm>
#include <numeric>

#include "itn/error.hpp"

namespace itn {
namespace {

std::string pair_text(NodeId i, NodeId j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

WeightedNetwork::WeightedNetwork(std::size_t n_nodes, std::span<const WeightedEdge> edges,
                                 std::vector<std::string> labels)
    : n_nodes_(n_nodes), labels_(std::move(labels)) {
  if (!labels_.empty()) {
    if (labels_.size() != n_nodes_)
      throw Error(ErrorCode::NodeOutOfRange, "label table size " + std::to_string(labels_.size()) +
                                                 " != node count " + std::to_string(n_nodes_));
    label_index_.reserve(labels_.size());
    for (NodeId i = 0; i < labels_.size(); ++i) {
      if (!label_index_.emplace(labels_[i], i).second)
        throw Error(ErrorCode::DuplicateLabel, "node label '" + labels_[i] + "'");
    }
  }

  edges_.reserve(edges.size());
  pair_index_.reserve(edges.size());
  std::vector<std::size_t> degree(n_nodes_, 0);
  for (const auto& e : edges) {
    if (e.u >= n_nodes_ || e.v >= n_nodes_)
      throw Error(ErrorCode::NodeOutOfRange, pair_text(e.u, e.v));
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, pair_text(e.u, e.v));
    if (!(e.weight > 0.0))
      throw Error(ErrorCode::NonPositiveWeight,
                  pair_text(e.u, e.v) + " weight " + std::to_string(e.weight));
    const auto index = static_cast<std::uint32_t>(edges_.size());
    if (!pair_index_.emplace(pair_key(e.u, e.v), index).second)
      throw Error(ErrorCode::DuplicateEdge, pair_text(e.u, e.v));
    edges_.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
    ++degree[e.u];
    ++degree[e.v];
    total_weight_ += e.weight;
  }

  offsets_.assign(n_nodes_ + 1, 0);
  std::partial_sum(degree.begin(), degree.end(), offsets_.begin() + 1);
  incidence_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    incidence_[cursor[e.u]++] = {e.v, k};
    incidence_[cursor[e.v]++] = {e.u, k};
  }
}

std::optional<std::uint32_t> WeightedNetwork::edge_index(NodeId i, NodeId j) const {
  auto it = pair_index_.find(pair_key(i, j));
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> WeightedNetwork::weight(NodeId i, NodeId j) const {
  if (auto k = edge_index(i, j)) return edges_[*k].weight;
  return std::nullopt;
}

std::string WeightedNetwork::label(NodeId i) const {
  return labels_.empty() ? std::to_string(i) : labels_[i];
}

std::optional<NodeId> WeightedNetwork::find(const std::string& label) const {
  if (labels_.empty()) {
    try {
      std::size_t used = 0;
      const unsigned long id = std::stoul(label, &used);
      if (used == label.size() && id < n_nodes_) return static_cast<NodeId>(id);
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

WeightedNetwork WeightedNetwork::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size())
    throw Error(ErrorCode::InvalidArgument, "weight vector size mismatch");
  std::vector<WeightedEdge> edges(edges_);
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k].weight = weights[k];
  return WeightedNetwork(n_nodes_, edges, labels_);
}

WeightedNetwork build_network(std::size_t n_nodes, std::span<const WeightedEdge> edges,
                              std::vector<std::string> labels) {
  return WeightedNetwork(n_nodes, edges, std::move(labels));
}

std::vector<double> strength(const WeightedNetwork& net) {
  std::vector<double> s(net.node_count(), 0.0);
  for (const auto& e : net.edges()) {
    s[e.u] += e.weight;
    s[e.v] += e.weight;
  }
  return s;
}

std::vector<std::size_t> degree_sequence(const WeightedNetwork& net) {
  std::vector<std::size_t> k(net.node_count());
  for (NodeId i = 0; i < k.size(); ++i) k[i] = net.degree(i);
  return k;
}

double link_density(std::size_t n_nodes, std::size_t n_links) {
  if (n_nodes < 2)
    throw Error(ErrorCode::TooFewNodes, "link density needs N >= 2, got " + std::to_string(n_nodes));
  const double pairs = 0.5 * static_cast<double>(n_nodes) * static_cast<double>(n_nodes - 1);
  return static_cast<double>(n_links) / pairs;
}

double link_density(const WeightedNetwork& net) {
  return link_density(net.node_count(), net.edge_count());
}

double mean_link_weight(const WeightedNetwork& net) {
  if (net.edge_count() == 0) throw Error(ErrorCode::EmptyNetwork, "no links");
  return net.total_weight() / static_cast<double>(net.edge_count());
}

}  // namespace itn
