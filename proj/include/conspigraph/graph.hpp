#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "conspigraph/dataset.hpp"

namespace conspigraph::graph {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  std::uint64_t weight = 0;

  bool operator==(const Edge&) const = default;
};

/// Directed forwarding graph: src -> dst with weight = number of messages in
/// src forwarded from dst. Nodes are the corpus channels in ascending id order.
class ForwardingGraph {
 public:
  ForwardingGraph() = default;
  ForwardingGraph(std::vector<ChannelId> nodes, std::vector<Edge> edges);

  const std::vector<ChannelId>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }  // sorted by (src, dst)
  std::size_t node_count() const { return nodes_.size(); }
  std::optional<NodeId> index_of(ChannelId id) const;

  std::uint64_t dropped_external_forwards = 0;
  std::uint64_t self_forwards = 0;

  bool operator==(const ForwardingGraph& o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_ && dropped_external_forwards == o.dropped_external_forwards &&
           self_forwards == o.self_forwards;
  }

 private:
  std::vector<ChannelId> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<ChannelId, NodeId> index_;
};

/// `binary_edges` caps every weight at 1.
ForwardingGraph build_graph(const dataset::Corpus& corpus, bool binary_edges = false);

void save_binary(const fs::path& path, const ForwardingGraph& g);
ForwardingGraph load_binary(const fs::path& path);

// edges.csv: src, dst, weight (channel ids)
void write_edges_csv(const fs::path& path, const ForwardingGraph& g);

/// Symmetric weighted adjacency in CSR form. Self-loops appear once in a
/// node's row and carry the summed weight of both directions, so that
/// strength(i) is the row sum and total_weight() is the sum over all rows.
class UndirectedGraph {
 public:
  struct Neighbor {
    NodeId node;
    double weight;
  };

  UndirectedGraph() = default;
  /// Builds from (a, b, w) triples; a triple adds w to both A[a][b] and
  /// A[b][a] (twice to A[a][a] when a == b). Duplicate pairs are merged.
  static UndirectedGraph from_triples(std::size_t n, const std::vector<std::tuple<NodeId, NodeId, double>>& triples);
  /// A_ij = w_ij + w_ji.
  static UndirectedGraph project(const ForwardingGraph& g);

  std::size_t node_count() const { return strength_.size(); }
  std::span<const Neighbor> neighbors(NodeId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  double strength(NodeId v) const { return strength_[v]; }
  double self_loop(NodeId v) const { return self_[v]; }
  /// 2m: sum of all A_ij.
  double total_weight() const { return total_; }

  /// Builds directly from assembled rows; used by aggregation.
  static UndirectedGraph from_rows(std::vector<std::size_t> offsets, std::vector<Neighbor> adj);

 private:
  void finish();

  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adj_;
  std::vector<double> strength_;
  std::vector<double> self_;
  double total_ = 0;
};

/// Newman-Girvan modularity with resolution gamma:
/// Q = (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] delta(c_i, c_j); 0 when m = 0.
double modularity(const UndirectedGraph& g, const std::vector<std::uint32_t>& assignment, double gamma = 1.0);
double modularity(const ForwardingGraph& g, const std::vector<std::uint32_t>& assignment, double gamma = 1.0);

}  // namespace conspigraph::graph
