#pragma once

#include <cstdint>
#include <vector>

#include "conspigraph/graph.hpp"

namespace conspigraph::leiden {

struct Options {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  double theta = 0.01;          // refinement randomness
  int max_outer_iterations = 50;
};

struct Partition {
  std::vector<std::uint32_t> assignment;  // node index -> community, dense from 0
  std::uint32_t community_count = 0;
  double modularity = 0;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  /// Modularity after each outer iteration; non-decreasing.
  std::vector<double> history;
};

/// Leiden community detection maximizing modularity on the undirected
/// projection. Communities are numbered by size (largest first), ties by
/// smallest member node index.
Partition leiden_partition(const graph::UndirectedGraph& g, const Options& options = {});
Partition leiden_partition(const graph::ForwardingGraph& g, const Options& options = {});

/// Renumbers an arbitrary assignment densely by size desc, then min node.
std::vector<std::uint32_t> canonical_labels(const std::vector<std::uint32_t>& assignment);

/// True when every community induces a connected subgraph.
bool communities_connected(const graph::UndirectedGraph& g, const std::vector<std::uint32_t>& assignment);

}  // namespace conspigraph::leiden
