#pragma once

#include <vector>

#include "conspigraph/graph.hpp"

namespace conspigraph::hits {

struct Scores {
  std::vector<double> authority;  // by node index
  std::vector<double> hub;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration a <- normalize(W^T h), h <- normalize(W a) from a uniform
/// start; an edge u -> v passes u's hub score to v's authority. Stops when
/// no coordinate moves by `tolerance` or more.
Scores hits(const graph::ForwardingGraph& g, double tolerance = 1e-8, int max_iterations = 1000);

/// Node indices ordered by authority (desc), ties by channel id (asc).
std::vector<graph::NodeId> rank_by_authority(const graph::ForwardingGraph& g, const Scores& s);

}  // namespace conspigraph::hits
