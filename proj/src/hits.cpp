#include "conspigraph/hits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace conspigraph::hits {

namespace {

bool normalize(std::vector<double>& v) {
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0) return false;
  for (double& x : v) x /= norm;
  return true;
}

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

Scores hits(const graph::ForwardingGraph& g, double tolerance, int max_iterations) {
  const std::size_t n = g.node_count();
  Scores s;
  s.authority.assign(n, 0.0);
  s.hub.assign(n, 0.0);
  if (g.edges().empty() || n == 0) {
    s.converged = true;
    return s;
  }

  const double start = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> a(n, start), h(n, start), next_a(n), next_h(n);
  for (int it = 1; it <= max_iterations; ++it) {
    std::fill(next_a.begin(), next_a.end(), 0.0);
    for (const auto& e : g.edges()) next_a[e.dst] += static_cast<double>(e.weight) * h[e.src];
    normalize(next_a);
    std::fill(next_h.begin(), next_h.end(), 0.0);
    for (const auto& e : g.edges()) next_h[e.src] += static_cast<double>(e.weight) * next_a[e.dst];
    normalize(next_h);

    double delta = std::max(max_change(a, next_a), max_change(h, next_h));
    a.swap(next_a);
    h.swap(next_h);
    s.iterations = it;
    if (delta < tolerance) {
      s.converged = true;
      break;
    }
  }
  s.authority = std::move(a);
  s.hub = std::move(h);
  return s;
}

std::vector<graph::NodeId> rank_by_authority(const graph::ForwardingGraph& g, const Scores& s) {
  std::vector<graph::NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) {
    if (s.authority[x] != s.authority[y]) return s.authority[x] > s.authority[y];
    return g.nodes()[x] < g.nodes()[y];
  });
  return order;
}

}  // namespace conspigraph::hits
