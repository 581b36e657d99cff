#include "conspigraph/leiden.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <numeric>
#include <random>

namespace conspigraph::leiden {

using graph::NodeId;
using graph::UndirectedGraph;

namespace {

constexpr double kEps = 1e-12;

// Raw engine bits only, so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::vector<NodeId> permutation(std::size_t n) {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[below(i)]);
    return order;
  }

 private:
  std::mt19937_64 engine_;
};

std::uint32_t densify(std::vector<std::uint32_t>& labels) {
  std::vector<std::uint32_t> remap(labels.size() + 1, UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& l : labels) {
    if (l >= remap.size()) remap.resize(l + 1, UINT32_MAX);
    if (remap[l] == UINT32_MAX) remap[l] = next++;
    l = remap[l];
  }
  return next;
}

// Scratch accumulator of weights towards communities.
class Accumulator {
 public:
  explicit Accumulator(std::size_t n) : weight_(n, 0.0), seen_(n, 0) {}

  void add(std::uint32_t c, double w) {
    if (!seen_[c]) {
      seen_[c] = 1;
      touched_.push_back(c);
    }
    weight_[c] += w;
  }
  double operator[](std::uint32_t c) const { return weight_[c]; }
  const std::vector<std::uint32_t>& touched() const { return touched_; }
  void clear() {
    for (auto c : touched_) {
      weight_[c] = 0;
      seen_[c] = 0;
    }
    touched_.clear();
  }

 private:
  std::vector<double> weight_;
  std::vector<char> seen_;
  std::vector<std::uint32_t> touched_;
};

// Queue-based local moving. `comm` must use labels below node_count().
bool move_nodes_fast(const UndirectedGraph& g, std::vector<std::uint32_t>& comm, double gamma, Rng& rng) {
  const std::size_t n = g.node_count();
  const double two_m = g.total_weight();
  std::vector<double> total(n, 0.0);
  std::vector<std::uint32_t> size(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    total[comm[v]] += g.strength(v);
    ++size[comm[v]];
  }
  std::vector<std::uint32_t> empty;
  for (std::uint32_t c = n; c-- > 0;)
    if (size[c] == 0) empty.push_back(c);

  auto order = rng.permutation(n);
  std::deque<NodeId> queue(order.begin(), order.end());
  std::vector<char> queued(n, 1);
  Accumulator to(n);
  bool changed = false;

  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    queued[v] = 0;

    const std::uint32_t old = comm[v];
    const double kv = g.strength(v);
    for (const auto& nb : g.neighbors(v))
      if (nb.node != v) to.add(comm[nb.node], nb.weight);

    total[old] -= kv;
    --size[old];

    std::uint32_t best = old;
    double best_gain = to[old] - gamma * kv * total[old] / two_m;
    for (auto c : to.touched()) {
      double gain = to[c] - gamma * kv * total[c] / two_m;
      if (gain > best_gain + kEps) {
        best = c;
        best_gain = gain;
      }
    }
    if (size[old] > 0 && 0.0 > best_gain + kEps && !empty.empty()) {
      best = empty.back();
      empty.pop_back();
    }

    comm[v] = best;
    total[best] += kv;
    ++size[best];
    if (best != old) {
      changed = true;
      if (size[old] == 0) empty.push_back(old);
      for (const auto& nb : g.neighbors(v)) {
        NodeId u = nb.node;
        if (u != v && !queued[u] && comm[u] != best) {
          queued[u] = 1;
          queue.push_back(u);
        }
      }
    }
    to.clear();
  }
  return changed;
}

// Merges singletons inside each community of `comm` into well-connected
// sub-communities. Returns the refined labels (not dense).
std::vector<std::uint32_t> refine(const UndirectedGraph& g, const std::vector<std::uint32_t>& comm, double gamma,
                                  double theta, Rng& rng) {
  const std::size_t n = g.node_count();
  const double two_m = g.total_weight();
  std::vector<double> comm_total(n, 0.0);
  for (NodeId v = 0; v < n; ++v) comm_total[comm[v]] += g.strength(v);

  std::vector<std::uint32_t> refined(n);
  std::iota(refined.begin(), refined.end(), 0);
  std::vector<double> total(n), external(n, 0.0);
  std::vector<std::uint32_t> size(n, 1);
  for (NodeId v = 0; v < n; ++v) {
    total[v] = g.strength(v);
    for (const auto& nb : g.neighbors(v))
      if (nb.node != v && comm[nb.node] == comm[v]) external[v] += nb.weight;
  }

  Accumulator to(n);
  std::vector<std::uint32_t> options;
  std::vector<double> gains;
  for (NodeId v : rng.permutation(n)) {
    if (size[refined[v]] != 1) continue;
    const std::uint32_t c = comm[v];
    const double kv = g.strength(v);
    if (external[v] < gamma * kv * (comm_total[c] - kv) / two_m - kEps) continue;

    for (const auto& nb : g.neighbors(v))
      if (nb.node != v && comm[nb.node] == c) to.add(refined[nb.node], nb.weight);

    options.assign(1, refined[v]);
    gains.assign(1, 0.0);
    for (auto s : to.touched()) {
      if (s == refined[v]) continue;
      if (external[s] < gamma * total[s] * (comm_total[c] - total[s]) / two_m - kEps) continue;
      double gain = to[s] - gamma * kv * total[s] / two_m;
      if (gain >= 0) {
        options.push_back(s);
        gains.push_back(gain);
      }
    }
    if (options.size() > 1) {
      double top = *std::max_element(gains.begin(), gains.end());
      double sum = 0;
      for (auto& g_ : gains) {
        g_ = std::exp((g_ - top) / theta);
        sum += g_;
      }
      double r = rng.unit() * sum;
      std::size_t pick = 0;
      for (; pick + 1 < options.size(); ++pick) {
        if (r < gains[pick]) break;
        r -= gains[pick];
      }
      std::uint32_t s = options[pick];
      if (s != refined[v]) {
        std::uint32_t own = refined[v];
        external[s] = external[s] + external[own] - 2 * to[s];
        total[s] += kv;
        ++size[s];
        total[own] = 0;
        size[own] = 0;
        refined[v] = s;
      }
    }
    to.clear();
  }
  return refined;
}

// Collapses each label of `labels` (dense, `count` values) into one node.
UndirectedGraph aggregate(const UndirectedGraph& g, const std::vector<std::uint32_t>& labels, std::uint32_t count) {
  std::vector<std::vector<NodeId>> members(count);
  for (NodeId v = 0; v < g.node_count(); ++v) members[labels[v]].push_back(v);

  std::vector<std::size_t> offsets{0};
  std::vector<UndirectedGraph::Neighbor> adj;
  Accumulator to(count);
  std::vector<std::uint32_t> row;
  for (std::uint32_t a = 0; a < count; ++a) {
    for (NodeId v : members[a])
      for (const auto& nb : g.neighbors(v)) to.add(labels[nb.node], nb.weight);
    row = to.touched();
    std::sort(row.begin(), row.end());
    for (auto b : row) adj.push_back({b, to[b]});
    offsets.push_back(adj.size());
    to.clear();
  }
  return UndirectedGraph::from_rows(std::move(offsets), std::move(adj));
}

// Splits every community into its connected components.
void split_disconnected(const UndirectedGraph& g, std::vector<std::uint32_t>& assignment) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> out(n, UINT32_MAX);
  std::uint32_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (out[s] != UINT32_MAX) continue;
    out[s] = next;
    stack.assign(1, s);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (out[nb.node] == UINT32_MAX && assignment[nb.node] == assignment[s]) {
          out[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  assignment = std::move(out);
}

}  // namespace

std::vector<std::uint32_t> canonical_labels(const std::vector<std::uint32_t>& assignment) {
  std::uint32_t count = 0;
  for (auto c : assignment) count = std::max(count, c + 1);
  std::vector<std::size_t> size(count, 0), first(count, SIZE_MAX);
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    ++size[assignment[v]];
    first[assignment[v]] = std::min(first[assignment[v]], v);
  }
  std::vector<std::uint32_t> labels;
  for (std::uint32_t c = 0; c < count; ++c)
    if (size[c] > 0) labels.push_back(c);
  std::sort(labels.begin(), labels.end(), [&](auto a, auto b) {
    if (size[a] != size[b]) return size[a] > size[b];
    return first[a] < first[b];
  });
  std::vector<std::uint32_t> remap(count, 0);
  for (std::uint32_t i = 0; i < labels.size(); ++i) remap[labels[i]] = i;
  std::vector<std::uint32_t> out(assignment.size());
  for (std::size_t v = 0; v < assignment.size(); ++v) out[v] = remap[assignment[v]];
  return out;
}

bool communities_connected(const UndirectedGraph& g, const std::vector<std::uint32_t>& assignment) {
  auto split = assignment;
  split_disconnected(g, split);
  std::uint32_t a = 0, b = 0;
  for (auto c : assignment) a = std::max(a, c + 1);
  for (auto c : split) b = std::max(b, c + 1);
  std::vector<char> used(a, 0);
  std::uint32_t distinct = 0;
  for (auto c : assignment)
    if (!used[c]) {
      used[c] = 1;
      ++distinct;
    }
  return distinct == b;
}

Partition leiden_partition(const UndirectedGraph& g, const Options& options) {
  const std::size_t n = g.node_count();
  Partition out;
  out.resolution = options.resolution;
  out.seed = options.seed;
  out.assignment.resize(n);
  std::iota(out.assignment.begin(), out.assignment.end(), 0);

  if (g.total_weight() <= 0) {
    out.community_count = static_cast<std::uint32_t>(n);
    out.modularity = 0;
    out.history.push_back(0);
    return out;
  }

  Rng rng(options.seed);
  const double gamma = options.resolution;
  for (int iter = 0; iter < options.max_outer_iterations; ++iter) {
    const auto before = out.assignment;

    std::unique_ptr<UndirectedGraph> owned;
    const UndirectedGraph* level = &g;
    std::vector<std::uint32_t> node_of(n);
    std::iota(node_of.begin(), node_of.end(), 0);
    std::vector<std::uint32_t> comm = out.assignment;
    densify(comm);

    while (true) {
      move_nodes_fast(*level, comm, gamma, rng);
      std::uint32_t comm_count = densify(comm);
      if (comm_count == level->node_count()) break;

      auto basis = refine(*level, comm, gamma, options.theta, rng);
      std::uint32_t basis_count = densify(basis);
      if (basis_count == level->node_count()) {
        basis = comm;
        basis_count = comm_count;
      }

      std::vector<std::uint32_t> next_comm(basis_count);
      for (NodeId v = 0; v < level->node_count(); ++v) next_comm[basis[v]] = comm[v];
      for (auto& x : node_of) x = basis[x];

      auto next = std::make_unique<UndirectedGraph>(aggregate(*level, basis, basis_count));
      owned = std::move(next);
      level = owned.get();
      comm = std::move(next_comm);
    }

    for (std::size_t v = 0; v < n; ++v) out.assignment[v] = comm[node_of[v]];
    split_disconnected(g, out.assignment);
    out.assignment = canonical_labels(out.assignment);
    out.history.push_back(graph::modularity(g, out.assignment, gamma));
    if (out.assignment == before) break;
  }

  out.community_count = 0;
  for (auto c : out.assignment) out.community_count = std::max(out.community_count, c + 1);
  out.modularity = graph::modularity(g, out.assignment, gamma);
  return out;
}

Partition leiden_partition(const graph::ForwardingGraph& g, const Options& options) {
  return leiden_partition(graph::UndirectedGraph::project(g), options);
}

}  // namespace conspigraph::leiden
