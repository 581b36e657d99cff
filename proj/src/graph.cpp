#include "conspigraph/graph.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <future>
#include <thread>

#include "conspigraph/csv.hpp"

namespace conspigraph::graph {

ForwardingGraph::ForwardingGraph(std::vector<ChannelId> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  index_.reserve(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i], i).second) throw ValidationError("duplicate graph node " + std::to_string(nodes_[i]));
  }
  for (const auto& e : edges_) {
    if (e.src >= nodes_.size() || e.dst >= nodes_.size()) throw ValidationError("edge endpoint out of range");
    if (e.src == e.dst) throw ValidationError("self-loop in forwarding graph");
    if (e.weight == 0) throw ValidationError("zero-weight edge");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
}

std::optional<NodeId> ForwardingGraph::index_of(ChannelId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct PartialEdges {
  std::vector<Edge> edges;
  std::uint64_t dropped = 0;
  std::uint64_t self = 0;
};

}  // namespace

ForwardingGraph build_graph(const dataset::Corpus& corpus, bool binary_edges) {
  std::vector<ChannelId> nodes;
  nodes.reserve(corpus.channels().size());
  for (const auto& ch : corpus.channels()) nodes.push_back(ch.channel_id);
  std::sort(nodes.begin(), nodes.end());
  std::unordered_map<ChannelId, NodeId> index;
  index.reserve(nodes.size());
  for (NodeId i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);

  const auto& channels = corpus.channels();
  auto work = [&](std::size_t begin, std::size_t end) {
    PartialEdges part;
    std::unordered_map<NodeId, std::uint64_t> counts;
    for (std::size_t c = begin; c < end; ++c) {
      const auto& ch = channels[c];
      NodeId src = index.at(ch.channel_id);
      counts.clear();
      for (const auto& m : ch.messages) {
        if (!m.forwarded_from) continue;
        if (*m.forwarded_from == ch.channel_id) {
          ++part.self;
          continue;
        }
        auto it = index.find(*m.forwarded_from);
        if (it == index.end()) {
          ++part.dropped;
          continue;
        }
        ++counts[it->second];
      }
      for (auto [dst, w] : counts) part.edges.push_back({src, dst, binary_edges ? 1 : w});
    }
    return part;
  };

  unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::size_t chunk = std::max<std::size_t>(1, (channels.size() + workers - 1) / workers);
  std::vector<std::future<PartialEdges>> futures;
  for (std::size_t b = 0; b < channels.size(); b += chunk)
    futures.push_back(std::async(std::launch::async, work, b, std::min(channels.size(), b + chunk)));

  std::vector<Edge> edges;
  std::uint64_t dropped = 0, self = 0;
  for (auto& f : futures) {
    auto p = f.get();
    edges.insert(edges.end(), p.edges.begin(), p.edges.end());
    dropped += p.dropped;
    self += p.self;
  }
  ForwardingGraph g(std::move(nodes), std::move(edges));
  g.dropped_external_forwards = dropped;
  g.self_forwards = self;
  return g;
}

// ---------------------------------------------------------------- binary I/O

namespace {

constexpr char kMagic[8] = {'C', 'G', 'F', 'G', 'R', 'A', 'P', 'H'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const fs::path& path) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ParseError(path.string() + ": truncated graph file");
  return v;
}

}  // namespace

void save_binary(const fs::path& path, const ForwardingGraph& g) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put<std::uint64_t>(out, g.node_count());
  put<std::uint64_t>(out, g.edges().size());
  put(out, g.dropped_external_forwards);
  put(out, g.self_forwards);
  for (auto id : g.nodes()) put<std::int64_t>(out, id);
  for (const auto& e : g.edges()) {
    put(out, e.src);
    put(out, e.dst);
    put(out, e.weight);
  }
  if (!out) throw Error("error writing " + path.string());
}

ForwardingGraph load_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open graph " + path.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ParseError(path.string() + ": not a forwarding graph file");
  if (get<std::uint32_t>(in, path) != kVersion) throw ParseError(path.string() + ": unsupported graph version");
  auto n = get<std::uint64_t>(in, path);
  auto m = get<std::uint64_t>(in, path);
  auto dropped = get<std::uint64_t>(in, path);
  auto self = get<std::uint64_t>(in, path);
  std::vector<ChannelId> nodes(n);
  for (auto& id : nodes) id = get<std::int64_t>(in, path);
  std::vector<Edge> edges(m);
  for (auto& e : edges) {
    e.src = get<NodeId>(in, path);
    e.dst = get<NodeId>(in, path);
    e.weight = get<std::uint64_t>(in, path);
  }
  ForwardingGraph g(std::move(nodes), std::move(edges));
  g.dropped_external_forwards = dropped;
  g.self_forwards = self;
  return g;
}

void write_edges_csv(const fs::path& path, const ForwardingGraph& g) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  csv::Writer w(out);
  w.row({"src", "dst", "weight"});
  for (const auto& e : g.edges())
    w.field(g.nodes()[e.src]).field(g.nodes()[e.dst]).field(static_cast<std::int64_t>(e.weight)).end_row();
}

// ---------------------------------------------------------------- undirected

void UndirectedGraph::finish() {
  std::size_t n = offsets_.size() - 1;
  strength_.assign(n, 0.0);
  self_.assign(n, 0.0);
  total_ = 0;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = offsets_[v]; i < offsets_[v + 1]; ++i) {
      strength_[v] += adj_[i].weight;
      if (adj_[i].node == v) self_[v] += adj_[i].weight;
    }
    total_ += strength_[v];
  }
}

UndirectedGraph UndirectedGraph::from_rows(std::vector<std::size_t> offsets, std::vector<Neighbor> adj) {
  UndirectedGraph g;
  g.offsets_ = std::move(offsets);
  g.adj_ = std::move(adj);
  g.finish();
  return g;
}

UndirectedGraph UndirectedGraph::from_triples(std::size_t n,
                                              const std::vector<std::tuple<NodeId, NodeId, double>>& triples) {
  std::vector<std::tuple<NodeId, NodeId, double>> directed;
  directed.reserve(triples.size() * 2);
  for (auto [a, b, w] : triples) {
    if (a >= n || b >= n) throw ValidationError("triple endpoint out of range");
    directed.emplace_back(a, b, w);
    directed.emplace_back(b, a, w);
  }
  std::sort(directed.begin(), directed.end(), [](const auto& x, const auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
  });
  UndirectedGraph g;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < directed.size();) {
    auto [a, b, w] = directed[i];
    double sum = 0;
    while (i < directed.size() && std::get<0>(directed[i]) == a && std::get<1>(directed[i]) == b)
      sum += std::get<2>(directed[i++]);
    g.adj_.push_back({b, sum});
    ++g.offsets_[a + 1];
  }
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.finish();
  return g;
}

UndirectedGraph UndirectedGraph::project(const ForwardingGraph& g) {
  std::vector<std::tuple<NodeId, NodeId, double>> triples;
  triples.reserve(g.edges().size());
  for (const auto& e : g.edges()) triples.emplace_back(e.src, e.dst, static_cast<double>(e.weight));
  return from_triples(g.node_count(), triples);
}

double modularity(const UndirectedGraph& g, const std::vector<std::uint32_t>& assignment, double gamma) {
  std::size_t n = g.node_count();
  if (assignment.size() != n) throw ValidationError("assignment does not cover every node");
  double two_m = g.total_weight();
  if (two_m <= 0) return 0.0;
  std::uint32_t communities = 0;
  for (auto c : assignment) communities = std::max(communities, c + 1);
  std::vector<double> internal(communities, 0.0), strength(communities, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    auto c = assignment[v];
    strength[c] += g.strength(v);
    for (const auto& nb : g.neighbors(v))
      if (assignment[nb.node] == c) internal[c] += nb.weight;
  }
  double q = 0;
  for (std::uint32_t c = 0; c < communities; ++c) q += internal[c] - gamma * strength[c] * strength[c] / two_m;
  return q / two_m;
}

double modularity(const ForwardingGraph& g, const std::vector<std::uint32_t>& assignment, double gamma) {
  return modularity(UndirectedGraph::project(g), assignment, gamma);
}

}  // namespace conspigraph::graph
