#include <gtest/gtest.h>

#include <random>

#include "conspigraph/dataset.hpp"
#include "conspigraph/graph.hpp"
#include "oracles.hpp"

namespace cg = conspigraph;
using cg::graph::UndirectedGraph;

TEST(Oracle, PartitionEnumerationCountsBellNumbers) {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  for (std::size_t n = 0; n <= 8; ++n) {
    std::size_t count = 0;
    oracle::for_each_partition(n, [&](const auto&) { ++count; });
    EXPECT_EQ(count, bell[n]) << n;
  }
}

TEST(Oracle, NmiOfIdenticalAndIndependentLabelings) {
  std::vector<std::uint32_t> a{0, 0, 1, 1}, b{5, 5, 2, 2}, c{0, 1, 0, 1};
  EXPECT_NEAR(oracle::nmi(a, b), 1.0, 1e-12);
  EXPECT_NEAR(oracle::nmi(a, c), 0.0, 1e-12);
}

TEST(Modularity, TwoTrianglesByHand) {
  // two triangles joined by one edge: m = 7, each side degree sum 7
  std::vector<oracle::Triple> t{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}, {2, 3, 1}};
  auto g = UndirectedGraph::from_triples(6, t);
  std::vector<std::uint32_t> split{0, 0, 0, 1, 1, 1};
  double expected = 2 * (3.0 / 7 - (7.0 / 14) * (7.0 / 14));
  EXPECT_NEAR(cg::graph::modularity(g, split, 1.0), expected, 1e-12);
  EXPECT_NEAR(cg::graph::modularity(g, std::vector<std::uint32_t>(6, 0)), 0.0, 1e-12);
}

TEST(Modularity, EmptyGraphIsZero) {
  auto g = UndirectedGraph::from_triples(3, {});
  EXPECT_EQ(cg::graph::modularity(g, {0, 1, 2}), 0.0);
}

TEST(Modularity, SelfLoopsMatchOracle) {
  std::vector<oracle::Triple> t{{0, 0, 2}, {0, 1, 1}, {1, 2, 3}, {2, 2, 1}};
  auto g = UndirectedGraph::from_triples(3, t);
  oracle::for_each_partition(3, [&](const std::vector<std::uint32_t>& p) {
    EXPECT_NEAR(cg::graph::modularity(g, p), oracle::brute_modularity(3, t, p), 1e-12);
  });
}

TEST(ForwardingGraph, BuildsWeightsAndDropsSelfAndExternalForwards) {
  auto corpus = cg::dataset::parse_corpus(
      R"({"channel_id":1,"title":"a","creation_date":"2020-01-01T00:00:00Z","messages":[{"message_id":1,"timestamp":"2020-01-02T00:00:00Z","text":"x","forwarded_from":2},{"message_id":2,"timestamp":"2020-01-03T00:00:00Z","text":"y","forwarded_from":2},{"message_id":3,"timestamp":"2020-01-03T00:00:00Z","text":"z","forwarded_from":1},{"message_id":4,"timestamp":"2020-01-03T00:00:00Z","text":"w","forwarded_from":99}]}
{"channel_id":2,"title":"b","creation_date":"2020-01-01T00:00:00Z","messages":[]}
)",
      "inline");
  auto g = cg::graph::build_graph(corpus);
  ASSERT_EQ(g.node_count(), 2u);
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.edges()[0], (cg::graph::Edge{0, 1, 2}));
  EXPECT_EQ(g.self_forwards, 1u);
  EXPECT_EQ(g.dropped_external_forwards, 1u);
  auto binary = cg::graph::build_graph(corpus, true);
  EXPECT_EQ(binary.edges()[0].weight, 1u);
}

TEST(ForwardingGraph, BinaryRoundTrip) {
  cg::graph::ForwardingGraph g({10, 20, 30}, {{0, 1, 3}, {2, 0, 1}});
  auto p = std::filesystem::temp_directory_path() / "cg_graph_roundtrip.bin";
  cg::graph::save_binary(p, g);
  EXPECT_EQ(cg::graph::load_binary(p), g);
  std::filesystem::remove(p);
}
