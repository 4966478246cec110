#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "l2r/router.hpp"
#include "oracles.hpp"

using namespace l2r;
using l2r::testing::brute_force_shortest;
using l2r::testing::fixture_path;

namespace {

// Segment ids of the 3x3 fixture for a directed street a -> b.
EdgeId edge_between(const RoadNetwork& net, NodeId a, NodeId b) {
  for (EdgeId e : net.outgoing(a)) {
    if (net.segment(e).to == b) return e;
  }
  throw std::logic_error("no such street");
}

std::vector<EdgeId> walk(const RoadNetwork& net, std::initializer_list<NodeId> nodes) {
  std::vector<EdgeId> out;
  const std::vector<NodeId> v(nodes);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back(edge_between(net, v[i], v[i + 1]));
  return out;
}

std::vector<double> time_weights(const RoadNetwork& net, const TrafficTensor& v, std::size_t t) {
  return travel_times(net, v, t);
}

}  // namespace

TEST(Router, UnitWeightsTieBreakOnTwoByTwo) {
  const auto net = load_roadnet(fixture_path("grid2x2.json"));
  const std::vector<double> w(net.edge_count(), 1.0);
  const auto r = dijkstra(net, w, {0, 3, 0});
  EXPECT_EQ(r.total_cost, 2.0);
  // Both 0-1-3 and 0-2-3 cost 2; the label arriving from intersection 1 wins.
  EXPECT_EQ(r.path, walk(net, {0, 1, 3}));
  EXPECT_EQ(r.edges, mask_from_path(net, r.path));
}

TEST(Router, CheapZigZagCorridor) {
  const auto net = load_roadnet(fixture_path("grid3x3.json"));
  const auto corridor = walk(net, {0, 1, 4, 3, 6, 7, 8});
  std::vector<double> w(net.edge_count(), 10.0);
  for (EdgeId e : corridor) w[e] = 1.0;
  const auto brute = brute_force_shortest(net, w, 0, 8);
  ASSERT_EQ(brute.argmins.size(), 1u);
  EXPECT_EQ(brute.argmins[0], corridor);

  const auto r = dijkstra(net, w, {0, 8, 0});
  EXPECT_EQ(r.path, corridor);
  EXPECT_EQ(r.total_cost, 6.0);
}

TEST(Router, IslandOriginHasNoPath) {
  // Intersection 2 has no outgoing segments.
  std::vector<Intersection> nodes{{0, {0, 0}}, {1, {100, 0}}, {2, {0, 100}}};
  std::vector<RoadSegment> segs(3);
  auto link = [&](EdgeId id, NodeId f, NodeId t) {
    segs[id].id = id;
    segs[id].from = f;
    segs[id].to = t;
    segs[id].length = 100.0 * (f == 2 || t == 2 ? 1.5 : 1.0);
    segs[id].speed_limit = 10.0;
  };
  link(0, 0, 1);
  link(1, 1, 0);
  link(2, 0, 2);
  const RoadNetwork net(nodes, segs);
  const std::vector<double> w(3, 1.0);
  try {
    dijkstra(net, w, {2, 0, 0});
    FAIL() << "expected no-path error";
  } catch (const NoPathError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_path);
    EXPECT_EQ(e.query(), (RouteQuery{2, 0, 0}));
  }
  const TrafficTensor v(3, 1, 10.0);
  EXPECT_THROW(astar(net, v, {2, 1, 0}), NoPathError);
  EXPECT_THROW(route_di_dis(net, {2, 1, 0}), NoPathError);
  EXPECT_THROW(route_di_time(net, v, {2, 1, 0}), NoPathError);
  EXPECT_NO_THROW(astar(net, v, {0, 2, 0}));
}

TEST(Router, RejectsBadWeightsAndQueries) {
  const auto net = load_roadnet(fixture_path("grid2x2.json"));
  std::vector<double> w(net.edge_count(), 1.0);
  EXPECT_THROW(dijkstra(net, std::vector<double>(3, 1.0), {0, 3, 0}), StructuralError);
  w[2] = 0.0;
  EXPECT_THROW(dijkstra(net, w, {0, 3, 0}), DomainError);
  w[2] = -1.0;
  EXPECT_THROW(dijkstra(net, w, {0, 3, 0}), DomainError);
  w[2] = 1.0;
  EXPECT_THROW(dijkstra(net, w, {0, 0, 0}), ValidationError);
  EXPECT_THROW(dijkstra(net, w, {0, 11, 0}), LookupError);
  const TrafficTensor v(net.edge_count(), 2, 5.0);
  EXPECT_THROW(astar(net, v, {0, 3, 2}), IndexError);
}

TEST(Router, AstarAdjacentCornersUniformSpeeds) {
  const auto net = load_roadnet(fixture_path("grid3x3.json"));
  const TrafficTensor v(net.edge_count(), 1, 10.0);
  const auto brute = brute_force_shortest(net, time_weights(net, v, 0), 0, 2);
  ASSERT_EQ(brute.argmins.size(), 1u);
  const auto r = astar(net, v, {0, 2, 0});
  EXPECT_EQ(r.path, brute.argmins[0]);
  EXPECT_EQ(r.path, walk(net, {0, 1, 2}));
  EXPECT_EQ(r.total_cost, brute.cost);
}

TEST(Router, AstarAvoidsCongestedCenter) {
  const auto net = load_roadnet(fixture_path("grid3x3.json"));
  TrafficTensor v(net.edge_count(), 1, 10.0);
  for (const auto& s : net.segments()) {
    if (s.from == 4 || s.to == 4) v.set(s.id, 0, 1.0);
  }
  const auto brute = brute_force_shortest(net, time_weights(net, v, 0), 0, 8);
  const auto r = astar(net, v, {0, 8, 0});
  EXPECT_EQ(r.total_cost, brute.cost);
  EXPECT_NE(std::find(brute.argmins.begin(), brute.argmins.end(), r.path), brute.argmins.end());
  for (EdgeId e : r.path) {
    EXPECT_NE(net.segment(e).from, 4u);
    EXPECT_NE(net.segment(e).to, 4u);
  }
  EXPECT_EQ(r.path.size(), 4u);
}

TEST(Router, DistanceAndTimeAgreeUnderUniformConditions) {
  const auto net = load_roadnet(fixture_path("grid3x3.json"));
  const TrafficTensor v(net.edge_count(), 1, 7.0);
  for (NodeId o = 0; o < 9; ++o) {
    for (NodeId d = 0; d < 9; ++d) {
      if (o == d) continue;
      EXPECT_EQ(route_di_dis(net, {o, d, 0}).edges, route_di_time(net, v, {o, d, 0}).edges);
    }
  }
}

TEST(Router, DistanceAndTimeDifferAcrossSlowSegment) {
  const auto net = load_roadnet(fixture_path("grid2x2.json"));
  TrafficTensor v(net.edge_count(), 1, 10.0);
  const auto dis = route_di_dis(net, {0, 3, 0});
  ASSERT_EQ(dis.path, walk(net, {0, 1, 3}));
  v.set(dis.path[1], 0, 1.0);
  const auto tim = route_di_time(net, v, {0, 3, 0});
  EXPECT_NE(tim.edges, dis.edges);
  const auto brute_t = brute_force_shortest(net, time_weights(net, v, 0), 0, 3);
  ASSERT_EQ(brute_t.argmins.size(), 1u);
  EXPECT_EQ(tim.path, brute_t.argmins[0]);
  const auto brute_d = brute_force_shortest(net, segment_lengths(net), 0, 3);
  EXPECT_EQ(dis.total_cost, brute_d.cost);
}

TEST(Router, AstarMatchesDijkstraAndBruteForceOnRandomInstances) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(2, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = l2r::testing::random_grid(rng, dim(rng), dim(rng));
    const auto v = l2r::testing::random_traffic(rng, net, 3);
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(net.node_count() - 1));
    NodeId o = node(rng), d = node(rng);
    while (d == o) d = node(rng);
    const RouteQuery q{o, d, trial % 3u};
    const auto w = time_weights(net, v, q.departure_interval);
    const auto a = astar(net, v, q);
    const auto k = dijkstra(net, w, q);
    EXPECT_EQ(a.total_cost, k.total_cost);
    EXPECT_TRUE(is_valid_path(net, Route{q, a.edges}));
    const auto brute = brute_force_shortest(net, w, o, d);
    EXPECT_NEAR(a.total_cost, brute.cost, 1e-9 * brute.cost);
    EXPECT_DOUBLE_EQ(l2r::testing::path_cost(a.path, w), a.total_cost);
  }
}

TEST(Router, AstarMatchesDijkstraOnLargerGrids) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto net = l2r::testing::random_grid(rng, 6, 7);
    const auto v = l2r::testing::random_traffic(rng, net, 2);
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(net.node_count() - 1));
    NodeId o = node(rng), d = node(rng);
    while (d == o) d = node(rng);
    const RouteQuery q{o, d, 1};
    EXPECT_EQ(astar(net, v, q).total_cost, dijkstra(net, time_weights(net, v, 1), q).total_cost);
  }
}

TEST(Router, HeuristicIsAdmissibleAlongOptimalPaths) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = l2r::testing::random_grid(rng, 3, 4);
    const auto v = l2r::testing::random_traffic(rng, net, 1);
    const auto w = time_weights(net, v, 0);
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(net.node_count() - 1));
    NodeId o = node(rng), d = node(rng);
    while (d == o) d = node(rng);
    const auto r = astar(net, v, {o, d, 0});
    double remaining = r.total_cost;
    NodeId at = o;
    for (EdgeId e : r.path) {
      EXPECT_LE(astar_heuristic(net, v, 0, at, d), remaining + 1e-12);
      remaining -= w[e];
      at = net.segment(e).to;
    }
    EXPECT_EQ(astar_heuristic(net, v, 0, d, d), 0.0);
    // And against every node's true optimum, not only on-path ones.
    for (NodeId x = 0; x < net.node_count(); ++x) {
      if (x == d) continue;
      const double truth = dijkstra(net, w, {x, d, 0}).total_cost;
      EXPECT_LE(astar_heuristic(net, v, 0, x, d), truth);
    }
  }
}

TEST(Router, HeuristicMatchesStraightLineOverMaxLimit) {
  const auto net = load_roadnet(fixture_path("grid3x3.json"));
  const TrafficTensor v(net.edge_count(), 1, 5.0);
  const double h = astar_heuristic(net, v, 0, 0, 8);
  const double expected = std::sqrt(200.0 * 200.0 * 2.0) / 10.0;
  EXPECT_NEAR(h, expected, 1e-6 * expected);
  EXPECT_LE(h, expected);
}

TEST(Router, Deterministic) {
  std::mt19937_64 rng(13);
  const auto net = l2r::testing::random_grid(rng, 3, 3);
  const auto v = l2r::testing::random_traffic(rng, net, 1);
  for (NodeId d = 1; d < 9; ++d) {
    const auto a = astar(net, v, {0, d, 0});
    const auto b = astar(net, v, {0, d, 0});
    EXPECT_EQ(a.edges, b.edges);
    EXPECT_EQ(a.total_cost, b.total_cost);
  }
}

TEST(Router, TieBreakPrefersSmallerPredecessorThenEdge) {
  // Two parallel segments 0->1 of equal cost: the smaller edge id wins.
  std::vector<Intersection> nodes{{0, {0, 0}}, {1, {100, 0}}};
  std::vector<RoadSegment> segs(2);
  for (EdgeId j = 0; j < 2; ++j) {
    segs[j].id = j;
    segs[j].from = 0;
    segs[j].to = 1;
    segs[j].length = 100.0;
    segs[j].speed_limit = 10.0;
  }
  const RoadNetwork net(nodes, segs);
  EXPECT_EQ(dijkstra(net, std::vector<double>{1.0, 1.0}, {0, 1, 0}).path, (std::vector<EdgeId>{0}));
  EXPECT_EQ(dijkstra(net, std::vector<double>{1.5, 1.0}, {0, 1, 0}).path, (std::vector<EdgeId>{1}));

  // Equal cost into 3 from 1 and 2 on the 2x2 grid, with a bigger edge id on
  // the 1 side: predecessor id still decides.
  const auto grid = load_roadnet(fixture_path("grid2x2.json"));
  const std::vector<double> w(8, 1.0);
  EXPECT_EQ(dijkstra(grid, w, {3, 0, 0}).path, walk(grid, {3, 1, 0}));
}
