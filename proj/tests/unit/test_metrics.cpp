#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "l2r/metrics.hpp"
#include "oracles.hpp"

using namespace l2r;

namespace {

EdgeMask mask(std::size_t m, std::initializer_list<EdgeId> on) {
  EdgeMask out(m, 0);
  for (EdgeId e : on) out[e] = 1;
  return out;
}

// A straight line 0 -> 1 -> ... of segments with given lengths.
RoadNetwork line(const std::vector<double>& lengths) {
  std::vector<Intersection> nodes;
  std::vector<RoadSegment> segs;
  double x = 0.0;
  nodes.push_back({0, {0, 0}});
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    x += lengths[i];
    nodes.push_back({static_cast<NodeId>(i + 1), {x, 0}});
    RoadSegment s;
    s.id = static_cast<EdgeId>(i);
    s.from = static_cast<NodeId>(i);
    s.to = static_cast<NodeId>(i + 1);
    s.length = lengths[i];
    s.speed_limit = 10.0;
    segs.push_back(s);
  }
  return RoadNetwork(nodes, segs);
}

}  // namespace

TEST(Metrics, IdentityIsPerfect) {
  const auto m = mask(10, {0, 2, 4, 6, 8});
  const auto r = precision_recall_f1(m, m);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
}

TEST(Metrics, DisjointIsZero) {
  const auto r = precision_recall_f1(mask(10, {0, 1}), mask(10, {2, 3, 4}));
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
}

TEST(Metrics, HandDerivedFixture) {
  // pred 4 edges, truth 5 edges, 3 shared.
  const auto r = precision_recall_f1(mask(10, {0, 1, 2, 9}), mask(10, {0, 1, 2, 5, 6}));
  EXPECT_EQ(r.precision, 3.0 / 4.0);
  EXPECT_EQ(r.recall, 3.0 / 5.0);
  EXPECT_EQ(r.f1, 2.0 * 0.75 * 0.6 / (0.75 + 0.6));
  EXPECT_NEAR(r.f1, 0.6667, 5e-5);
}

TEST(Metrics, EmptyPrediction) {
  const auto r = precision_recall_f1(mask(4, {}), mask(4, {1}));
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_THROW(precision_recall_f1(mask(4, {}), mask(5, {1})), StructuralError);
}

TEST(Metrics, HarmonicMeanAndSwapSymmetry) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    EdgeMask a(16), b(16);
    for (auto& x : a) x = rng() % 2;
    for (auto& x : b) x = rng() % 2;
    b[trial % 16] = 1;
    const auto r = precision_recall_f1(a, b);
    EXPECT_LT(std::abs(r.f1 * (r.precision + r.recall) - 2.0 * r.precision * r.recall), 1e-12);
    for (double v : {r.precision, r.recall, r.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (selected_count(a) > 0) {
      const auto s = precision_recall_f1(b, a);
      EXPECT_EQ(s.precision, r.recall);
      EXPECT_EQ(s.recall, r.precision);
      EXPECT_EQ(s.f1, r.f1);
    }
  }
}

TEST(Metrics, MatchDistance) {
  // Truth is 1000 m over four segments; the prediction shares the 300 m one.
  const auto net = line({300.0, 200.0, 250.0, 250.0, 80.0});
  const auto truth = mask(5, {0, 1, 2, 3});
  EXPECT_EQ(match_distance_ratio(net, truth, truth), 1.0);
  EXPECT_DOUBLE_EQ(match_distance_ratio(net, mask(5, {0, 4}), truth), 0.3);
  EXPECT_EQ(match_distance_ratio(net, mask(5, {4}), truth), 0.0);
  EXPECT_THROW(match_distance_ratio(net, truth, mask(5, {})), DomainError);
  EXPECT_THROW(match_distance_ratio(net, mask(4, {}), truth), StructuralError);
}

TEST(Metrics, NinetyPercentMatch) {
  // Truth covers two 100 m segments; a prediction holding one of them matches 0.5.
  const auto net = line({100.0, 100.0});
  const Route full{{0, 2, 0}, mask(2, {0, 1})};
  const Route half{{0, 2, 0}, mask(2, {0})};
  const Route none{{0, 2, 0}, mask(2, {})};
  std::vector<Route> preds, truths;
  for (int i = 0; i < 10; ++i) {
    preds.push_back(i < 4 ? full : half);
    truths.push_back(full);
  }
  EXPECT_DOUBLE_EQ(ninety_percent_match(preds, truths, net), 0.4);
  EXPECT_EQ(ninety_percent_match(truths, truths, net), 1.0);
  const std::vector<Route> nones(10, none);
  EXPECT_EQ(ninety_percent_match(nones, truths, net), 0.0);
  EXPECT_THROW(ninety_percent_match({}, {}, net), DomainError);
}

TEST(Metrics, ThresholdIsInclusive) {
  const auto net = line({900.0, 100.0});
  const Route truth{{0, 2, 0}, mask(2, {0, 1})};
  const Route pred{{0, 1, 0}, mask(2, {0})};
  EXPECT_EQ(ninety_percent_match(std::vector<Route>{pred}, std::vector<Route>{truth}, net), 1.0);
}

TEST(Metrics, ReportAveragesPerRoute) {
  const auto net = line({100.0, 100.0, 200.0});
  const Route t1{{0, 3, 0}, mask(3, {0, 1, 2})};
  const Route p1{{0, 3, 0}, mask(3, {0, 1, 2})};
  const Route t2{{0, 2, 0}, mask(3, {0, 1})};
  const Route p2{{0, 1, 0}, mask(3, {0})};
  const std::vector<Route> preds{p1, p2}, truths{t1, t2};
  const auto r = evaluate_routes("x", preds, truths, net);
  EXPECT_EQ(r.method, "x");
  EXPECT_EQ(r.count, 2u);
  // Route 2: P = 1, R = 0.5, F1 = 2/3, match 0.5.
  EXPECT_DOUBLE_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.75);
  EXPECT_DOUBLE_EQ(r.f1, (1.0 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(r.match_distance, 0.75);
  EXPECT_DOUBLE_EQ(r.match90, 0.5);
  EXPECT_THROW(evaluate_routes("x", std::vector<Route>{p1}, truths, net), StructuralError);
}

TEST(Metrics, CsvLayout) {
  MetricReport a;
  a.method = "astar";
  a.precision = 0.5;
  a.recall = 0.25;
  a.f1 = 1.0 / 3.0;
  a.match_distance = 0.125;
  a.match90 = 0.0;
  std::ostringstream out;
  write_metric_csv(out, std::vector<MetricReport>{a});
  EXPECT_EQ(out.str(),
            "method,P,R,F1,match_dist,match90\n"
            "astar,0.500000,0.250000,0.333333,0.125000,0.000000\n");
}
