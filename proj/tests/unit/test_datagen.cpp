#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "l2r/datagen.hpp"
#include "l2r/router.hpp"
#include "oracles.hpp"

using namespace l2r;

namespace {

bool line_is_uniform(const RoadNetwork& net, std::size_t cols, bool row, std::size_t k) {
  std::set<bool> classes;
  for (const auto& s : net.segments()) {
    const auto fr = s.from / cols, fc = s.from % cols, tr = s.to / cols, tc = s.to % cols;
    const bool on = row ? (fr == k && tr == k) : (fc == k && tc == k);
    if (on) classes.insert(is_arterial(s));
  }
  return classes.size() == 1;
}

TrafficTensor free_flow(const RoadNetwork& net) {
  TrafficTensor v(net.edge_count(), 1, 1.0);
  for (const auto& s : net.segments()) v.set(s.id, 0, s.speed_limit);
  return v;
}

}  // namespace

TEST(GridCity, Sizes) {
  const auto a = gen_grid_city(3, 3, 300.0, 1);
  EXPECT_EQ(a.node_count(), 9u);
  EXPECT_EQ(a.edge_count(), 24u);
  const auto b = gen_grid_city(2, 2, 300.0, 1);
  EXPECT_EQ(b.node_count(), 4u);
  EXPECT_EQ(b.edge_count(), 8u);
  const auto c = gen_grid_city(4, 6, 150.0, 1);
  EXPECT_EQ(c.edge_count(), 2u * (4 * 5 + 3 * 6));
}

TEST(GridCity, Deterministic) {
  EXPECT_EQ(serialize_roadnet(gen_grid_city(3, 3, 300.0, 17)),
            serialize_roadnet(gen_grid_city(3, 3, 300.0, 17)));
  bool any_difference = false;
  for (std::uint64_t s = 0; s < 20 && !any_difference; ++s) {
    any_difference = serialize_roadnet(gen_grid_city(3, 3, 300.0, s)) !=
                     serialize_roadnet(gen_grid_city(3, 3, 300.0, s + 1));
  }
  EXPECT_TRUE(any_difference);
}

TEST(GridCity, GeometryAndClasses) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto net = gen_grid_city(3, 4, 250.0, seed);
    for (NodeId i = 0; i < net.node_count(); ++i) {
      EXPECT_EQ(net.intersection(i).position.x, 250.0 * (i % 4));
      EXPECT_EQ(net.intersection(i).position.y, 250.0 * (i / 4));
    }
    bool any_arterial = false;
    for (const auto& s : net.segments()) {
      EXPECT_EQ(s.length, 250.0);
      any_arterial |= is_arterial(s);
      EXPECT_EQ(s.speed_limit, is_arterial(s) ? kArterialSpeedLimit : kLocalSpeedLimit);
      EXPECT_GT(s.condition[ConditionFeature::lane_count], 0.0);
      // Twin segment exists with the same condition.
      const auto twin = std::find_if(net.segments().begin(), net.segments().end(), [&](auto& t) {
        return t.from == s.to && t.to == s.from;
      });
      ASSERT_NE(twin, net.segments().end());
      EXPECT_EQ(twin->condition.values, s.condition.values);
    }
    EXPECT_TRUE(any_arterial);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_TRUE(line_is_uniform(net, 4, true, r));
    for (std::size_t c = 0; c < 4; ++c) EXPECT_TRUE(line_is_uniform(net, 4, false, c));
  }
}

TEST(GridCity, DegenerateDimensions) {
  EXPECT_THROW(gen_grid_city(1, 3, 300.0, 1), ConfigError);
  EXPECT_THROW(gen_grid_city(3, 1, 300.0, 1), ConfigError);
  EXPECT_THROW(gen_grid_city(3, 3, 0.0, 1), ConfigError);
}

TEST(GenTraffic, SingleIntervalWithoutCongestionIsBaseSpeed) {
  const auto net = gen_grid_city(3, 3, 300.0, 2);
  TrafficGenConfig c;
  c.intervals = 1;
  c.congestion_probability = 0.0;
  const auto v = gen_traffic(net, c, 5);
  for (const auto& s : net.segments()) EXPECT_EQ(v.at(s.id, 0), 0.7 * s.speed_limit);
}

TEST(GenTraffic, FollowsDiurnalFormulaOrCongestionWindow) {
  const auto net = gen_grid_city(3, 3, 300.0, 3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TrafficGenConfig c;
    c.intervals = 12;
    c.congestion_window_fraction = 0.25;
    const auto v = gen_traffic(net, c, seed);
    EXPECT_NO_THROW(v.validate(net));
    std::set<std::size_t> window;
    for (const auto& s : net.segments()) {
      const double a = is_arterial(s) ? 0.35 : 0.1;
      std::vector<std::size_t> hit;
      for (std::size_t t = 0; t < 12; ++t) {
        const double ph = std::sin(M_PI * static_cast<double>(t) / 12.0);
        const double diurnal = 0.7 * s.speed_limit * (1.0 - a * ph * ph);
        const double x = v.at(s.id, t);
        if (x == 0.15 * s.speed_limit) {
          hit.push_back(t);
        } else {
          EXPECT_NEAR(x, diurnal, 1e-12 * diurnal);
        }
      }
      if (!hit.empty()) {
        EXPECT_EQ(hit.size(), 3u);
        EXPECT_EQ(hit.back() - hit.front(), 2u);
        window.insert(hit.front());
      }
    }
    EXPECT_LE(window.size(), 1u);  // one shared event window
  }
}

TEST(GenTraffic, CongestedSegmentDuringWindow) {
  const auto net = gen_grid_city(3, 3, 300.0, 4);
  TrafficGenConfig c;
  c.intervals = 8;
  c.congestion_probability = 1.0;
  const auto v = gen_traffic(net, c, 9);
  std::size_t congested_cells = 0;
  for (const auto& s : net.segments()) {
    for (std::size_t t = 0; t < 8; ++t) congested_cells += v.at(s.id, t) == 0.15 * s.speed_limit;
  }
  EXPECT_EQ(congested_cells, net.edge_count() * 4);  // half of eight intervals, every segment
}

TEST(GenTraffic, Deterministic) {
  const auto net = gen_grid_city(3, 3, 300.0, 5);
  EXPECT_EQ(gen_traffic(net, 16, 42), gen_traffic(net, 16, 42));
  EXPECT_THROW(gen_traffic(net, 0, 42), ConfigError);
}

TEST(Driver, Disutility) {
  ConditionVector c;
  c[ConditionFeature::road_level] = 1.0;
  c[ConditionFeature::lane_count] = 0.5;
  c[ConditionFeature::bus_lines] = 0.5;
  EXPECT_DOUBLE_EQ(condition_disutility(c), 1.0 - 0.5 - 0.15 - 0.1);
  const auto net = gen_grid_city(3, 3, 300.0, 6);
  double worst_arterial = 0.0, best_local = 1.0;
  for (const auto& s : net.segments()) {
    const double d = condition_disutility(s.condition);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    if (is_arterial(s)) worst_arterial = std::max(worst_arterial, d);
    else best_local = std::min(best_local, d);
  }
  EXPECT_LT(worst_arterial, best_local);
  EXPECT_THROW(validate_driver({0.0, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(validate_driver({1.0, -1.0, 1.0}), ConfigError);
  EXPECT_THROW(validate_driver({1.0, 1.0, -1.0}), ConfigError);
}

TEST(GenRoutes, OracleEquivalenceWithoutConditionsOrNoise) {
  const auto net = gen_grid_city(3, 3, 300.0, 7);
  const auto v = gen_traffic(net, 16, 7);
  const auto routes = gen_routes(net, v, {1.0, 0.0, 0.0}, 300, 7);
  for (const auto& r : routes) {
    EXPECT_EQ(r.edges, route_di_time(net, v, r.query).edges);
  }
}

TEST(GenRoutes, ValidDistinctAndDeterministic) {
  const auto net = gen_grid_city(3, 3, 300.0, 8);
  const auto v = gen_traffic(net, 16, 8);
  const auto a = gen_routes(net, v, {}, 400, 8);
  ASSERT_EQ(a.size(), 400u);
  std::set<std::size_t> intervals;
  for (const auto& r : a) {
    EXPECT_NE(r.query.origin, r.query.destination);
    EXPECT_LT(r.query.departure_interval, 16u);
    EXPECT_TRUE(is_valid_path(net, r));
    intervals.insert(r.query.departure_interval);
  }
  EXPECT_EQ(intervals.size(), 16u);
  EXPECT_EQ(gen_routes(net, v, {}, 400, 8), a);
  EXPECT_THROW(gen_routes(net, v, {}, 0, 8), ConfigError);
}

TEST(GenRoutes, StrongConditionWeightPrefersArterials) {
  double arterial_len = 0.0, total_len = 0.0;
  std::size_t counted = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto net = gen_grid_city(3, 3, 300.0, seed);
    const auto v = free_flow(net);
    const auto w = travel_times(net, v, 0);
    const auto routes = gen_routes(net, v, {1.0, 500.0, 4.0}, 200, seed);
    for (const auto& r : routes) {
      const double fastest =
          l2r::testing::brute_force_shortest(net, w, r.query.origin, r.query.destination).cost;
      bool arterial_option = false;
      for (const auto& p :
           l2r::testing::enumerate_simple_paths(net, r.query.origin, r.query.destination)) {
        const bool all_arterial = std::all_of(p.begin(), p.end(),
                                              [&](EdgeId e) { return is_arterial(net.segment(e)); });
        if (all_arterial && l2r::testing::path_cost(p, w) <= 1.3 * fastest) arterial_option = true;
      }
      if (!arterial_option) continue;
      ++counted;
      for (EdgeId j = 0; j < r.edges.size(); ++j) {
        if (!r.edges[j]) continue;
        total_len += net.segment(j).length;
        if (is_arterial(net.segment(j))) arterial_len += net.segment(j).length;
      }
    }
  }
  ASSERT_GT(counted, 50u);
  EXPECT_GE(arterial_len / total_len, 0.8);
}

TEST(Subsample, Basics) {
  std::vector<std::size_t> ids(1000);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  EXPECT_EQ(subsample(ids, 1.0, 3), ids);
  EXPECT_EQ(subsample(ids, 0.05, 3).size(), 50u);
  EXPECT_EQ(subsample(ids, 0.0001, 3).size(), 1u);
  EXPECT_EQ(subsample_indices(900, 0.01, 3).size(), 9u);
  EXPECT_EQ(subsample_indices(7, 0.5, 3).size(), 4u);
  EXPECT_EQ(subsample(ids, 0.2, 3), subsample(ids, 0.2, 3));
  EXPECT_THROW(subsample(ids, 0.0, 3), ConfigError);
  EXPECT_THROW(subsample(ids, 1.5, 3), ConfigError);
  EXPECT_THROW(subsample(std::vector<std::size_t>{}, 0.5, 3), ConfigError);
}

TEST(Subsample, Nested) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < 900; ++i) ids.push_back(3 * i + 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<double> fractions{1.0, 0.5, 0.2, 0.05, 0.01};
    std::vector<std::set<std::size_t>> sets;
    for (double f : fractions) {
      const auto s = subsample(ids, f, seed);
      EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
      sets.emplace_back(s.begin(), s.end());
      EXPECT_EQ(sets.back().size(), s.size());
    }
    for (std::size_t k = 1; k < sets.size(); ++k) {
      EXPECT_TRUE(std::includes(sets[k - 1].begin(), sets[k - 1].end(), sets[k].begin(),
                                sets[k].end()));
    }
  }
}

TEST(GenerateDataset, ReproducibleFromManifest) {
  GenerationConfig g;
  g.route_count = 150;
  g.seed = 77;
  const auto a = generate_dataset(g);
  const auto b = generate_dataset(a.manifest);
  EXPECT_EQ(serialize_roadnet(a.net), serialize_roadnet(b.net));
  EXPECT_EQ(a.traffic, b.traffic);
  EXPECT_EQ(a.routes, b.routes);
  for (const auto& r : a.routes) EXPECT_TRUE(is_valid_path(a.net, r));
}
