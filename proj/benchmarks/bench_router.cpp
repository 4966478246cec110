#include <benchmark/benchmark.h>

#include "l2r/datagen.hpp"
#include "l2r/router.hpp"

using namespace l2r;

namespace {

struct City {
  RoadNetwork net;
  TrafficTensor traffic;
};

City city(std::size_t side) {
  City c{gen_grid_city(side, side, 200.0, 3), {}};
  c.traffic = gen_traffic(c.net, 8, 4);
  return c;
}

void BM_Astar(benchmark::State& state) {
  const auto c = city(static_cast<std::size_t>(state.range(0)));
  const RouteQuery q{0, static_cast<NodeId>(c.net.node_count() - 1), 3};
  for (auto _ : state) benchmark::DoNotOptimize(astar(c.net, c.traffic, q));
}

void BM_DijkstraTime(benchmark::State& state) {
  const auto c = city(static_cast<std::size_t>(state.range(0)));
  const RouteQuery q{0, static_cast<NodeId>(c.net.node_count() - 1), 3};
  for (auto _ : state) benchmark::DoNotOptimize(route_di_time(c.net, c.traffic, q));
}

}  // namespace

BENCHMARK(BM_Astar)->Arg(3)->Arg(10)->Arg(30);
BENCHMARK(BM_DijkstraTime)->Arg(3)->Arg(10)->Arg(30);
