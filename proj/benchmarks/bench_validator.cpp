#include <benchmark/benchmark.h>

#include <random>

#include "l2r/datagen.hpp"
#include "l2r/validator.hpp"

using namespace l2r;

static void BM_Project(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto net = gen_grid_city(side, side, 200.0, 3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SoftRoute soft;
  for (std::size_t j = 0; j < net.edge_count(); ++j) soft.probs.push_back(unit(rng));
  const RouteQuery q{0, static_cast<NodeId>(net.node_count() - 1), 0};
  for (auto _ : state) benchmark::DoNotOptimize(project(net, soft, q));
}

BENCHMARK(BM_Project)->Arg(3)->Arg(10)->Arg(30);
