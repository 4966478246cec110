#include <benchmark/benchmark.h>

#include "l2r/datagen.hpp"
#include "l2r/residual_model.hpp"

using namespace l2r;

namespace {

struct Setup {
  SyntheticDataset ds;
  ModelParams params;
  std::vector<TrainingExample> batch;
};

Setup setup(std::size_t hidden) {
  GenerationConfig g;
  g.route_count = 32;
  Setup s{generate_dataset(g), {}, {}};
  ModelShape shape;
  shape.edges = s.ds.net.edge_count();
  shape.hidden = hidden;
  shape.query_width = query_width_for(s.ds.traffic.interval_count());
  s.params = init_params(shape, 1);
  s.batch = make_examples(s.ds.routes, s.ds.net, s.ds.traffic);
  return s;
}

void BM_Forward(benchmark::State& state) {
  const auto s = setup(static_cast<std::size_t>(state.range(0)));
  const ModelContext ctx(s.ds.net, s.ds.traffic);
  const auto& ex = s.batch.front();
  for (auto _ : state) benchmark::DoNotOptimize(forward(s.params, ctx, ex.query, ex.theory));
}

void BM_Backward(benchmark::State& state) {
  const auto s = setup(static_cast<std::size_t>(state.range(0)));
  const ModelContext ctx(s.ds.net, s.ds.traffic);
  for (auto _ : state) benchmark::DoNotOptimize(backward(s.params, ctx, s.batch));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.batch.size()));
}

}  // namespace

BENCHMARK(BM_Forward)->Arg(8)->Arg(32)->Arg(128);
BENCHMARK(BM_Backward)->Arg(8)->Arg(32)->Arg(128);
