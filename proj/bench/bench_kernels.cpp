#include <benchmark/benchmark.h>

#include <numeric>

#include "supplygraph/kernels.hpp"
#include "supplygraph/synthetic.hpp"

using namespace supplygraph;

namespace {

const SupplyChainGraph& graph() {
  static const SupplyChainGraph g = [] {
    SyntheticOptions o;
    o.nodes = 50'000;
    o.edges = 60'000;
    return build_graph(synthetic_snapshot(o));
  }();
  return g;
}

std::vector<NodeIndex> all_nodes() {
  std::vector<NodeIndex> v(graph().node_count());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

template <auto Fn>
void reach(benchmark::State& state) {
  const auto origins = all_nodes();
  kernels::set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(graph(), origins, Direction::Backward));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(origins.size()));
}

template <auto Fn>
void degrees(benchmark::State& state) {
  kernels::set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(graph(), DegreeDirection::In));
}

template <auto Fn>
void labels(benchmark::State& state) {
  kernels::set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(graph()));
}

}  // namespace

BENCHMARK(reach<kernels::serial::reach_stats>)->Name("reach_stats/serial")->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(reach<kernels::parallel::reach_stats>)->Name("reach_stats/parallel")->DenseRange(1, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(degrees<kernels::serial::degrees>)->Name("degrees/serial")->Arg(1);
BENCHMARK(degrees<kernels::parallel::degrees>)->Name("degrees/parallel")->DenseRange(1, 4);
BENCHMARK(labels<kernels::serial::weak_labels>)->Name("weak_labels/serial")->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(labels<kernels::parallel::weak_labels>)->Name("weak_labels/parallel")->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  graph();  // build outside any timed loop
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
