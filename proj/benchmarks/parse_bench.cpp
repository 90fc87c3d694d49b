#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "bimgraph/graph/ifc_builder.hpp"
#include "bimgraph/step/parser.hpp"
#include "support/synthetic.hpp"

using namespace bimgraph;

namespace {

const std::string& model_text(std::size_t instances) {
  static std::map<std::size_t, std::string> cache;
  auto& text = cache[instances];
  if (text.empty()) {
    testkit::BuildingParams p;
    p.storeys = 3;
    p.spaces_per_storey = 10;
    p.walls_per_storey = 24;
    p.target_instances = instances;
    text = testkit::synthetic_building(p).text;
  }
  return text;
}

void BM_ParseStep(benchmark::State& state) {
  const auto& text = model_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(step::parse_file(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParseStep)->Arg(10'000)->Arg(50'000)->Arg(200'000)->Unit(benchmark::kMillisecond);

void BM_BuildGraph(benchmark::State& state) {
  auto file = step::parse_file(model_text(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(graph::build_graph(file));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildGraph)->Arg(10'000)->Arg(50'000)->Arg(200'000)->Unit(benchmark::kMillisecond);

}  // namespace
