#include <benchmark/benchmark.h>

#include <string>

#include "bimgraph/bim/queries.hpp"
#include "bimgraph/exec/executor.hpp"
#include "bimgraph/graph/ifc_builder.hpp"
#include "bimgraph/query/parser.hpp"
#include "bimgraph/step/parser.hpp"
#include "support/synthetic.hpp"

using namespace bimgraph;

namespace {

// The first large allocation after a build consolidates the allocator's free lists;
// one untimed query keeps that out of the measurements.
const graph::PropertyGraph& settled(const graph::PropertyGraph& g) {
  exec::execute(g, "match (n) return n.id");
  return g;
}

const graph::PropertyGraph& building() {
  static const graph::PropertyGraph g = [] {
    testkit::BuildingParams p;
    p.storeys = 4;
    p.spaces_per_storey = 30;
    p.walls_per_storey = 80;
    p.doors_per_storey = 25;
    p.windows_per_storey = 30;
    p.boundaries_per_space = 8;
    p.duplicate_rate = 0.1;
    p.extra_wall_links = 2;
    p.target_instances = 100'000;
    return graph::build_graph(step::parse_file(testkit::synthetic_building(p).text)).graph;
  }();
  static const auto& once = settled(g);
  return once;
}

const graph::PropertyGraph& labels() {
  static const graph::PropertyGraph g = testkit::large_label_graph(
      1'000'000, {{"IfcDoor", 100}, {"IfcWindow", 1000}, {"IfcSlab", 10000}, {"IfcSpace", 100000}}, 6);
  static const auto& once = settled(g);
  return once;
}

const char* const kFamilies[] = {"spatial-structure", "spatial-containment", "space-boundary", "space-accessibility",
                                 "connectivity", "property-sets", "external-rooms"};

void BM_Functional(benchmark::State& state) {
  const auto& q = bim::functional_query(kFamilies[state.range(0)]);
  state.SetLabel(q.name);
  auto ast = query::parse_query(q.template_text);
  const auto& g = building();
  std::size_t rows = 0;
  for (auto _ : state) rows = exec::execute(g, ast).rows.size();
  state.counters["rows"] = static_cast<double>(rows);
}
BENCHMARK(BM_Functional)->DenseRange(0, std::size(kFamilies) - 1)->Unit(benchmark::kMicrosecond);

void BM_LabelCount(benchmark::State& state) {
  const char* label = state.range(0) == 0 ? "IfcDoor" : state.range(0) == 1 ? "IfcWindow"
                      : state.range(0) == 2 ? "IfcSlab" : "IfcSpace";
  state.SetLabel(label);
  auto ast = query::parse_query(std::string("match (n:") + label + ") return count(n)");
  const auto& g = labels();
  for (auto _ : state) benchmark::DoNotOptimize(exec::execute(g, ast));
}
BENCHMARK(BM_LabelCount)->DenseRange(0, 3);

void BM_LabelScan(benchmark::State& state) {
  auto ast = query::parse_query("match (n:IfcSlab) return n");
  const auto& g = labels();
  for (auto _ : state) benchmark::DoNotOptimize(exec::execute(g, ast));
}
BENCHMARK(BM_LabelScan)->Unit(benchmark::kMicrosecond);

void BM_ParseQuery(benchmark::State& state) {
  const auto& text = bim::functional_query("space-accessibility").template_text;
  for (auto _ : state) benchmark::DoNotOptimize(query::parse_query(text));
}
BENCHMARK(BM_ParseQuery);

void BM_QualityCheck(benchmark::State& state) {
  const auto& g = building();
  for (auto _ : state) benchmark::DoNotOptimize(bim::quality_check(g));
}
BENCHMARK(BM_QualityCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
