#include "bimgraph/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <boost/math/statistics/bivariate_statistics.hpp>
#include <boost/math/statistics/univariate_statistics.hpp>

#include "bimgraph/query/parser.hpp"

namespace bimgraph::bench {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start, Clock::time_point end) {
  return std::chrono::duration<double, std::milli>(end - start).count();
}

}  // namespace

InvalidIterations::InvalidIterations() : Error("iterations must be at least 1") {}

InsufficientSamples::InsufficientSamples(std::size_t got)
    : Error("correlation needs at least 3 models, got " + std::to_string(got)) {}

void summarize(BenchResult& r) {
  const auto& d = r.durations_ms;
  if (d.empty()) return;
  auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  r.min_ms = *lo;
  r.max_ms = *hi;
  r.mean_ms = std::clamp(std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size()), r.min_ms, r.max_ms);
}

BenchResult bench_query(const graph::PropertyGraph& graph, std::string_view query_text, std::size_t iterations,
                        const exec::ExecOptions& options) {
  if (iterations == 0) throw InvalidIterations();
  BenchResult r;
  r.query = std::string(query_text);
  r.iterations = iterations;

  auto t0 = Clock::now();
  auto ast = query::parse_query(query_text);
  r.parse_ms = elapsed_ms(t0, Clock::now());

  r.durations_ms.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    auto start = Clock::now();
    auto result = exec::execute(graph, ast, options);
    auto end = Clock::now();
    r.durations_ms.push_back(elapsed_ms(start, end));
    r.rows = result.rows.size();
  }
  summarize(r);
  return r;
}

BenchResult bench_callable(const std::function<std::size_t()>& fn, std::size_t iterations) {
  if (iterations == 0) throw InvalidIterations();
  BenchResult r;
  r.iterations = iterations;
  r.durations_ms.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    auto start = Clock::now();
    r.rows = fn();
    auto end = Clock::now();
    r.durations_ms.push_back(elapsed_ms(start, end));
  }
  summarize(r);
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (x.size() != y.size() || x.size() < 2 || boost::math::statistics::variance(x) == 0.0 ||
      boost::math::statistics::variance(y) == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  double r = boost::math::statistics::correlation_coefficient(x, y);
  return std::clamp(r, -1.0, 1.0);
}

Correlation correlate(const std::vector<SizeSample>& samples) {
  if (samples.size() < 3) throw InsufficientSamples(samples.size());
  std::vector<double> nodes, edges, times;
  for (const auto& s : samples) {
    nodes.push_back(s.nodes);
    edges.push_back(s.edges);
    times.push_back(s.min_ms);
  }
  Correlation c;
  c.samples = samples.size();
  c.nodes = pearson(nodes, times, &c.nodes_degenerate);
  c.edges = pearson(edges, times, &c.edges_degenerate);
  return c;
}

CorrelationReport correlate(const std::map<std::string, std::vector<SizeSample>>& families) {
  CorrelationReport out;
  for (const auto& [family, samples] : families) out[family] = correlate(samples);
  return out;
}

double coefficient_of_variation(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = boost::math::statistics::mean(values);
  if (mean == 0.0) return 0.0;
  return std::sqrt(boost::math::statistics::sample_variance(values)) / std::abs(mean);
}

Stability stability(const std::vector<BenchResult>& repetitions) {
  std::vector<double> mins, means, maxes;
  for (const auto& r : repetitions) {
    mins.push_back(r.min_ms);
    means.push_back(r.mean_ms);
    maxes.push_back(r.max_ms);
  }
  return {coefficient_of_variation(mins), coefficient_of_variation(means), coefficient_of_variation(maxes),
          repetitions.size()};
}

std::string format_results(const std::vector<BenchResult>& results) {
  std::string out = "query\titerations\trows\tparse_ms\tmax_ms\tmean_ms\tmin_ms\n";
  char buf[160];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "\t%zu\t%zu\t%.4f\t%.4f\t%.4f\t%.4f\n", r.iterations, r.rows, r.parse_ms, r.max_ms,
                  r.mean_ms, r.min_ms);
    out += r.query + buf;
  }
  return out;
}

}  // namespace bimgraph::bench
