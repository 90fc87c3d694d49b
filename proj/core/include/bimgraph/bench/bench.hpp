#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bimgraph/common.hpp"
#include "bimgraph/exec/executor.hpp"
#include "bimgraph/graph/property_graph.hpp"

namespace bimgraph::bench {

struct BenchResult {
  std::string query;
  std::size_t iterations = 0;
  /// Milliseconds per iteration, steady clock.
  std::vector<double> durations_ms;
  double max_ms = 0;
  double mean_ms = 0;
  double min_ms = 0;
  /// Parsing is timed once, outside the loop.
  double parse_ms = 0;
  /// Row count of the final run.
  std::size_t rows = 0;
};

class InvalidIterations : public Error {
 public:
  InvalidIterations();
};

class InsufficientSamples : public Error {
 public:
  explicit InsufficientSamples(std::size_t got);
};

/// Parses once (errors propagate before timing), then times execute() `iterations` times.
BenchResult bench_query(const graph::PropertyGraph& graph, std::string_view query_text, std::size_t iterations = 100,
                        const exec::ExecOptions& options = {});

/// Times an arbitrary callable; its return value is recorded as the row count.
BenchResult bench_callable(const std::function<std::size_t()>& fn, std::size_t iterations = 100);

/// Fills max/mean/min from durations_ms.
void summarize(BenchResult& result);

struct SizeSample {
  std::string model;
  double nodes = 0;
  double edges = 0;
  double min_ms = 0;
};

struct Correlation {
  double nodes = 0;
  double edges = 0;
  /// Zero variance on either side; the coefficient is reported as 0.
  bool nodes_degenerate = false;
  bool edges_degenerate = false;
  std::size_t samples = 0;
};

/// Pearson r of subgraph size against min time. Needs at least three models.
Correlation correlate(const std::vector<SizeSample>& samples);

using CorrelationReport = std::map<std::string, Correlation>;
CorrelationReport correlate(const std::map<std::string, std::vector<SizeSample>>& families);

/// Pearson r; 0 with `degenerate` set when either side has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y, bool* degenerate = nullptr);

/// Sample standard deviation over mean; 0 for fewer than two values or a zero mean.
double coefficient_of_variation(const std::vector<double>& values);

struct Stability {
  double cv_min = 0;
  double cv_mean = 0;
  double cv_max = 0;
  std::size_t repetitions = 0;

  bool min_most_stable() const { return cv_min <= cv_mean && cv_min <= cv_max; }
};

/// Variation of each statistic across repeated harness runs of the same query.
Stability stability(const std::vector<BenchResult>& repetitions);

std::string format_results(const std::vector<BenchResult>& results);

}  // namespace bimgraph::bench
