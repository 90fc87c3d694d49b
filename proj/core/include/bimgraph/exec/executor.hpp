#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bimgraph/graph/property_graph.hpp"
#include "bimgraph/query/ast.hpp"
#include "bimgraph/query/parser.hpp"

namespace bimgraph::exec {

struct ExecOptions {
  /// Label tests accept subclasses of the written label.
  bool hierarchy_aware = true;
};

struct NodeRef {
  InstanceId id;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

struct EdgeRef {
  graph::EdgeIndex index;
  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

/// Alternating nodes and edges in pattern order; nodes.size() == edges.size() + 1.
struct PathValue {
  std::vector<InstanceId> nodes;
  std::vector<graph::EdgeIndex> edges;
  friend bool operator==(const PathValue&, const PathValue&) = default;
};

struct Null {
  friend bool operator==(Null, Null) { return true; }
};

using Value = std::variant<Null, NodeRef, EdgeRef, PathValue, graph::PropValue>;

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<query::ReturnItem::Kind> column_kinds;
  std::vector<std::vector<Value>> rows;
};

/// One complete assignment of pattern elements, anonymous ones included.
struct Binding {
  std::vector<InstanceId> nodes;
  std::vector<graph::EdgeIndex> edges;
  friend auto operator<=>(const Binding&, const Binding&) = default;
};

/// Slots are numbered by first appearance in the query text. A named node variable
/// used in several places is one slot; every anonymous node is its own slot.
struct MatchResult {
  std::vector<std::string> node_slots;  // variable name, empty when anonymous
  std::vector<std::string> edge_slots;
  /// Sorted ascending, no duplicates.
  std::vector<Binding> bindings;
};

class NoPathColumn : public query::QueryError {
 public:
  NoPathColumn();
};

/// All pattern bindings that satisfy labels, property maps and WHERE. Matched edges are
/// pairwise distinct within a binding; nodes may repeat.
MatchResult match(const graph::PropertyGraph& graph, const query::QueryAst& ast, const ExecOptions& options = {});

/// Rows follow binding order. count() items group by the remaining items.
ResultSet execute(const graph::PropertyGraph& graph, const query::QueryAst& ast, const ExecOptions& options = {});
ResultSet execute(const graph::PropertyGraph& graph, std::string_view query_text, const ExecOptions& options = {});

/// Drops repeated rows, keeping the first occurrence.
ResultSet distinct(ResultSet result);

/// Edge properties visible to WHERE and RETURN: `name` (the label) and `pos` when set.
std::optional<graph::PropValue> edge_property(const graph::PropertyGraph& graph, graph::EdgeIndex edge,
                                              std::string_view key);

struct Subgraph {
  std::vector<InstanceId> nodes;          // sorted, distinct
  std::vector<graph::EdgeIndex> edges;    // sorted, distinct
};

/// Union of every path value in the result. Throws NoPathColumn when no column holds paths.
Subgraph result_subgraph(const ResultSet& result);

struct PlanStep {
  std::string description;
  double estimated_rows = 0;
};

struct Plan {
  std::vector<PlanStep> steps;
  /// One entry per distinct label: the label and the entity set it expands to.
  std::vector<std::string> label_expansions;
  std::vector<std::string> warnings;
  bool count_fast_path = false;

  std::string to_string() const;
};

Plan explain(const graph::PropertyGraph& graph, const query::QueryAst& ast, const ExecOptions& options = {});

/// `(#20909:IfcSpace)`, `[#3:RelatingObject]`, literal text, or a path.
std::string format_value(const graph::PropertyGraph& graph, const Value& value);
std::string format_prop(const graph::PropValue& value);
/// Plain-text table with a header row.
std::string format_table(const graph::PropertyGraph& graph, const ResultSet& result);

}  // namespace bimgraph::exec
