#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bimgraph/exec/executor.hpp"
#include "bimgraph/graph/property_graph.hpp"
#include "bimgraph/query/ast.hpp"

namespace bimgraph::bim {

enum class ParamType {
  Integer,     // int64 literal
  Identifier,  // text that is a valid identifier (class or attribute name)
  Operator,    // one of = <> < <= > >=
  Literal,     // any literal
};

struct ParamSpec {
  std::string name;
  ParamType type;
};

struct FunctionalQuery {
  std::string name;
  std::string description;
  /// Query text with `{param}` placeholders.
  std::string template_text;
  std::vector<ParamSpec> params;
  /// Repeated rows are dropped after execution.
  bool distinct_rows = false;
};

using Params = std::map<std::string, query::Literal>;

class UnknownQueryName : public query::QueryError {
 public:
  explicit UnknownQueryName(const std::string& name);
};

class ParamTypeMismatch : public query::QueryError {
 public:
  ParamTypeMismatch(const std::string& param, const std::string& expected);
};

/// The thirteen named queries, in documented order.
const std::vector<FunctionalQuery>& functional_queries();
const FunctionalQuery& functional_query(std::string_view name);

/// Substitutes typed parameters. Missing, extra or mistyped parameters throw ParamTypeMismatch.
std::string instantiate(std::string_view name, const Params& params = {});

exec::ResultSet run_functional(const graph::PropertyGraph& graph, std::string_view name, const Params& params = {},
                               const exec::ExecOptions& options = {});

/// Parses every template with representative parameters. Returns the names that failed.
std::vector<std::string> self_test();

/// Executes each query and concatenates rows without duplicates. Column names must agree.
exec::ResultSet run_union(const graph::PropertyGraph& graph, const std::vector<std::string>& queries,
                          const exec::ExecOptions& options = {});

/// `match p = (n1: IfcSpace) --(r: IfcRelSpaceBoundary) --(n2: <class>) return p` for each class.
std::vector<std::string> space_boundary_by_class(const std::vector<std::string>& element_classes);

struct AccessLink {
  InstanceId a;
  InstanceId b;
  InstanceId connector;
  std::string connector_class;
  friend auto operator<=>(const AccessLink&, const AccessLink&) = default;
};

struct AccessibilityGraph {
  /// Every IfcSpace node, ascending.
  std::vector<InstanceId> vertices;
  /// Both orientations of each link, sorted.
  std::vector<AccessLink> links;
};

/// Spaces linked through an IfcDoor or IfcVirtualElement that bounds at least two of them.
AccessibilityGraph accessibility_graph(const graph::PropertyGraph& graph);

enum class Severity { Info, Error };

struct QualityRules {
  bool duplicate_boundary = true;
  bool door_over_connection = true;
  std::size_t min_duplicates = 2;
  std::size_t max_door_spaces = 2;
};

struct QualityFinding {
  /// "duplicate-boundary" or "door-over-connection".
  std::string rule;
  /// duplicate-boundary: element, space. door-over-connection: door, then spaces ascending.
  std::vector<InstanceId> subjects;
  std::size_t multiplicity = 0;
  Severity severity = Severity::Info;
  friend bool operator==(const QualityFinding&, const QualityFinding&) = default;
};

/// Findings ordered by rule, then subjects.
std::vector<QualityFinding> quality_check(const graph::PropertyGraph& graph, const QualityRules& rules = {});

const char* to_string(Severity severity);

}  // namespace bimgraph::bim
