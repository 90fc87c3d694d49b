#include "bimgraph/bim/queries.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "bimgraph/query/parser.hpp"

namespace bimgraph::bim {

namespace {

std::vector<FunctionalQuery> make_registry() {
  using P = ParamType;
  return {
      {"instance-by-id", "Instance with a specific id", "match (n{id: {id}}) return n", {{"id", P::Integer}}},
      {"instance-by-attribute", "Instances with a specific attribute value",
       "match (n: {{attribute}: {value}}) return n", {{"attribute", P::Identifier}, {"value", P::Literal}}},
      {"instances-of-class", "Instances of a class and its subclasses", "match (n: {class}) return n",
       {{"class", P::Identifier}}},
      {"instances-by-condition", "Instances of a class meeting a condition",
       "match (n: {class}) where n.{attribute} {op} {value} return n",
       {{"class", P::Identifier}, {"attribute", P::Identifier}, {"op", P::Operator}, {"value", P::Literal}}},
      {"spatial-structure", "IfcSite, IfcBuilding, IfcBuildingStorey, IfcSpace and their relations",
       "match p = (n1: IfcSpatialStructureElement) --(r: IfcRelAggregates) --(n2: IfcSpatialStructureElement) "
       "return p",
       {}},
      {"spatial-containment", "Building elements in spatial structure elements",
       "match p = (n1: IfcBuildingElement) --(r: IfcRelContainedInSpatialStructure) "
       "--(n2: IfcSpatialStructureElement) return p",
       {}},
      {"space-boundary", "Spaces and building elements bounding them",
       "match p = (n1: IfcSpace) --(r: IfcRelSpaceBoundary) --(n2: IfcBuildingElement) return p", {}},
      {"space-accessibility", "Spaces connected by doors and virtual elements",
       "match p = (n1: IfcSpatialStructureElement) --(r: IfcRelSpaceBoundary) --(n2) "
       "where n2.name in ['IfcDoor', 'IfcVirtualElement'] return p",
       {}},
      {"connectivity", "Walls connected to each other",
       "match p = (n1: IfcWall) --(r: IfcRelConnectsPathElements) --(n2: IfcWall) return p", {}},
      {"property-sets", "Building elements and their property sets",
       "match p = (n1: IfcBuildingElement) --(r: IfcRelDefinesByProperties) --(n2: IfcPropertySet) return p", {}},
      {"quantity-sets", "Building elements and their quantity sets",
       "match p = (n1: IfcBuildingElement) --(r: IfcRelDefinesByProperties) --(n2: IfcQuantitySet) return p", {}},
      {"property-sets-deep", "Building elements, property sets and the properties behind them",
       "match p = (n1: IfcBuildingElement) --(r: IfcRelDefinesByProperties) --(n2: IfcPropertySet) --() --() "
       "return p",
       {}},
      {"external-rooms", "Spaces with an external boundary",
       "match (n:IfcSpace)--(r:IfcRelSpaceBoundary) where r.InternalOrExternalBoundary = 'EXTERNAL' return n",
       {},
       true},
  };
}

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::Integer: return "integer";
    case ParamType::Identifier: return "identifier";
    case ParamType::Operator: return "comparison operator";
    case ParamType::Literal: return "literal";
  }
  return "?";
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string render(const ParamSpec& spec, const query::Literal& value) {
  const auto* text = std::get_if<std::string>(&value);
  switch (spec.type) {
    case ParamType::Integer:
      if (!std::holds_alternative<std::int64_t>(value)) throw ParamTypeMismatch(spec.name, type_name(spec.type));
      return query::format_literal(value);
    case ParamType::Identifier:
      if (!text || !is_identifier(*text)) throw ParamTypeMismatch(spec.name, type_name(spec.type));
      return *text;
    case ParamType::Operator: {
      static const std::set<std::string> ops{"=", "<>", "!=", "<", "<=", ">", ">="};
      if (!text || !ops.count(*text)) throw ParamTypeMismatch(spec.name, type_name(spec.type));
      return *text;
    }
    case ParamType::Literal:
      return query::format_literal(value);
  }
  return {};
}

std::string sample_value(ParamType t) {
  switch (t) {
    case ParamType::Integer: return "1";
    case ParamType::Identifier: return "IfcRoot";
    case ParamType::Operator: return ">";
    case ParamType::Literal: return "'x'";
  }
  return {};
}

std::string substitute(const std::string& text, const std::map<std::string, std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '{') {
      auto close = text.find('}', i);
      if (close != std::string::npos) {
        auto it = values.find(text.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

}  // namespace

UnknownQueryName::UnknownQueryName(const std::string& name) : QueryError("unknown functional query '" + name + "'") {}

ParamTypeMismatch::ParamTypeMismatch(const std::string& param, const std::string& expected)
    : QueryError("parameter '" + param + "': expected " + expected) {}

const std::vector<FunctionalQuery>& functional_queries() {
  static const std::vector<FunctionalQuery> registry = make_registry();
  return registry;
}

const FunctionalQuery& functional_query(std::string_view name) {
  for (const auto& q : functional_queries())
    if (q.name == name) return q;
  throw UnknownQueryName(std::string(name));
}

std::string instantiate(std::string_view name, const Params& params) {
  const auto& q = functional_query(name);
  std::map<std::string, std::string> values;
  for (const auto& spec : q.params) {
    auto it = params.find(spec.name);
    if (it == params.end()) throw ParamTypeMismatch(spec.name, std::string(type_name(spec.type)) + " (missing)");
    values[spec.name] = render(spec, it->second);
  }
  for (const auto& [key, value] : params) {
    (void)value;
    if (!values.count(key)) throw ParamTypeMismatch(key, "no such parameter");
  }
  return substitute(q.template_text, values);
}

exec::ResultSet run_functional(const graph::PropertyGraph& graph, std::string_view name, const Params& params,
                               const exec::ExecOptions& options) {
  const auto& q = functional_query(name);
  auto result = exec::execute(graph, instantiate(name, params), options);
  return q.distinct_rows ? exec::distinct(std::move(result)) : result;
}

std::vector<std::string> self_test() {
  std::vector<std::string> failed;
  for (const auto& q : functional_queries()) {
    std::map<std::string, std::string> values;
    for (const auto& spec : q.params) values[spec.name] = sample_value(spec.type);
    try {
      query::parse_query(substitute(q.template_text, values));
    } catch (const query::QueryError&) {
      failed.push_back(q.name);
    }
  }
  return failed;
}

exec::ResultSet run_union(const graph::PropertyGraph& graph, const std::vector<std::string>& queries,
                          const exec::ExecOptions& options) {
  exec::ResultSet out;
  bool first = true;
  for (const auto& text : queries) {
    auto part = exec::execute(graph, text, options);
    if (first) {
      out.columns = part.columns;
      out.column_kinds = part.column_kinds;
      first = false;
    } else if (part.columns != out.columns) {
      throw query::QueryError("union over queries with different return items");
    }
    for (auto& row : part.rows) out.rows.push_back(std::move(row));
  }
  return exec::distinct(std::move(out));
}

std::vector<std::string> space_boundary_by_class(const std::vector<std::string>& element_classes) {
  std::vector<std::string> out;
  for (const auto& c : element_classes)
    out.push_back("match p = (n1: IfcSpace) --(r: IfcRelSpaceBoundary) --(n2: " + c + ") return p");
  return out;
}

namespace {

InstanceId node_id(const exec::Value& v) { return std::get<exec::NodeRef>(v).id; }

std::size_t count_of(const exec::Value& v) {
  return static_cast<std::size_t>(*std::get<graph::PropValue>(v).get_if<std::int64_t>());
}

}  // namespace

AccessibilityGraph accessibility_graph(const graph::PropertyGraph& graph) {
  AccessibilityGraph out;
  out.vertices = graph.nodes_with_label("IfcSpace", true);
  std::sort(out.vertices.begin(), out.vertices.end());

  auto rows = exec::distinct(exec::execute(graph,
                                           "match (n1: IfcSpace) --(r: IfcRelSpaceBoundary) --(n2) "
                                           "where n2.name in ['IfcDoor', 'IfcVirtualElement'] return n2, n1"));
  std::map<InstanceId, std::set<InstanceId>> spaces_of;
  for (const auto& row : rows.rows) spaces_of[node_id(row[0])].insert(node_id(row[1]));

  for (const auto& [connector, spaces] : spaces_of) {
    if (spaces.size() < 2) continue;
    std::string cls(graph.label_of(*graph.index_of(connector)));
    for (auto a : spaces)
      for (auto b : spaces)
        if (a != b) out.links.push_back({a, b, connector, cls});
  }
  std::sort(out.links.begin(), out.links.end());
  return out;
}

std::vector<QualityFinding> quality_check(const graph::PropertyGraph& graph, const QualityRules& rules) {
  std::vector<QualityFinding> out;
  if (rules.door_over_connection) {
    auto rows = exec::distinct(exec::execute(
        graph, "match (d: IfcDoor)<-[:RelatedBuildingElement]-(r: IfcRelSpaceBoundary)-[:RelatingSpace]->(s) "
               "return d, s"));
    std::map<InstanceId, std::set<InstanceId>> spaces_of;
    for (const auto& row : rows.rows) spaces_of[node_id(row[0])].insert(node_id(row[1]));
    for (const auto& [door, spaces] : spaces_of) {
      if (spaces.size() <= rules.max_door_spaces) continue;
      QualityFinding f{"door-over-connection", {door}, spaces.size(), Severity::Error};
      f.subjects.insert(f.subjects.end(), spaces.begin(), spaces.end());
      out.push_back(std::move(f));
    }
  }
  if (rules.duplicate_boundary) {
    auto rows = exec::execute(
        graph, "match (e)<-[:RelatedBuildingElement]-(r: IfcRelSpaceBoundary)-[:RelatingSpace]->(s) "
               "return e, s, count(r)");
    for (const auto& row : rows.rows) {
      auto k = count_of(row[2]);
      if (k >= rules.min_duplicates && k >= 2)
        out.push_back({"duplicate-boundary", {node_id(row[0]), node_id(row[1])}, k, Severity::Info});
    }
  }
  std::sort(out.begin(), out.end(), [](const QualityFinding& a, const QualityFinding& b) {
    return std::tie(a.rule, a.subjects) < std::tie(b.rule, b.subjects);
  });
  return out;
}

const char* to_string(Severity severity) { return severity == Severity::Error ? "error" : "info"; }

}  // namespace bimgraph::bim
