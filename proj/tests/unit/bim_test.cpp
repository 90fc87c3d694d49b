#include <gtest/gtest.h>

#include <set>

#include "bimgraph/bim/queries.hpp"
#include "support/fixtures.hpp"

using namespace bimgraph;
using namespace bimgraph::bim;

namespace {

const graph::PropertyGraph& house() {
  static const graph::BuildResult r = testkit::load_fixture("house_ifc4.ifc");
  return r.graph;
}

const graph::PropertyGraph& duplex() {
  static const graph::BuildResult r = testkit::load_fixture("duplex_ifc2x3.ifc");
  return r.graph;
}

const graph::PropertyGraph& duplex_fixed() {
  static const graph::BuildResult r = testkit::load_fixture("duplex_fixed_ifc2x3.ifc");
  return r.graph;
}

std::set<std::uint64_t> node_ids(const exec::ResultSet& r) {
  std::set<std::uint64_t> out;
  for (const auto& row : r.rows) out.insert(std::get<exec::NodeRef>(row[0]).id.value);
  return out;
}

std::vector<InstanceId> ids(std::initializer_list<std::uint64_t> v) {
  std::vector<InstanceId> out;
  for (auto x : v) out.push_back(InstanceId{x});
  return out;
}

std::vector<QualityFinding> of_rule(const std::vector<QualityFinding>& all, const std::string& rule) {
  std::vector<QualityFinding> out;
  for (const auto& f : all)
    if (f.rule == rule) out.push_back(f);
  return out;
}

std::set<std::pair<std::uint64_t, std::uint64_t>> pairs_via(const AccessibilityGraph& g, std::uint64_t connector) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& l : g.links)
    if (l.connector.value == connector) out.insert({l.a.value, l.b.value});
  return out;
}

}  // namespace

TEST(FunctionalQueries, Registry) {
  const auto& all = functional_queries();
  ASSERT_EQ(all.size(), 13u);
  std::set<std::string> names;
  for (const auto& q : all) names.insert(q.name);
  EXPECT_EQ(names.size(), 13u);
  EXPECT_TRUE(names.count("property-sets-deep"));
  EXPECT_TRUE(self_test().empty());
  EXPECT_THROW(functional_query("no-such-query"), UnknownQueryName);
}

TEST(FunctionalQueries, Instantiate) {
  EXPECT_EQ(instantiate("instance-by-id", {{"id", std::int64_t{121}}}), "match (n{id: 121}) return n");
  EXPECT_EQ(instantiate("instance-by-attribute", {{"attribute", std::string("LongName")},
                                                  {"value", std::string("Schlafzimmer")}}),
            "match (n: {LongName: 'Schlafzimmer'}) return n");
  EXPECT_EQ(instantiate("instances-by-condition", {{"class", std::string("IfcDoor")},
                                                   {"attribute", std::string("OverallWidth")},
                                                   {"op", std::string(">")},
                                                   {"value", 0.9}}),
            "match (n: IfcDoor) where n.OverallWidth > 0.9 return n");
}

TEST(FunctionalQueries, ParamErrors) {
  EXPECT_THROW(instantiate("instance-by-id", {{"id", std::string("121")}}), ParamTypeMismatch);
  EXPECT_THROW(instantiate("instance-by-id", {}), ParamTypeMismatch);
  EXPECT_THROW(instantiate("instance-by-id", {{"id", std::int64_t{1}}, {"extra", true}}), ParamTypeMismatch);
  EXPECT_THROW(instantiate("instances-of-class", {{"class", std::string("Ifc Door")}}), ParamTypeMismatch);
  EXPECT_THROW(instantiate("instances-of-class", {{"class", std::string("{id}")}}), ParamTypeMismatch);
  EXPECT_THROW(instantiate("instances-by-condition", {{"class", std::string("IfcDoor")},
                                                      {"attribute", std::string("OverallWidth")},
                                                      {"op", std::string("=>")},
                                                      {"value", 0.9}}),
               ParamTypeMismatch);
  EXPECT_THROW(run_functional(house(), "nope"), UnknownQueryName);
}

TEST(FunctionalQueries, InstanceByIdEqualsDirectQuery) {
  for (std::uint64_t id : {34191ull, 59290ull, 1ull, 999999999ull}) {
    auto a = run_functional(house(), "instance-by-id", {{"id", static_cast<std::int64_t>(id)}});
    auto b = exec::execute(house(), "match (n{id: " + std::to_string(id) + "}) return n");
    EXPECT_EQ(a.rows, b.rows) << id;
  }
  EXPECT_EQ(node_ids(run_functional(house(), "instance-by-id", {{"id", std::int64_t{34191}}})),
            std::set<std::uint64_t>{34191});
}

TEST(FunctionalQueries, Conditions) {
  auto wide = run_functional(house(), "instances-by-condition",
                             {{"class", std::string("IfcDoor")}, {"attribute", std::string("OverallWidth")},
                              {"op", std::string(">")}, {"value", 0.9}});
  EXPECT_EQ(node_ids(wide), std::set<std::uint64_t>{40002});

  graph::GraphBuilder b(schema::builtin_schema(schema::Version::Ifc4));
  b.add_node(InstanceId{1}, "IfcDoor", {{"OverallWidth", 0.8}});
  auto g = std::move(b).freeze();
  auto none = run_functional(g, "instances-by-condition",
                             {{"class", std::string("IfcDoor")}, {"attribute", std::string("OverallWidth")},
                              {"op", std::string(">")}, {"value", 0.9}});
  EXPECT_TRUE(none.rows.empty());
  EXPECT_EQ(run_functional(g, "instances-of-class", {{"class", std::string("IfcBuildingElement")}}).rows.size(), 1u);
  EXPECT_TRUE(run_functional(g, "instances-of-class", {{"class", std::string("IfcBuildingElement")}},
                             exec::ExecOptions{false})
                  .rows.empty());
}

TEST(FunctionalQueries, ExternalRooms) {
  auto r = run_functional(house(), "external-rooms");
  EXPECT_EQ(r.rows.size(), 7u);
  EXPECT_EQ(node_ids(r), (std::set<std::uint64_t>{20909, 21283, 21640, 33774, 34191, 34763, 76214}));
}

TEST(FunctionalQueries, AllRunOnFixtures) {
  for (const auto* g : {&house(), &duplex(), &duplex_fixed()}) {
    for (const auto& q : functional_queries()) {
      if (!q.params.empty()) continue;
      auto r = run_functional(*g, q.name);
      if (q.name != "external-rooms") {
        auto sub = exec::result_subgraph(r);
        if (!r.rows.empty()) EXPECT_GT(sub.edges.size(), 0u) << q.name;
      }
    }
  }
  EXPECT_FALSE(run_functional(house(), "spatial-structure").rows.empty());
  EXPECT_FALSE(run_functional(house(), "space-boundary").rows.empty());
}

TEST(FunctionalQueries, PropertySetsDeepExtendsPropertySets) {
  auto shallow = run_functional(house(), "property-sets");
  auto deep = run_functional(house(), "property-sets-deep");
  ASSERT_FALSE(deep.rows.empty());
  std::set<std::vector<InstanceId>> prefixes;
  for (const auto& row : shallow.rows) prefixes.insert(std::get<exec::PathValue>(row[0]).nodes);
  for (const auto& row : deep.rows) {
    const auto& p = std::get<exec::PathValue>(row[0]);
    ASSERT_EQ(p.nodes.size(), 5u);
    EXPECT_TRUE(prefixes.count({p.nodes.begin(), p.nodes.begin() + 3}));
  }
  EXPECT_GT(exec::result_subgraph(deep).nodes.size(), exec::result_subgraph(shallow).nodes.size());
}

TEST(FunctionalQueries, SpatialStructureSimplification) {
  const std::string chain =
      "match p = ()-[:IsDecomposedBy]-(:IfcRelAggregates)-[:RelatedObjects]-(:IfcSite)"
      "-[:IsDecomposedBy]-(:IfcRelAggregates)-[:RelatedObjects]-(:IfcBuilding)"
      "-[:IsDecomposedBy]-(:IfcRelAggregates)-[:RelatedObjects]-(:IfcBuildingStorey)"
      "-[:IsDecomposedBy]-(:IfcRelAggregates)-[:RelatedObjects]-(:IfcSpace) return p";
  for (const auto* g : {&house(), &duplex()}) {
    auto full = exec::result_subgraph(exec::execute(*g, chain));
    auto simple = exec::result_subgraph(
        exec::execute(*g, "match p = () -- (:IfcRelAggregates) -- (:IfcSpatialStructure) return p"));
    ASSERT_FALSE(full.nodes.empty());
    EXPECT_TRUE(std::includes(simple.nodes.begin(), simple.nodes.end(), full.nodes.begin(), full.nodes.end()));
  }
}

TEST(FunctionalQueries, UnionOfClassPatterns) {
  const std::vector<std::string> classes{"IfcWall", "IfcSlab", "IfcDoor", "IfcWindow"};
  for (const auto* g : {&house(), &duplex()}) {
    auto u = run_union(*g, space_boundary_by_class(classes));
    auto whole = run_functional(*g, "space-boundary");
    std::vector<exec::PathValue> a, b;
    for (const auto& row : u.rows) a.push_back(std::get<exec::PathValue>(row[0]));
    for (const auto& row : whole.rows) {
      const auto& p = std::get<exec::PathValue>(row[0]);
      auto label = std::string(g->label_of(*g->index_of(p.nodes[2])));
      for (const auto& c : classes)
        if (g->schema().is_subtype_of(label, c)) {
          b.push_back(p);
          break;
        }
    }
    auto key = [](const exec::PathValue& p) { return std::make_pair(p.nodes, p.edges); };
    std::set<std::pair<std::vector<InstanceId>, std::vector<graph::EdgeIndex>>> ka, kb;
    for (const auto& p : a) ka.insert(key(p));
    for (const auto& p : b) kb.insert(key(p));
    EXPECT_EQ(ka, kb);
    EXPECT_LE(a.size(), whole.rows.size());
  }
  EXPECT_THROW(run_union(house(), {"match (n:IfcDoor) return n", "match (m:IfcDoor) return m"}), query::QueryError);
}

TEST(Accessibility, OverConnectedDoor) {
  auto g = accessibility_graph(duplex());
  EXPECT_EQ(pairs_via(g, 125), (std::set<std::pair<std::uint64_t, std::uint64_t>>{
                                   {84, 116}, {84, 152}, {116, 84}, {116, 152}, {152, 84}, {152, 116}}));
  for (const auto& l : g.links) {
    EXPECT_TRUE(l.connector_class == "IfcDoor" || l.connector_class == "IfcVirtualElement");
    EXPECT_NE(l.a, l.b);
  }
}

TEST(Accessibility, CorrectedDuplex) {
  auto g = accessibility_graph(duplex_fixed());
  EXPECT_EQ(pairs_via(g, 125), (std::set<std::pair<std::uint64_t, std::uint64_t>>{{152, 118}, {118, 152}}));
}

TEST(Accessibility, Symmetric) {
  for (const auto* m : {&house(), &duplex(), &duplex_fixed()}) {
    auto g = accessibility_graph(*m);
    std::set<AccessLink> links(g.links.begin(), g.links.end());
    EXPECT_EQ(links.size(), g.links.size());
    for (const auto& l : g.links) EXPECT_TRUE(links.count({l.b, l.a, l.connector, l.connector_class}));
    EXPECT_TRUE(std::is_sorted(g.vertices.begin(), g.vertices.end()));
    for (const auto& l : g.links) EXPECT_TRUE(std::binary_search(g.vertices.begin(), g.vertices.end(), l.a));
  }
}

TEST(Accessibility, SingleSpaceConnector) {
  graph::GraphBuilder b(schema::builtin_schema(schema::Version::Ifc4));
  b.add_node(InstanceId{1}, "IfcSpace");
  b.add_node(InstanceId{2}, "IfcDoor");
  b.add_node(InstanceId{3}, "IfcRelSpaceBoundary");
  b.add_edge(InstanceId{3}, InstanceId{1}, "RelatingSpace");
  b.add_edge(InstanceId{3}, InstanceId{2}, "RelatedBuildingElement");
  auto g = accessibility_graph(std::move(b).freeze());
  EXPECT_EQ(g.vertices, ids({1}));
  EXPECT_TRUE(g.links.empty());
}

TEST(Quality, Duplex) {
  auto findings = quality_check(duplex());
  auto over = of_rule(findings, "door-over-connection");
  ASSERT_EQ(over.size(), 1u);
  EXPECT_EQ(over[0].subjects, ids({125, 84, 116, 152}));
  EXPECT_EQ(over[0].multiplicity, 3u);
  EXPECT_EQ(over[0].severity, Severity::Error);

  auto dups = of_rule(findings, "duplicate-boundary");
  ASSERT_EQ(dups.size(), 3u);
  std::set<std::uint64_t> spaces;
  for (const auto& f : dups) {
    EXPECT_EQ(f.subjects[0], InstanceId{125});
    EXPECT_EQ(f.multiplicity, 2u);
    EXPECT_EQ(f.severity, Severity::Info);
    spaces.insert(f.subjects[1].value);
  }
  EXPECT_EQ(spaces, (std::set<std::uint64_t>{84, 116, 152}));
}

TEST(Quality, CorrectedDuplexIsClean) { EXPECT_TRUE(quality_check(duplex_fixed()).empty()); }

TEST(Quality, HouseDuplicates) {
  auto dups = of_rule(quality_check(house()), "duplicate-boundary");
  auto find = [&](std::uint64_t e, std::uint64_t s) -> std::size_t {
    for (const auto& f : dups)
      if (f.subjects == ids({e, s})) return f.multiplicity;
    return 0;
  };
  EXPECT_EQ(find(59290, 76214), 8u);
  EXPECT_EQ(find(18698, 34191), 2u);
  EXPECT_TRUE(of_rule(quality_check(house()), "door-over-connection").empty());
}

TEST(Quality, Thresholds) {
  QualityRules rules;
  rules.min_duplicates = 3;
  auto dups = quality_check(house(), rules);
  ASSERT_EQ(dups.size(), 1u);
  EXPECT_EQ(dups[0].multiplicity, 8u);

  rules = {};
  rules.max_door_spaces = 3;
  EXPECT_TRUE(of_rule(quality_check(duplex(), rules), "door-over-connection").empty());
  rules.duplicate_boundary = false;
  EXPECT_TRUE(quality_check(duplex(), rules).empty());
  EXPECT_STREQ(to_string(Severity::Error), "error");
}

TEST(Quality, EmptyAndSimple) {
  graph::GraphBuilder b(schema::builtin_schema(schema::Version::Ifc4));
  auto g = std::move(b).freeze();
  EXPECT_TRUE(quality_check(g).empty());
}
