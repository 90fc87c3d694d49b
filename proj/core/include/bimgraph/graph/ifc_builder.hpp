#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "bimgraph/graph/property_graph.hpp"
#include "bimgraph/schema/registry.hpp"
#include "bimgraph/step/file.hpp"
#include "bimgraph/step/value.hpp"

namespace bimgraph::graph {

enum class AttributeKind { Intrinsic, Extrinsic, Mixed, Omitted };

/// Intrinsic values become node properties, extrinsic ones edges. Mixed aggregates
/// contribute both; unset and derived values contribute nothing.
AttributeKind classify_attribute(const step::Value& value);

struct BuildWarning {
  enum class Kind { DanglingRef, SynthesizedAttributeName, PropertyKeyCollision };
  Kind kind;
  InstanceId instance;
  std::string detail;
};

struct BuildReport {
  std::size_t nodes_created = 0;
  std::size_t edges_created = 0;
  std::vector<BuildWarning> warnings;
};

struct BuildResult {
  PropertyGraph graph;
  BuildReport report;
};

/// One node per instance labeled with its entity; intrinsic attributes as properties
/// named after the schema attribute, references as edges labeled with the attribute
/// name (aggregate members carry their position). Dangling references are skipped.
BuildResult build_graph(const step::StepFile& file, std::shared_ptr<const schema::SchemaRegistry> registry);

/// Uses the compiled-in schema for the file's version.
BuildResult build_graph(const step::StepFile& file);

}  // namespace bimgraph::graph
