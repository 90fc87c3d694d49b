#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bimgraph/graph/property_graph.hpp"
#include "bimgraph/schema/registry.hpp"

namespace bimgraph::testkit {

struct BuildingParams {
  schema::Version version = schema::Version::Ifc4;
  std::uint64_t seed = 1;
  int storeys = 2;
  int spaces_per_storey = 4;
  int walls_per_storey = 8;
  int doors_per_storey = 3;
  int windows_per_storey = 3;
  int slabs_per_storey = 1;
  int columns_per_storey = 0;
  int virtual_per_storey = 1;
  /// Physical boundaries per space, drawn from the storey's elements.
  int boundaries_per_space = 4;
  /// Probability that a boundary is written more than once.
  double duplicate_rate = 0.0;
  int max_duplicates = 3;
  /// Extra IfcRelConnectsPathElements per wall beyond the ring.
  int extra_wall_links = 0;
  int pset_properties = 2;
  /// Polyline points per element representation.
  int geometry_points = 4;
  /// Pads with unattached geometry up to this many instances. 0 disables.
  std::size_t target_instances = 0;
  /// When non-empty, building elements other than doors/windows draw their class from here.
  std::vector<std::string> element_classes;
};

struct SyntheticModel {
  std::string text;
  /// Canonical entity name -> records written.
  std::map<std::string, std::size_t> written;
  std::size_t instances = 0;
  std::vector<std::uint64_t> spaces;
  /// Spaces with at least one EXTERNAL boundary.
  std::vector<std::uint64_t> external_spaces;
};

SyntheticModel synthetic_building(const BuildingParams& params);

/// Random parameters and a random mix of concrete building-element classes.
BuildingParams random_building_params(std::uint64_t seed);

/// Graph of exactly `node_count` nodes labeled from the IFC4 schema. The labels in
/// `extents` get exactly that many nodes; the rest are IfcCartesianPoint. One edge per node.
graph::PropertyGraph large_label_graph(std::size_t node_count, const std::map<std::string, std::size_t>& extents,
                                       std::uint64_t seed);

}  // namespace bimgraph::testkit
