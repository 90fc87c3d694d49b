#pragma once

#include <nlohmann/json.hpp>

#include "bimgraph/graph/property_graph.hpp"

namespace bimgraph::io {

nlohmann::json to_json(const graph::PropValue& value);
graph::PropValue from_json(const nlohmann::json& j);

}  // namespace bimgraph::io
