#pragma once

#include <string_view>

namespace bimgraph::schema::detail {

// Defined in sources generated from core/data/*.schema at build time.
extern const std::string_view kIfc2x3SchemaData;
extern const std::string_view kIfc4SchemaData;

}  // namespace bimgraph::schema::detail
