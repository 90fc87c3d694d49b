#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bimgraph/graph/property_graph.hpp"
#include "bimgraph/query/ast.hpp"

namespace bimgraph::exec {

/// Three-valued truth. A row passes WHERE only when the predicate is True.
enum class Tri { False, True, Unknown };

Tri tri_not(Tri t);
Tri tri_and(Tri a, Tri b);
Tri tri_or(Tri a, Tri b);

graph::PropValue to_prop(const query::Literal& literal);

/// Integers and reals compare numerically, text by bytes, booleans false < true,
/// lists by equality only. Any other pairing is Unknown.
Tri compare(const graph::PropValue& lhs, query::CompareOp op, const graph::PropValue& rhs);

/// Resolves `var.key` to a value, or nullopt when the property is absent.
using PropertyLookup = std::function<std::optional<graph::PropValue>(const std::string& var, const std::string& key)>;

Tri evaluate(const query::Expr& expr, const PropertyLookup& lookup);

}  // namespace bimgraph::exec
