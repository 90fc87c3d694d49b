#pragma once

#include <iosfwd>
#include <string>

#include "bimgraph/step/file.hpp"
#include "bimgraph/step/value.hpp"

namespace bimgraph::step {

/// Writes `file` as an exchange structure. Re-parsing the output yields the same
/// instances (ids, entities, args). Known entity names are written upper-case.
void serialize_file(const StepFile& file, std::ostream& out);
std::string serialize_file(const StepFile& file);

/// STEP text of a single value, e.g. `$`, `.ELEMENT.`, `(#11,#12)`, `1.E-05`.
std::string format_value(const Value& value);

/// Shortest round-tripping STEP real literal (always has a '.').
std::string format_real(double value);

}  // namespace bimgraph::step
