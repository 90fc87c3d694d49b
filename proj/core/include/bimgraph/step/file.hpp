#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bimgraph/common.hpp"
#include "bimgraph/schema/registry.hpp"
#include "bimgraph/step/value.hpp"

namespace bimgraph::step {

/// One `#N=ENTITY(...)` record.
struct StepInstance {
  InstanceId id;
  /// Canonical name ("IfcSpace") when the schema knows the entity, otherwise as written.
  std::string entity;
  std::vector<Value> args;
  /// 1-based source line of the `#N`.
  std::size_t line = 0;

  /// Content equality; the source line is not compared.
  friend bool operator==(const StepInstance& a, const StepInstance& b) {
    return a.id == b.id && a.entity == b.entity && a.args == b.args;
  }
};

struct SchemaVersion {
  /// Empty for schemas this library does not know (e.g. "IFC4X3").
  std::optional<schema::Version> known;
  /// As written in FILE_SCHEMA.
  std::string name;
};

struct Header {
  /// FILE_DESCRIPTION description strings.
  std::vector<std::string> description;
  std::string implementation_level;
  /// FILE_SCHEMA identifiers.
  std::vector<std::string> schema_identifiers;
  /// Every header record verbatim (without the trailing ';'), in file order.
  std::vector<std::string> records;
};

struct StepFile {
  Header header;
  SchemaVersion schema_version;
  std::map<InstanceId, StepInstance> instances;

  const StepInstance* find(InstanceId id) const {
    auto it = instances.find(id);
    return it == instances.end() ? nullptr : &it->second;
  }
};

struct DanglingRef {
  InstanceId from;
  std::size_t arg_index = 0;
  InstanceId target;

  friend bool operator==(const DanglingRef&, const DanglingRef&) = default;
};

/// Every EntityRef (any depth) whose target is not an instance of `file`, ordered by (from, arg).
std::vector<DanglingRef> validate_refs(const StepFile& file);

/// The schema version a file should be processed with. Unknown schemas fall back to IFC4.
schema::Version effective_version(const StepFile& file);

}  // namespace bimgraph::step
