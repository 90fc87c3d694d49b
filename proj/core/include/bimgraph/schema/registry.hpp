#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bimgraph/common.hpp"

namespace bimgraph::schema {

enum class Version { Ifc2x3, Ifc4 };

std::string_view to_string(Version version);

/// Maps a FILE_SCHEMA identifier ("IFC2X3", "ifc4", "IFC4_ADD2") to a supported version.
std::optional<Version> parse_version(std::string_view identifier);

class UnknownVersion : public Error {
 public:
  explicit UnknownVersion(std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class MalformedSchemaFile : public Error {
 public:
  MalformedSchemaFile(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class PositionOutOfRange : public Error {
 public:
  PositionOutOfRange(std::string entity, std::size_t position);
};

/// An inverse attribute `name` declared on some entity; it mirrors the forward
/// attribute `attribute` of entity `relationship`.
struct InverseAttribute {
  std::string name;
  std::string relationship;
  std::string attribute;

  friend bool operator==(const InverseAttribute&, const InverseAttribute&) = default;
};

struct EntityDescriptor {
  std::string name;
  std::optional<std::string> parent;
  /// Explicit attributes in STEP argument order, inherited ones first.
  std::vector<std::string> attributes;
  /// Inverse attributes, inherited ones first.
  std::vector<InverseAttribute> inverse_attributes;
  bool is_abstract = false;

  /// Explicit plus inverse attributes, the count IFC documentation tables show.
  std::size_t attribute_count() const { return attributes.size() + inverse_attributes.size(); }
};

/// Entity hierarchy and attribute tables for one IFC version. Immutable once loaded.
class SchemaRegistry {
 public:
  Version version() const { return version_; }

  bool contains(std::string_view name) const { return find(name) != nullptr; }
  /// Exact (canonical-case) lookup.
  const EntityDescriptor* find(std::string_view name) const;
  /// Case-insensitive lookup; returns the canonical spelling ("IFCSPACE" -> "IfcSpace").
  std::optional<std::string> canonical_name(std::string_view any_case) const;

  /// Applies a registered label alias ("IfcQuantitySet" -> "IfcElementQuantity" under IFC2x3).
  /// Names without an alias come back unchanged.
  std::string resolve_label(std::string_view label) const;

  /// Reflexive-transitive closure of the child relation. Unknown names yield {name}.
  std::set<std::string> subclasses_of(std::string_view name) const;
  bool is_subtype_of(std::string_view entity, std::string_view ancestor) const;
  std::vector<std::string> ancestors_of(std::string_view name) const;

  /// Explicit + inverse attribute count; 0 for unknown entities.
  std::size_t attribute_count(std::string_view entity) const;

  /// Name of the explicit attribute at STEP argument `position`.
  /// Throws PositionOutOfRange for unknown entities or positions past the declared count.
  std::string attribute_name(std::string_view entity, std::size_t position) const;
  /// Same, but falls back to `attr<position>`.
  std::string attribute_name_or_synthesized(std::string_view entity, std::size_t position) const;

  /// Inverse attribute names that mirror forward attribute `attribute` of `entity`
  /// (searched up the entity's parent chain), e.g. (IfcRelAggregates, RelatingObject) -> IsDecomposedBy.
  std::vector<std::string> inverse_aliases(std::string_view entity, std::string_view attribute) const;

  std::vector<std::string> entity_names() const;
  const std::map<std::string, std::string>& label_aliases() const { return label_aliases_; }

 private:
  friend class RegistryLoader;

  Version version_ = Version::Ifc4;
  std::vector<EntityDescriptor> entities_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::unordered_map<std::string, std::size_t> by_upper_;
  std::vector<std::vector<std::size_t>> children_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> inverse_by_forward_;
  std::map<std::string, std::string> label_aliases_;
};

/// Builds the registry for `version` from the compiled-in schema data, then applies
/// `extension_file` (same line format) on top: new entities are added, existing ones replaced.
std::shared_ptr<const SchemaRegistry> load_schema(Version version,
                                                  const std::optional<std::filesystem::path>& extension_file = {});

/// As load_schema, with the extension given as text.
std::shared_ptr<const SchemaRegistry> load_schema_with_extension(Version version, std::string_view extension_text);

/// Shared, lazily-built registry of the compiled-in data only.
std::shared_ptr<const SchemaRegistry> builtin_schema(Version version);

/// Resolves the schema a command-line tool should use: an explicit extension path wins,
/// then the C4B_SCHEMA_PATH environment variable, then the compiled-in data alone.
std::shared_ptr<const SchemaRegistry> schema_for(Version version,
                                                 const std::optional<std::filesystem::path>& extension_file);

}  // namespace bimgraph::schema
