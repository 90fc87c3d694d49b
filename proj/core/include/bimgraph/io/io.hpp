#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "bimgraph/common.hpp"
#include "bimgraph/exec/executor.hpp"
#include "bimgraph/graph/property_graph.hpp"
#include "bimgraph/schema/registry.hpp"

namespace bimgraph::io {

enum class Format { Archive, GraphML, Json, CypherScript };

/// "archive", "graphml", "json", "cypher-script".
std::optional<Format> parse_format(std::string_view name);
std::string_view to_string(Format format);

class FormatError : public IoError {
 public:
  using IoError::IoError;
};

/// Picks the registry once the stored schema version is known. Null means the compiled-in one.
using SchemaResolver = std::function<std::shared_ptr<const schema::SchemaRegistry>(schema::Version)>;

inline constexpr char kArchiveMagic[8] = {'C', '4', 'B', 'G', 'R', 'A', 'P', 'H'};
inline constexpr std::uint32_t kArchiveVersion = 1;

/// Binary archive: magic, format version, schema version, string table, node table,
/// edge table. Little-endian. Nodes ascending by id, edges in index order.
void write_archive(const graph::PropertyGraph& graph, std::ostream& out);

graph::PropertyGraph read_archive(std::istream& in, const SchemaResolver& resolve = nullptr);

void write_graphml(const graph::PropertyGraph& graph, std::ostream& out);
graph::PropertyGraph read_graphml(std::istream& in, const SchemaResolver& resolve = nullptr);

/// {"schema", "nodes": [{"id", "label", "properties"}], "edges": [{"source", "target", "label", "pos"?}]}
/// Keys sorted, nodes by id, edges by (source, target, label, pos).
void write_json(const graph::PropertyGraph& graph, std::ostream& out);

/// CREATE statements for nodes, then MATCH ... CREATE for edges.
void write_cypher_script(const graph::PropertyGraph& graph, std::ostream& out);

void write_graph(const graph::PropertyGraph& graph, Format format, std::ostream& out);

/// Result rows as JSON. Nodes are {"id", "label"}, edges {"source", "target", "label"},
/// paths {"nodes", "edges"}.
std::string result_to_json(const graph::PropertyGraph& graph, const exec::ResultSet& result);

/// Same ids, labels, stored properties and edge sequence.
bool identical(const graph::PropertyGraph& a, const graph::PropertyGraph& b);

/// .ifc/.ifcspf/.stp/.step are parsed and built, .graphml read as GraphML, anything else as
/// an archive. The schema comes from schema_for(version, schema_file).
graph::PropertyGraph load_graph(const std::filesystem::path& path,
                                const std::optional<std::filesystem::path>& schema_file = std::nullopt);
void save_graph(const graph::PropertyGraph& graph, Format format, const std::filesystem::path& path);

}  // namespace bimgraph::io
