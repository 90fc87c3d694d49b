#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <tuple>

#include "bimgraph/graph/ifc_builder.hpp"
#include "bimgraph/io/io.hpp"
#include "bimgraph/step/file.hpp"
#include "bimgraph/step/parser.hpp"
#include "io/value_json.hpp"

namespace bimgraph::io {

using nlohmann::json;

json to_json(const graph::PropValue& value) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, graph::PropValue::List>) {
          json arr = json::array();
          for (const auto& e : x) arr.push_back(to_json(e));
          return arr;
        } else {
          return x;
        }
      },
      value.data);
}

graph::PropValue from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    graph::PropValue::List list;
    for (const auto& e : j) list.push_back(from_json(e));
    return list;
  }
  throw FormatError("unsupported JSON value " + j.dump());
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "archive") return Format::Archive;
  if (name == "graphml") return Format::GraphML;
  if (name == "json") return Format::Json;
  if (name == "cypher-script") return Format::CypherScript;
  return std::nullopt;
}

std::string_view to_string(Format format) {
  switch (format) {
    case Format::Archive: return "archive";
    case Format::GraphML: return "graphml";
    case Format::Json: return "json";
    case Format::CypherScript: return "cypher-script";
  }
  return "?";
}

namespace {

json edge_json(const graph::PropertyGraph& g, graph::EdgeIndex e) {
  json j{{"source", g.id_of(g.edge_source(e)).value},
         {"target", g.id_of(g.edge_target(e)).value},
         {"label", g.edge_label(e)}};
  if (auto pos = g.edge_pos(e)) j["pos"] = *pos;
  return j;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string cypher_name(std::string_view s) {
  if (is_identifier(s)) return std::string(s);
  std::string out = "`";
  for (char c : s) out += c == '`' ? std::string("``") : std::string(1, c);
  return out + "`";
}

std::string cypher_string(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\r') {
      out += "\\r";
      continue;
    }
    out += c;
  }
  return out + "'";
}

std::string cypher_real(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  s.erase(std::remove(s.begin(), s.end(), '+'), s.end());
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool is_scalar_list(const graph::PropValue::List& list) {
  if (list.empty()) return true;
  auto kind = list.front().data.index();
  return std::all_of(list.begin(), list.end(), [&](const graph::PropValue& v) {
    return v.data.index() == kind && !v.get_if<graph::PropValue::List>();
  });
}

std::string cypher_value(const graph::PropValue& v) {
  if (const auto* i = v.get_if<std::int64_t>()) return std::to_string(*i);
  if (const auto* d = v.get_if<double>()) return cypher_real(*d);
  if (const auto* s = v.get_if<std::string>()) return cypher_string(*s);
  if (const auto* b = v.get_if<bool>()) return *b ? "true" : "false";
  const auto& list = *v.get_if<graph::PropValue::List>();
  // Graph databases store only flat homogeneous lists; anything else goes in as JSON text.
  if (!is_scalar_list(list)) return cypher_string(to_json(v).dump());
  std::string out = "[";
  for (std::size_t i = 0; i < list.size(); ++i) out += (i ? ", " : "") + cypher_value(list[i]);
  return out + "]";
}

std::string node_pattern(const graph::PropertyGraph& g, graph::NodeIndex n) {
  return "(:" + cypher_name(g.label_of(n)) + " {id: " + std::to_string(g.id_of(n).value) + "})";
}

}  // namespace

void write_json(const graph::PropertyGraph& g, std::ostream& out) {
  json nodes = json::array();
  for (graph::NodeIndex n = 0; n < g.node_count(); ++n) {
    json props = json::object();
    for (const auto& [k, v] : g.stored_properties(n)) props[k] = to_json(v);
    nodes.push_back({{"id", g.id_of(n).value}, {"label", g.label_of(n)}, {"properties", std::move(props)}});
  }
  std::vector<graph::EdgeIndex> order(g.edge_count());
  for (graph::EdgeIndex e = 0; e < order.size(); ++e) order[e] = e;
  auto key = [&](graph::EdgeIndex e) {
    return std::make_tuple(g.id_of(g.edge_source(e)), g.id_of(g.edge_target(e)), g.edge_label(e),
                           g.edge_pos(e).value_or(graph::kNoPos), e);
  };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });
  json edges = json::array();
  for (auto e : order) edges.push_back(edge_json(g, e));

  json doc{{"schema", schema::to_string(g.schema().version())}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("json: write failed");
}

void write_cypher_script(const graph::PropertyGraph& g, std::ostream& out) {
  out << "// schema " << schema::to_string(g.schema().version()) << ", " << g.node_count() << " nodes, "
      << g.edge_count() << " edges\n";
  for (graph::NodeIndex n = 0; n < g.node_count(); ++n) {
    // Stored properties shadow the injected id and name.
    std::map<std::string, std::string> props{{"id", std::to_string(g.id_of(n).value)},
                                             {"name", cypher_string(g.label_of(n))}};
    for (const auto& [k, v] : g.stored_properties(n)) props[k] = cypher_value(v);
    out << "CREATE (:" << cypher_name(g.label_of(n)) << " {";
    bool first = true;
    for (const auto& [k, v] : props) {
      out << (first ? "" : ", ") << cypher_name(k) << ": " << v;
      first = false;
    }
    out << "});\n";
  }
  for (graph::EdgeIndex e = 0; e < g.edge_count(); ++e) {
    std::string a = node_pattern(g, g.edge_source(e));
    std::string b = node_pattern(g, g.edge_target(e));
    out << "MATCH " << a.insert(1, "a") << ", " << b.insert(1, "b") << " CREATE (a)-[:" << cypher_name(g.edge_label(e))
        << " {name: " << cypher_string(g.edge_label(e));
    if (auto pos = g.edge_pos(e)) out << ", pos: " << *pos;
    out << "}]->(b);\n";
  }
  if (!out) throw IoError("cypher script: write failed");
}

void write_graph(const graph::PropertyGraph& graph, Format format, std::ostream& out) {
  switch (format) {
    case Format::Archive: return write_archive(graph, out);
    case Format::GraphML: return write_graphml(graph, out);
    case Format::Json: return write_json(graph, out);
    case Format::CypherScript: return write_cypher_script(graph, out);
  }
}

std::string result_to_json(const graph::PropertyGraph& g, const exec::ResultSet& result) {
  auto node_json = [&](InstanceId id) {
    json j{{"id", id.value}};
    if (auto n = g.index_of(id)) j["label"] = g.label_of(*n);
    return j;
  };
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r = json::array();
    for (const auto& v : row) {
      r.push_back(std::visit(
          [&](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, exec::Null>) {
              return nullptr;
            } else if constexpr (std::is_same_v<T, exec::NodeRef>) {
              return node_json(x.id);
            } else if constexpr (std::is_same_v<T, exec::EdgeRef>) {
              return edge_json(g, x.index);
            } else if constexpr (std::is_same_v<T, exec::PathValue>) {
              json nodes = json::array(), edges = json::array();
              for (auto id : x.nodes) nodes.push_back(id.value);
              for (auto e : x.edges) edges.push_back(edge_json(g, e));
              return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
            } else {
              return to_json(x);
            }
          },
          v));
    }
    rows.push_back(std::move(r));
  }
  return json{{"columns", result.columns}, {"rows", std::move(rows)}}.dump(2);
}

bool identical(const graph::PropertyGraph& a, const graph::PropertyGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  if (a.schema().version() != b.schema().version()) return false;
  for (graph::NodeIndex n = 0; n < a.node_count(); ++n)
    if (a.id_of(n) != b.id_of(n) || a.label_of(n) != b.label_of(n) || a.stored_properties(n) != b.stored_properties(n))
      return false;
  for (graph::EdgeIndex e = 0; e < a.edge_count(); ++e)
    if (a.id_of(a.edge_source(e)) != b.id_of(b.edge_source(e)) || a.id_of(a.edge_target(e)) != b.id_of(b.edge_target(e)) ||
        a.edge_label(e) != b.edge_label(e) || a.edge_pos(e) != b.edge_pos(e))
      return false;
  return true;
}

graph::PropertyGraph load_graph(const std::filesystem::path& path,
                                const std::optional<std::filesystem::path>& schema_file) {
  auto resolve = [&](schema::Version v) { return schema::schema_for(v, schema_file); };
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".ifc" || ext == ".ifcspf" || ext == ".stp" || ext == ".step") {
    auto file = step::read_file(path);
    return graph::build_graph(file, resolve(step::effective_version(file))).graph;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (ext == ".graphml") return read_graphml(in, resolve);
  return read_archive(in, resolve);
}

void save_graph(const graph::PropertyGraph& graph, Format format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_graph(graph, format, out);
}

}  // namespace bimgraph::io
