#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "bimgraph/io/io.hpp"
#include "io/value_json.hpp"

namespace bimgraph::io {

namespace pt = boost::property_tree;

namespace {

/// GraphML attribute names contain dots, which ptree would split.
pt::ptree::path_type attr(const std::string& name) { return pt::ptree::path_type("<xmlattr>/" + name, '/'); }

constexpr const char* kNs = "http://graphml.graphdrawing.org/xmlns";

std::string real_text(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// GraphML attribute type and the text of the value.
std::pair<const char*, std::string> encode(const graph::PropValue& v) {
  if (const auto* i = v.get_if<std::int64_t>()) return {"long", std::to_string(*i)};
  if (const auto* d = v.get_if<double>()) return {"double", real_text(*d)};
  if (const auto* s = v.get_if<std::string>()) return {"string", *s};
  if (const auto* b = v.get_if<bool>()) return {"boolean", *b ? "true" : "false"};
  return {"list", to_json(v).dump()};
}

graph::PropValue decode(const std::string& type, const std::string& text) {
  try {
    if (type == "long") return static_cast<std::int64_t>(std::stoll(text));
    if (type == "double") {
      double d = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), d);
      if (res.ec != std::errc{}) throw FormatError("bad double");
      return d;
    }
    if (type == "boolean") return text == "true";
    if (type == "list") return from_json(nlohmann::json::parse(text));
    return text;
  } catch (const std::exception&) {
    throw FormatError("graphml: cannot read '" + text + "' as " + type);
  }
}

std::uint64_t node_id(const std::string& s) {
  if (s.size() < 2 || s[0] != 'n') throw FormatError("graphml: unexpected node id '" + s + "'");
  try {
    return std::stoull(s.substr(1));
  } catch (const std::exception&) {
    throw FormatError("graphml: unexpected node id '" + s + "'");
  }
}

}  // namespace

void write_graphml(const graph::PropertyGraph& g, std::ostream& out) {
  // Key ids are "<name>.<type>" so one property name may carry several types.
  std::map<std::string, std::pair<std::string, std::string>> keys;
  for (graph::NodeIndex n = 0; n < g.node_count(); ++n)
    for (const auto& [k, v] : g.stored_properties(n)) {
      auto type = encode(v).first;
      keys.try_emplace(k + "." + type, k, type);
    }

  pt::ptree doc;
  auto& root = doc.add("graphml", "");
  root.put("<xmlattr>.xmlns", kNs);
  root.put("<xmlattr>.bimgraph-schema", std::string(schema::to_string(g.schema().version())));
  auto add_key = [&](const std::string& id, const char* domain, const std::string& name, const std::string& type) {
    auto& key = root.add("key", "");
    key.put("<xmlattr>.id", id);
    key.put("<xmlattr>.for", domain);
    key.put(attr("attr.name"), name);
    key.put(attr("attr.type"), type == "list" ? "string" : type);
    if (type == "list") key.put("<xmlattr>.bimgraph-list", "true");
  };
  add_key("label", "node", "label", "string");
  add_key("e.label", "edge", "label", "string");
  add_key("e.pos", "edge", "pos", "int");
  for (const auto& [id, kt] : keys) add_key(id, "node", kt.first, kt.second);

  auto& body = root.add("graph", "");
  body.put("<xmlattr>.id", "G");
  body.put("<xmlattr>.edgedefault", "directed");
  for (graph::NodeIndex n = 0; n < g.node_count(); ++n) {
    auto& node = body.add("node", "");
    node.put("<xmlattr>.id", "n" + std::to_string(g.id_of(n).value));
    node.add("data", std::string(g.label_of(n))).put("<xmlattr>.key", "label");
    for (const auto& [k, v] : g.stored_properties(n)) {
      auto [type, text] = encode(v);
      node.add("data", text).put("<xmlattr>.key", k + "." + type);
    }
  }
  for (graph::EdgeIndex e = 0; e < g.edge_count(); ++e) {
    auto& edge = body.add("edge", "");
    edge.put("<xmlattr>.source", "n" + std::to_string(g.id_of(g.edge_source(e)).value));
    edge.put("<xmlattr>.target", "n" + std::to_string(g.id_of(g.edge_target(e)).value));
    edge.add("data", std::string(g.edge_label(e))).put("<xmlattr>.key", "e.label");
    if (auto pos = g.edge_pos(e)) edge.add("data", std::to_string(*pos)).put("<xmlattr>.key", "e.pos");
  }
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 1));
  if (!out) throw IoError("graphml: write failed");
}

graph::PropertyGraph read_graphml(std::istream& in, const SchemaResolver& resolve) {
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw FormatError(std::string("graphml: ") + e.what());
  }
  auto root_opt = doc.get_child_optional("graphml");
  if (!root_opt) throw FormatError("graphml: missing <graphml> root");
  const auto& root = *root_opt;

  auto name = root.get<std::string>("<xmlattr>.bimgraph-schema", "IFC4");
  auto version = schema::parse_version(name);
  if (!version) throw FormatError("graphml: unknown schema '" + name + "'");
  auto schema = resolve ? resolve(*version) : schema::builtin_schema(*version);

  // key id -> (property name, type)
  std::map<std::string, std::pair<std::string, std::string>> keys;
  for (const auto& [tag, key] : root) {
    if (tag != "key") continue;
    std::string type = key.get<std::string>(attr("attr.type"), "string");
    if (key.get<std::string>("<xmlattr>.bimgraph-list", "") == "true") type = "list";
    if (type == "int") type = "long";
    if (type == "float") type = "double";
    keys[key.get<std::string>("<xmlattr>.id")] = {key.get<std::string>(attr("attr.name"), ""), type};
  }

  auto graph_opt = root.get_child_optional("graph");
  if (!graph_opt) throw FormatError("graphml: missing <graph>");
  graph::GraphBuilder b(std::move(schema));
  for (const auto& [tag, el] : *graph_opt) {
    if (tag == "node") {
      InstanceId id{node_id(el.get<std::string>("<xmlattr>.id"))};
      std::string label;
      graph::Properties props;
      for (const auto& [dtag, data] : el) {
        if (dtag != "data") continue;
        auto key = data.get<std::string>("<xmlattr>.key");
        if (key == "label") {
          label = data.data();
          continue;
        }
        auto it = keys.find(key);
        if (it == keys.end()) throw FormatError("graphml: undeclared key '" + key + "'");
        props.emplace_back(it->second.first, decode(it->second.second, data.data()));
      }
      if (label.empty()) throw FormatError("graphml: node without label");
      std::sort(props.begin(), props.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
      b.add_node(id, label, std::move(props));
    } else if (tag == "edge") {
      InstanceId from{node_id(el.get<std::string>("<xmlattr>.source"))};
      InstanceId to{node_id(el.get<std::string>("<xmlattr>.target"))};
      std::string label;
      std::optional<std::int32_t> pos;
      for (const auto& [dtag, data] : el) {
        if (dtag != "data") continue;
        auto key = data.get<std::string>("<xmlattr>.key");
        if (key == "e.label") label = data.data();
        if (key == "e.pos") pos = static_cast<std::int32_t>(std::get<std::int64_t>(decode("long", data.data()).data));
      }
      b.add_edge(from, to, label, pos);
    }
  }
  try {
    return std::move(b).freeze();
  } catch (const Error& e) {
    throw FormatError(std::string("graphml: ") + e.what());
  }
}

}  // namespace bimgraph::io
