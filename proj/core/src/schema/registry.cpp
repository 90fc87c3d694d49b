#include "bimgraph/schema/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "schema_data.hpp"

namespace bimgraph::schema {

namespace {

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(Version version) {
  switch (version) {
    case Version::Ifc2x3:
      return "IFC2X3";
    case Version::Ifc4:
      return "IFC4";
  }
  return "IFC4";
}

std::optional<Version> parse_version(std::string_view identifier) {
  const std::string up = to_upper(identifier);
  if (up == "IFC2X3" || up.rfind("IFC2X3_", 0) == 0) return Version::Ifc2x3;
  if (up == "IFC4" || up.rfind("IFC4_", 0) == 0) return Version::Ifc4;
  return std::nullopt;
}

UnknownVersion::UnknownVersion(std::string name)
    : Error("unsupported IFC schema version: " + name), name_(std::move(name)) {}

MalformedSchemaFile::MalformedSchemaFile(std::size_t line, const std::string& message)
    : Error("schema data line " + std::to_string(line) + ": " + message), line_(line) {}

PositionOutOfRange::PositionOutOfRange(std::string entity, std::size_t position)
    : Error("attribute position " + std::to_string(position) + " out of range for " + entity) {}

class RegistryLoader {
 public:
  explicit RegistryLoader(Version version) : version_(version) {}

  void parse(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::istringstream in{std::string(line)};
      std::vector<std::string> tokens;
      for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
      if (tokens.empty()) continue;
      parse_line(tokens, line_no);
    }
  }

  std::shared_ptr<const SchemaRegistry> finish() {
    auto reg = std::make_shared<SchemaRegistry>();
    reg->version_ = version_;

    // Every parent must resolve and chains must be acyclic.
    for (const auto& raw : raws_) {
      if (raw.parent && !index_.contains(*raw.parent))
        throw MalformedSchemaFile(raw.line, "unknown parent entity " + *raw.parent + " of " + raw.name);
    }
    std::vector<int> state(raws_.size(), 0);  // 0 new, 1 visiting, 2 done
    std::vector<std::size_t> order;
    order.reserve(raws_.size());
    for (std::size_t i = 0; i < raws_.size(); ++i) visit(i, state, order);

    reg->entities_.resize(raws_.size());
    for (std::size_t i : order) {
      const Raw& raw = raws_[i];
      EntityDescriptor& d = reg->entities_[i];
      d.name = raw.name;
      d.parent = raw.parent;
      d.is_abstract = raw.is_abstract;
      if (raw.parent) {
        const EntityDescriptor& p = reg->entities_[index_.at(*raw.parent)];
        d.attributes = p.attributes;
        d.inverse_attributes = p.inverse_attributes;
      }
      d.attributes.insert(d.attributes.end(), raw.attrs.begin(), raw.attrs.end());
      d.inverse_attributes.insert(d.inverse_attributes.end(), raw.inverses.begin(), raw.inverses.end());
    }

    reg->children_.assign(raws_.size(), {});
    for (std::size_t i = 0; i < raws_.size(); ++i) {
      reg->by_name_.emplace(raws_[i].name, i);
      reg->by_upper_.emplace(to_upper(raws_[i].name), i);
      if (raws_[i].parent) reg->children_[index_.at(*raws_[i].parent)].push_back(i);
      for (const auto& inv : raws_[i].inverses) {
        auto& names = reg->inverse_by_forward_[{inv.relationship, inv.attribute}];
        if (std::find(names.begin(), names.end(), inv.name) == names.end()) names.push_back(inv.name);
      }
    }
    for (auto& [key, names] : reg->inverse_by_forward_) std::sort(names.begin(), names.end());
    reg->label_aliases_ = aliases_;
    return reg;
  }

 private:
  struct Raw {
    std::string name;
    std::optional<std::string> parent;
    std::vector<std::string> attrs;
    std::vector<InverseAttribute> inverses;
    bool is_abstract = false;
    std::size_t line = 0;
  };

  void visit(std::size_t i, std::vector<int>& state, std::vector<std::size_t>& order) {
    if (state[i] == 2) return;
    if (state[i] == 1) throw MalformedSchemaFile(raws_[i].line, "inheritance cycle through " + raws_[i].name);
    state[i] = 1;
    if (raws_[i].parent) visit(index_.at(*raws_[i].parent), state, order);
    state[i] = 2;
    order.push_back(i);
  }

  void parse_line(const std::vector<std::string>& t, std::size_t line) {
    const std::string& kw = t[0];
    if (kw == "schema") {
      if (t.size() != 2) throw MalformedSchemaFile(line, "expected: schema <version>");
      auto v = parse_version(t[1]);
      if (!v || *v != version_)
        throw MalformedSchemaFile(line, "schema " + t[1] + " does not match " + std::string(to_string(version_)));
      return;
    }
    if (kw == "alias") {
      if (t.size() != 3 || !is_identifier(t[1]) || !is_identifier(t[2]))
        throw MalformedSchemaFile(line, "expected: alias <name> <entity>");
      aliases_[t[1]] = t[2];
      return;
    }
    if (kw != "entity") throw MalformedSchemaFile(line, "unknown directive '" + kw + "'");
    if (t.size() < 2 || !is_identifier(t[1])) throw MalformedSchemaFile(line, "expected an entity name");

    Raw raw;
    raw.name = t[1];
    raw.line = line;
    bool saw_attrs = false;
    for (std::size_t i = 2; i < t.size(); ++i) {
      const std::string& key = t[i];
      if (key == "abstract") {
        raw.is_abstract = true;
        continue;
      }
      if (i + 1 >= t.size()) throw MalformedSchemaFile(line, "missing value after '" + key + "'");
      const std::string& value = t[++i];
      if (key == "parent") {
        if (!is_identifier(value)) throw MalformedSchemaFile(line, "bad parent name '" + value + "'");
        raw.parent = value;
      } else if (key == "attrs") {
        saw_attrs = true;
        if (value == "-") continue;
        for (auto& a : split(value, ',')) {
          if (!is_identifier(a)) throw MalformedSchemaFile(line, "bad attribute name '" + a + "'");
          raw.attrs.push_back(std::move(a));
        }
      } else if (key == "inverses") {
        for (const auto& spec : split(value, ',')) {
          auto eq = spec.find('=');
          auto dot = spec.find('.', eq == std::string::npos ? 0 : eq);
          if (eq == std::string::npos || dot == std::string::npos)
            throw MalformedSchemaFile(line, "bad inverse '" + spec + "', expected Name=Entity.Attribute");
          InverseAttribute inv{spec.substr(0, eq), spec.substr(eq + 1, dot - eq - 1), spec.substr(dot + 1)};
          if (!is_identifier(inv.name) || !is_identifier(inv.relationship) || !is_identifier(inv.attribute))
            throw MalformedSchemaFile(line, "bad inverse '" + spec + "'");
          raw.inverses.push_back(std::move(inv));
        }
      } else {
        throw MalformedSchemaFile(line, "unknown entity field '" + key + "'");
      }
    }
    if (!saw_attrs) throw MalformedSchemaFile(line, "entity " + raw.name + " lacks an attrs field");
    if (raw.parent && *raw.parent == raw.name) throw MalformedSchemaFile(line, raw.name + " is its own parent");

    if (auto it = index_.find(raw.name); it != index_.end()) {
      raws_[it->second] = std::move(raw);
    } else {
      index_.emplace(raw.name, raws_.size());
      raws_.push_back(std::move(raw));
    }
  }

  Version version_;
  std::vector<Raw> raws_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::string> aliases_;
};

const EntityDescriptor* SchemaRegistry::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &entities_[it->second];
}

std::optional<std::string> SchemaRegistry::canonical_name(std::string_view any_case) const {
  auto it = by_upper_.find(to_upper(any_case));
  if (it == by_upper_.end()) return std::nullopt;
  return entities_[it->second].name;
}

std::string SchemaRegistry::resolve_label(std::string_view label) const {
  if (auto it = label_aliases_.find(std::string(label)); it != label_aliases_.end() && !contains(label))
    return it->second;
  return std::string(label);
}

std::set<std::string> SchemaRegistry::subclasses_of(std::string_view name) const {
  std::set<std::string> out;
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) {
    out.emplace(name);
    return out;
  }
  std::vector<std::size_t> stack{it->second};
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    out.insert(entities_[i].name);
    for (std::size_t c : children_[i]) stack.push_back(c);
  }
  return out;
}

bool SchemaRegistry::is_subtype_of(std::string_view entity, std::string_view ancestor) const {
  if (entity == ancestor) return true;
  const EntityDescriptor* d = find(entity);
  while (d && d->parent) {
    if (*d->parent == ancestor) return true;
    d = find(*d->parent);
  }
  return false;
}

std::vector<std::string> SchemaRegistry::ancestors_of(std::string_view name) const {
  std::vector<std::string> out;
  const EntityDescriptor* d = find(name);
  while (d && d->parent) {
    out.push_back(*d->parent);
    d = find(*d->parent);
  }
  return out;
}

std::size_t SchemaRegistry::attribute_count(std::string_view entity) const {
  const EntityDescriptor* d = find(entity);
  return d ? d->attribute_count() : 0;
}

std::string SchemaRegistry::attribute_name(std::string_view entity, std::size_t position) const {
  const EntityDescriptor* d = find(entity);
  if (!d || position >= d->attributes.size()) throw PositionOutOfRange(std::string(entity), position);
  return d->attributes[position];
}

std::string SchemaRegistry::attribute_name_or_synthesized(std::string_view entity, std::size_t position) const {
  const EntityDescriptor* d = find(entity);
  if (!d || position >= d->attributes.size()) return "attr" + std::to_string(position);
  return d->attributes[position];
}

std::vector<std::string> SchemaRegistry::inverse_aliases(std::string_view entity, std::string_view attribute) const {
  std::string current(entity);
  while (true) {
    if (auto it = inverse_by_forward_.find({current, std::string(attribute)}); it != inverse_by_forward_.end())
      return it->second;
    const EntityDescriptor* d = find(current);
    if (!d || !d->parent) return {};
    current = *d->parent;
  }
}

std::vector<std::string> SchemaRegistry::entity_names() const {
  std::vector<std::string> out;
  out.reserve(entities_.size());
  for (const auto& e : entities_) out.push_back(e.name);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string_view builtin_text(Version version) {
  return version == Version::Ifc2x3 ? detail::kIfc2x3SchemaData : detail::kIfc4SchemaData;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read schema file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::shared_ptr<const SchemaRegistry> load_schema_with_extension(Version version, std::string_view extension_text) {
  RegistryLoader loader(version);
  loader.parse(builtin_text(version));
  loader.parse(extension_text);
  return loader.finish();
}

std::shared_ptr<const SchemaRegistry> load_schema(Version version,
                                                  const std::optional<std::filesystem::path>& extension_file) {
  if (!extension_file) return builtin_schema(version);
  return load_schema_with_extension(version, read_text(*extension_file));
}

std::shared_ptr<const SchemaRegistry> builtin_schema(Version version) {
  static std::once_flag once[2];
  static std::shared_ptr<const SchemaRegistry> cache[2];
  const auto slot = static_cast<std::size_t>(version);
  std::call_once(once[slot], [&] {
    RegistryLoader loader(version);
    loader.parse(builtin_text(version));
    cache[slot] = loader.finish();
  });
  return cache[slot];
}

std::shared_ptr<const SchemaRegistry> schema_for(Version version,
                                                 const std::optional<std::filesystem::path>& extension_file) {
  if (extension_file) return load_schema(version, extension_file);
  if (const char* env = std::getenv("C4B_SCHEMA_PATH"); env && *env) return load_schema(version, std::filesystem::path(env));
  return builtin_schema(version);
}

}  // namespace bimgraph::schema
