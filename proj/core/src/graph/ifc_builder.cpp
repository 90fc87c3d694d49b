#include "bimgraph/graph/ifc_builder.hpp"

#include <set>
#include <utility>

namespace bimgraph::graph {

namespace {

using step::Value;

struct Scan {
  bool refs = false;
  bool primitives = false;
};

void scan(const Value& v, Scan& s) {
  if (v.is<step::EntityRef>()) {
    s.refs = true;
  } else if (const auto* agg = v.get_if<step::Aggregate>()) {
    for (const auto& item : *agg) scan(item, s);
  } else if (const auto* t = v.get_if<step::Typed>()) {
    scan(*t->inner, s);
  } else if (!v.is<step::Unset>() && !v.is<step::Derived>()) {
    s.primitives = true;
  }
}

// Primitive content with references removed; nullopt when nothing is left.
std::optional<PropValue> to_prop(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::optional<PropValue> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, double> ||
                      std::is_same_v<T, std::string>) {
          return PropValue{x};
        } else if constexpr (std::is_same_v<T, step::Enumeration>) {
          return PropValue{x.name};
        } else if constexpr (std::is_same_v<T, step::Logical>) {
          if (x == step::Logical::Unknown) return PropValue{std::string("UNKNOWN")};
          return PropValue{x == step::Logical::True};
        } else if constexpr (std::is_same_v<T, step::Binary>) {
          return PropValue{x.digits};
        } else if constexpr (std::is_same_v<T, step::Typed>) {
          return to_prop(*x.inner);
        } else if constexpr (std::is_same_v<T, step::Aggregate>) {
          PropValue::List list;
          for (const auto& item : x)
            if (auto p = to_prop(item)) list.push_back(std::move(*p));
          if (list.empty()) return std::nullopt;
          return PropValue{std::move(list)};
        } else {
          return std::nullopt;  // Unset, Derived, EntityRef
        }
      },
      v.data);
}

}  // namespace

AttributeKind classify_attribute(const Value& value) {
  Scan s;
  scan(value, s);
  if (s.refs && s.primitives) return AttributeKind::Mixed;
  if (s.refs) return AttributeKind::Extrinsic;
  if (s.primitives) return AttributeKind::Intrinsic;
  return AttributeKind::Omitted;
}

BuildResult build_graph(const step::StepFile& file, std::shared_ptr<const schema::SchemaRegistry> registry) {
  BuildResult result;
  GraphBuilder builder(registry);
  std::set<std::pair<std::string, std::size_t>> synthesized;

  std::size_t edge_estimate = 0;
  for (const auto& [id, inst] : file.instances) edge_estimate += inst.args.size();
  builder.reserve(file.instances.size(), edge_estimate);

  for (const auto& [id, inst] : file.instances) {
    const schema::EntityDescriptor* entity = registry->find(inst.entity);
    Properties props;
    for (std::size_t pos = 0; pos < inst.args.size(); ++pos) {
      const Value& arg = inst.args[pos];
      AttributeKind kind = classify_attribute(arg);
      if (kind == AttributeKind::Omitted) continue;

      std::string name = registry->attribute_name_or_synthesized(inst.entity, pos);
      if (!entity || pos >= entity->attributes.size()) {
        if (synthesized.emplace(inst.entity, pos).second)
          result.report.warnings.push_back({BuildWarning::Kind::SynthesizedAttributeName, id,
                                            inst.entity + " argument " + std::to_string(pos) + " named " + name});
      }

      if (kind == AttributeKind::Intrinsic || kind == AttributeKind::Mixed) {
        if (auto p = to_prop(arg)) {
          if (name == "id" || name == "name")
            result.report.warnings.push_back({BuildWarning::Kind::PropertyKeyCollision, id,
                                              "attribute '" + name + "' shadows the injected property"});
          props.emplace_back(name, std::move(*p));
        }
      }
      if (kind == AttributeKind::Extrinsic || kind == AttributeKind::Mixed) {
        const bool aggregate = arg.is<step::Aggregate>() ||
                               (arg.is<step::Typed>() && arg.as<step::Typed>().inner->is<step::Aggregate>());
        std::int32_t leaf = 0;
        // Position counts every leaf of the aggregate, references and primitives alike.
        auto visit = [&](auto&& self, const Value& v) -> void {
          if (const auto* agg = v.get_if<step::Aggregate>()) {
            for (const auto& item : *agg) self(self, item);
            return;
          }
          if (const auto* t = v.get_if<step::Typed>()) {
            self(self, *t->inner);
            return;
          }
          const std::int32_t my_pos = leaf++;
          const auto* r = v.get_if<step::EntityRef>();
          if (!r) return;
          if (!file.instances.contains(r->target)) {
            result.report.warnings.push_back({BuildWarning::Kind::DanglingRef, id,
                                              name + " -> #" + std::to_string(r->target.value) + " skipped"});
            return;
          }
          builder.add_edge(id, r->target, name, aggregate ? std::optional<std::int32_t>(my_pos) : std::nullopt);
        };
        visit(visit, arg);
      }
    }
    builder.add_node(id, inst.entity, std::move(props));
  }

  result.report.nodes_created = builder.node_count();
  result.report.edges_created = builder.edge_count();
  result.graph = std::move(builder).freeze();
  return result;
}

BuildResult build_graph(const step::StepFile& file) {
  return build_graph(file, schema::builtin_schema(step::effective_version(file)));
}

}  // namespace bimgraph::graph
