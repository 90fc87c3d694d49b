#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "bimgraph/common.hpp"
#include "bimgraph/schema/registry.hpp"

namespace bimgraph::graph {

/// Node property value. There is no reference alternative: references are edges.
struct PropValue {
  using List = std::vector<PropValue>;
  std::variant<std::int64_t, double, std::string, bool, List> data;

  PropValue() = default;
  template <class T>
    requires std::is_constructible_v<decltype(data), T&&> && (!std::is_same_v<std::remove_cvref_t<T>, PropValue>)
  PropValue(T&& v) : data(std::forward<T>(v)) {}  // NOLINT(google-explicit-constructor)

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&data);
  }

  friend bool operator==(const PropValue&, const PropValue&) = default;
};

/// Sorted by key.
using Properties = std::vector<std::pair<std::string, PropValue>>;

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
using LabelId = std::uint32_t;

inline constexpr std::int32_t kNoPos = -1;

class UnknownNode : public Error {
 public:
  explicit UnknownNode(InstanceId id);
};

enum class Direction { Out, In, Both };

struct EdgeView {
  InstanceId from;
  InstanceId to;
  std::string_view label;
  std::optional<std::int32_t> pos;
};

struct Neighbor {
  EdgeIndex edge;
  InstanceId node;
  /// True when the edge was traversed against its stored direction.
  bool reversed;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::map<std::string, std::size_t> per_label;
};

/// Immutable labeled property graph. Node ids are STEP instance ids; edges point from the
/// referencing instance to the referenced one. Produced by GraphBuilder::freeze().
class PropertyGraph {
 public:
  PropertyGraph() = default;

  const schema::SchemaRegistry& schema() const { return *schema_; }
  std::shared_ptr<const schema::SchemaRegistry> schema_ptr() const { return schema_; }

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_src_.size(); }

  std::optional<NodeIndex> index_of(InstanceId id) const;
  InstanceId id_of(NodeIndex n) const { return ids_[n]; }
  LabelId label_id_of(NodeIndex n) const { return node_label_[n]; }
  std::string_view label_of(NodeIndex n) const { return node_labels_[node_label_[n]]; }
  const Properties& stored_properties(NodeIndex n) const { return props_[n]; }
  /// Looks up a property, including the injected `id` (Integer) and `name` (label text).
  /// Stored properties shadow the injected ones.
  std::optional<PropValue> property(NodeIndex n, std::string_view key) const;
  const PropValue* stored_property(NodeIndex n, std::string_view key) const;
  /// True when at least one node stores `key` itself (rather than through injection).
  bool stores_key(std::string_view key) const { return stored_keys_.find(key) != stored_keys_.end(); }

  NodeIndex edge_source(EdgeIndex e) const { return edge_src_[e]; }
  NodeIndex edge_target(EdgeIndex e) const { return edge_dst_[e]; }
  LabelId edge_label_id(EdgeIndex e) const { return edge_label_[e]; }
  std::string_view edge_label(EdgeIndex e) const { return edge_labels_[edge_label_[e]]; }
  std::optional<std::int32_t> edge_pos(EdgeIndex e) const {
    return edge_pos_[e] == kNoPos ? std::nullopt : std::optional<std::int32_t>(edge_pos_[e]);
  }
  EdgeView edge(EdgeIndex e) const;
  /// Inverse-attribute names under which the edge may be traversed against its direction.
  std::span<const LabelId> edge_aliases(EdgeIndex e) const { return alias_sets_[edge_alias_set_[e]]; }

  std::span<const EdgeIndex> out_edges(NodeIndex n) const {
    return {out_list_.data() + out_offsets_[n], out_offsets_[n + 1] - out_offsets_[n]};
  }
  std::span<const EdgeIndex> in_edges(NodeIndex n) const {
    return {in_list_.data() + in_offsets_[n], in_offsets_[n + 1] - in_offsets_[n]};
  }

  std::size_t node_label_count() const { return node_labels_.size(); }
  std::string_view node_label_name(LabelId l) const { return node_labels_[l]; }
  std::optional<LabelId> find_node_label(std::string_view label) const;
  std::span<const NodeIndex> nodes_with_label_id(LabelId l) const { return label_index_[l]; }

  std::size_t edge_label_count() const { return edge_labels_.size(); }
  std::string_view edge_label_name(LabelId l) const { return edge_labels_[l]; }
  std::optional<LabelId> find_edge_label(std::string_view label) const;

  /// Node labels a label test accepts: the label itself, or with `hierarchy_aware` every
  /// subclass. Registered label aliases are resolved first. Only labels present in the graph are returned.
  std::vector<LabelId> matching_labels(std::string_view label, bool hierarchy_aware) const;

  /// Sorted ids of nodes whose label passes the label test.
  std::vector<InstanceId> nodes_with_label(std::string_view label, bool hierarchy_aware) const;

  /// Edges incident to `id` with the node at the other end. With a label filter an edge
  /// matches by its own label in its stored direction, or by one of its inverse aliases
  /// when traversed against it.
  std::vector<Neighbor> neighbors(InstanceId id, Direction direction,
                                  std::optional<std::string_view> label = std::nullopt) const;

  GraphStats stats() const;

 private:
  friend class GraphBuilder;

  std::shared_ptr<const schema::SchemaRegistry> schema_;

  std::vector<InstanceId> ids_;  // sorted ascending; position == NodeIndex
  std::vector<LabelId> node_label_;
  std::vector<Properties> props_;
  std::set<std::string, std::less<>> stored_keys_;

  std::vector<NodeIndex> edge_src_;
  std::vector<NodeIndex> edge_dst_;
  std::vector<LabelId> edge_label_;
  std::vector<std::int32_t> edge_pos_;
  std::vector<std::uint32_t> edge_alias_set_;
  std::vector<std::vector<LabelId>> alias_sets_;

  std::vector<std::size_t> out_offsets_;
  std::vector<EdgeIndex> out_list_;
  std::vector<std::size_t> in_offsets_;
  std::vector<EdgeIndex> in_list_;

  std::vector<std::string> node_labels_;
  std::unordered_map<std::string, LabelId> node_label_ids_;
  std::vector<std::vector<NodeIndex>> label_index_;

  std::vector<std::string> edge_labels_;
  std::unordered_map<std::string, LabelId> edge_label_ids_;
};

/// Single-writer staging area for a PropertyGraph.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::shared_ptr<const schema::SchemaRegistry> schema);

  /// `props` need not be sorted. Duplicate ids are reported by freeze().
  void add_node(InstanceId id, std::string_view label, Properties props = {});
  void add_edge(InstanceId from, InstanceId to, std::string_view label, std::optional<std::int32_t> pos = std::nullopt);
  void reserve(std::size_t nodes, std::size_t edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Builds the indexes and seals the graph. Throws Error on duplicate node ids or
  /// edges whose endpoints were never added.
  PropertyGraph freeze() &&;

 private:
  struct StagedNode {
    InstanceId id;
    LabelId label;
    Properties props;
  };
  struct StagedEdge {
    InstanceId from;
    InstanceId to;
    LabelId label;
    std::int32_t pos;
  };

  LabelId intern(std::vector<std::string>& table, std::unordered_map<std::string, LabelId>& ids, std::string_view s);

  std::shared_ptr<const schema::SchemaRegistry> schema_;
  std::vector<StagedNode> nodes_;
  std::vector<StagedEdge> edges_;
  std::vector<std::string> node_labels_;
  std::unordered_map<std::string, LabelId> node_label_ids_;
  std::vector<std::string> edge_labels_;
  std::unordered_map<std::string, LabelId> edge_label_ids_;
};

}  // namespace bimgraph::graph
