#include "bimgraph/graph/property_graph.hpp"

#include <algorithm>
#include <map>

namespace bimgraph::graph {

UnknownNode::UnknownNode(InstanceId id) : Error("no node with id " + std::to_string(id.value)) {}

std::optional<NodeIndex> PropertyGraph::index_of(InstanceId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<NodeIndex>(it - ids_.begin());
}

const PropValue* PropertyGraph::stored_property(NodeIndex n, std::string_view key) const {
  const Properties& props = props_[n];
  auto it = std::lower_bound(props.begin(), props.end(), key,
                             [](const auto& kv, std::string_view k) { return kv.first < k; });
  if (it == props.end() || it->first != key) return nullptr;
  return &it->second;
}

std::optional<PropValue> PropertyGraph::property(NodeIndex n, std::string_view key) const {
  if (const PropValue* v = stored_property(n, key)) return *v;
  if (key == "id") return PropValue{static_cast<std::int64_t>(ids_[n].value)};
  if (key == "name") return PropValue{std::string(label_of(n))};
  return std::nullopt;
}

EdgeView PropertyGraph::edge(EdgeIndex e) const {
  return EdgeView{ids_[edge_src_[e]], ids_[edge_dst_[e]], edge_label(e), edge_pos(e)};
}

std::optional<LabelId> PropertyGraph::find_node_label(std::string_view label) const {
  auto it = node_label_ids_.find(std::string(label));
  if (it == node_label_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<LabelId> PropertyGraph::find_edge_label(std::string_view label) const {
  auto it = edge_label_ids_.find(std::string(label));
  if (it == edge_label_ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<LabelId> PropertyGraph::matching_labels(std::string_view label, bool hierarchy_aware) const {
  const std::string resolved = schema_ ? schema_->resolve_label(label) : std::string(label);
  std::vector<LabelId> out;
  if (!hierarchy_aware || !schema_) {
    if (auto id = find_node_label(resolved)) out.push_back(*id);
    return out;
  }
  for (const auto& name : schema_->subclasses_of(resolved)) {
    if (auto id = find_node_label(name)) out.push_back(*id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<InstanceId> PropertyGraph::nodes_with_label(std::string_view label, bool hierarchy_aware) const {
  std::vector<InstanceId> out;
  for (LabelId l : matching_labels(label, hierarchy_aware)) {
    for (NodeIndex n : label_index_[l]) out.push_back(ids_[n]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> PropertyGraph::neighbors(InstanceId id, Direction direction,
                                               std::optional<std::string_view> label) const {
  auto idx = index_of(id);
  if (!idx) throw UnknownNode(id);
  std::optional<LabelId> wanted;
  if (label) {
    wanted = find_edge_label(*label);
    if (!wanted) return {};
  }
  auto has_alias = [&](EdgeIndex e) {
    auto aliases = edge_aliases(e);
    return std::find(aliases.begin(), aliases.end(), *wanted) != aliases.end();
  };

  std::vector<Neighbor> out;
  // Effective "outgoing": stored out-edges by label, plus in-edges seen through an inverse alias.
  auto collect_out = [&] {
    for (EdgeIndex e : out_edges(*idx))
      if (!wanted || edge_label_[e] == *wanted) out.push_back({e, ids_[edge_dst_[e]], false});
    if (wanted)
      for (EdgeIndex e : in_edges(*idx))
        if (has_alias(e)) out.push_back({e, ids_[edge_src_[e]], true});
  };
  auto collect_in = [&] {
    for (EdgeIndex e : in_edges(*idx))
      if (!wanted || edge_label_[e] == *wanted) out.push_back({e, ids_[edge_src_[e]], true});
    if (wanted)
      for (EdgeIndex e : out_edges(*idx))
        if (has_alias(e)) out.push_back({e, ids_[edge_dst_[e]], false});
  };
  if (direction == Direction::Out || direction == Direction::Both) collect_out();
  if (direction == Direction::In || direction == Direction::Both) collect_in();
  return out;
}

GraphStats PropertyGraph::stats() const {
  GraphStats s;
  s.nodes = ids_.size();
  s.edges = edge_src_.size();
  for (LabelId l = 0; l < node_labels_.size(); ++l) {
    if (!label_index_[l].empty()) s.per_label.emplace(node_labels_[l], label_index_[l].size());
  }
  return s;
}

GraphBuilder::GraphBuilder(std::shared_ptr<const schema::SchemaRegistry> schema) : schema_(std::move(schema)) {}

LabelId GraphBuilder::intern(std::vector<std::string>& table, std::unordered_map<std::string, LabelId>& ids,
                             std::string_view s) {
  auto key = std::string(s);
  if (auto it = ids.find(key); it != ids.end()) return it->second;
  auto id = static_cast<LabelId>(table.size());
  table.push_back(key);
  ids.emplace(std::move(key), id);
  return id;
}

void GraphBuilder::add_node(InstanceId id, std::string_view label, Properties props) {
  std::sort(props.begin(), props.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  nodes_.push_back({id, intern(node_labels_, node_label_ids_, label), std::move(props)});
}

void GraphBuilder::add_edge(InstanceId from, InstanceId to, std::string_view label, std::optional<std::int32_t> pos) {
  edges_.push_back({from, to, intern(edge_labels_, edge_label_ids_, label), pos.value_or(kNoPos)});
}

void GraphBuilder::reserve(std::size_t nodes, std::size_t edges) {
  nodes_.reserve(nodes);
  edges_.reserve(edges);
}

PropertyGraph GraphBuilder::freeze() && {
  PropertyGraph g;
  g.schema_ = schema_;

  std::stable_sort(nodes_.begin(), nodes_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].id == nodes_[i - 1].id) throw Error("duplicate node id " + std::to_string(nodes_[i].id.value));
  }
  const std::size_t n = nodes_.size();
  g.ids_.reserve(n);
  g.node_label_.reserve(n);
  g.props_.reserve(n);
  g.label_index_.assign(node_labels_.size(), {});
  for (std::size_t i = 0; i < n; ++i) {
    g.ids_.push_back(nodes_[i].id);
    g.node_label_.push_back(nodes_[i].label);
    for (const auto& kv : nodes_[i].props)
      if (g.stored_keys_.find(kv.first) == g.stored_keys_.end()) g.stored_keys_.insert(kv.first);
    g.props_.push_back(std::move(nodes_[i].props));
    g.label_index_[nodes_[i].label].push_back(static_cast<NodeIndex>(i));
  }
  nodes_.clear();
  nodes_.shrink_to_fit();

  const std::size_t m = edges_.size();
  g.edge_src_.resize(m);
  g.edge_dst_.resize(m);
  g.edge_label_.resize(m);
  g.edge_pos_.resize(m);
  auto resolve = [&](InstanceId id) {
    auto idx = g.index_of(id);
    if (!idx) throw Error("edge endpoint #" + std::to_string(id.value) + " is not a node");
    return *idx;
  };
  for (std::size_t e = 0; e < m; ++e) {
    g.edge_src_[e] = resolve(edges_[e].from);
    g.edge_dst_[e] = resolve(edges_[e].to);
    g.edge_label_[e] = edges_[e].label;
    g.edge_pos_[e] = edges_[e].pos;
  }
  edges_.clear();
  edges_.shrink_to_fit();

  // Compressed adjacency, edges in ascending index order per node.
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (std::size_t e = 0; e < m; ++e) {
    ++g.out_offsets_[g.edge_src_[e] + 1];
    ++g.in_offsets_[g.edge_dst_[e] + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    g.out_offsets_[i + 1] += g.out_offsets_[i];
    g.in_offsets_[i + 1] += g.in_offsets_[i];
  }
  g.out_list_.resize(m);
  g.in_list_.resize(m);
  {
    std::vector<std::size_t> out_fill(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    for (std::size_t e = 0; e < m; ++e) {
      g.out_list_[out_fill[g.edge_src_[e]]++] = static_cast<EdgeIndex>(e);
      g.in_list_[in_fill[g.edge_dst_[e]]++] = static_cast<EdgeIndex>(e);
    }
  }

  // Inverse aliases depend only on (source label, edge label).
  g.alias_sets_.push_back({});
  g.edge_alias_set_.assign(m, 0);
  if (schema_) {
    std::map<std::pair<LabelId, LabelId>, std::uint32_t> cache;
    for (std::size_t e = 0; e < m; ++e) {
      auto key = std::make_pair(g.node_label_[g.edge_src_[e]], g.edge_label_[e]);
      auto it = cache.find(key);
      if (it == cache.end()) {
        auto names = schema_->inverse_aliases(node_labels_[key.first], edge_labels_[key.second]);
        std::uint32_t set = 0;
        if (!names.empty()) {
          std::vector<LabelId> ids;
          for (const auto& name : names) ids.push_back(intern(edge_labels_, edge_label_ids_, name));
          set = static_cast<std::uint32_t>(g.alias_sets_.size());
          g.alias_sets_.push_back(std::move(ids));
        }
        it = cache.emplace(key, set).first;
      }
      g.edge_alias_set_[e] = it->second;
    }
  }

  g.node_labels_ = std::move(node_labels_);
  g.node_label_ids_ = std::move(node_label_ids_);
  g.edge_labels_ = std::move(edge_labels_);
  g.edge_label_ids_ = std::move(edge_label_ids_);
  return g;
}

}  // namespace bimgraph::graph
