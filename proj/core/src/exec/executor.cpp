#include "bimgraph/exec/executor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bimgraph/exec/eval.hpp"

namespace bimgraph::exec {

NoPathColumn::NoPathColumn() : QueryError("result has no path column") {}

namespace {

using graph::EdgeIndex;
using graph::LabelId;
using graph::NodeIndex;
using query::EdgeDirection;

constexpr NodeIndex kUnbound = std::numeric_limits<NodeIndex>::max();

struct NodeSlot {
  std::string var;
  std::vector<std::string> labels;
  /// Indexed by node LabelId; empty when the slot has no label test.
  std::vector<char> mask;
  bool has_mask = false;
  std::vector<std::pair<std::string, query::Literal>> props;
  std::optional<InstanceId> id_lookup;
};

struct EdgeSlot {
  std::string var;
  std::optional<std::string> label;
  std::optional<LabelId> label_id;
  EdgeDirection direction = EdgeDirection::Undirected;
  int left = 0;
  int right = 0;
};

struct Conjunct {
  const query::Expr* expr;
  std::vector<int> node_slots;
  std::vector<int> edge_slots;
};

struct Step {
  enum class Kind { Seed, Expand, Close };
  Kind kind = Kind::Seed;
  int node = -1;  // slot bound by this step (Seed, Expand)
  int edge = -1;  // Expand, Close
  int from = -1;  // bound endpoint slot (Expand, Close)
  std::vector<int> conjuncts;
  double estimate = 0;
  std::string how;
};

void collect_vars(const query::Expr& e, std::vector<std::string>& out) {
  auto operand = [&](const query::Operand& op) {
    if (const auto* p = std::get_if<query::PropAccess>(&op)) out.push_back(p->var);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, query::Comparison>) {
          operand(n.lhs);
          operand(n.rhs);
        } else if constexpr (std::is_same_v<T, query::InList> || std::is_same_v<T, query::Contains>) {
          operand(n.lhs);
        } else if constexpr (std::is_same_v<T, query::Not>) {
          collect_vars(*n.inner, out);
        } else {
          for (const auto& t : n.terms) collect_vars(t, out);
        }
      },
      e.node);
}

class Compiled {
 public:
  Compiled(const graph::PropertyGraph& g, const query::QueryAst& ast, const ExecOptions& options)
      : g_(g), ast_(ast), options_(options) {
    build_slots();
    build_conjuncts();
    if (!impossible_) build_steps();
  }

  const std::vector<NodeSlot>& nodes() const { return nodes_; }
  const std::vector<EdgeSlot>& edges() const { return edges_; }
  const std::vector<Step>& steps() const { return steps_; }
  bool impossible() const { return impossible_; }
  const std::map<std::string, int>& node_vars() const { return node_var_; }
  const std::map<std::string, int>& edge_vars() const { return edge_var_; }
  const std::vector<std::pair<std::vector<int>, std::vector<int>>>& paths() const { return paths_; }
  const std::map<std::string, std::size_t>& path_vars() const { return path_var_; }

  /// Single node pattern counted by label alone.
  bool count_fast_path() const {
    if (ast_.patterns.size() != 1 || ast_.patterns[0].nodes.size() != 1 || ast_.where) return false;
    if (!nodes_[0].props.empty()) return false;
    return std::all_of(ast_.returns.begin(), ast_.returns.end(),
                       [](const auto& r) { return r.kind == query::ReturnItem::Kind::Count; });
  }

  std::size_t fast_count() const {
    if (impossible_) return 0;
    if (!nodes_[0].has_mask) return g_.node_count();
    std::size_t total = 0;
    for (LabelId l = 0; l < nodes_[0].mask.size(); ++l)
      if (nodes_[0].mask[l]) total += g_.nodes_with_label_id(l).size();
    return total;
  }

  bool node_ok(int slot, NodeIndex n) const {
    const NodeSlot& s = nodes_[slot];
    if (s.has_mask && !s.mask[g_.label_id_of(n)]) return false;
    for (const auto& [key, lit] : s.props) {
      auto v = g_.property(n, key);
      if (!v || compare(*v, query::CompareOp::Eq, to_prop(lit)) != Tri::True) return false;
    }
    return true;
  }

  /// Edges usable by `slot` from bound node x, with the node at the far end.
  void candidates(int slot, NodeIndex x, bool from_left, std::vector<std::pair<EdgeIndex, NodeIndex>>& out) const {
    out.clear();
    const EdgeSlot& s = edges_[slot];
    bool want_out = false, want_in = false;
    switch (s.direction) {
      case EdgeDirection::Right: (from_left ? want_out : want_in) = true; break;
      case EdgeDirection::Left: (from_left ? want_in : want_out) = true; break;
      case EdgeDirection::Undirected: want_out = want_in = true; break;
    }
    const std::optional<LabelId> lab = s.label_id;
    auto aliased = [&](EdgeIndex e) {
      auto a = g_.edge_aliases(e);
      return std::find(a.begin(), a.end(), *lab) != a.end();
    };
    if (want_out) {
      for (EdgeIndex e : g_.out_edges(x))
        if (!lab || g_.edge_label_id(e) == *lab) out.emplace_back(e, g_.edge_target(e));
      if (lab)
        for (EdgeIndex e : g_.in_edges(x))
          if (aliased(e)) out.emplace_back(e, g_.edge_source(e));
    }
    if (want_in) {
      for (EdgeIndex e : g_.in_edges(x))
        if (!lab || g_.edge_label_id(e) == *lab) out.emplace_back(e, g_.edge_source(e));
      if (lab)
        for (EdgeIndex e : g_.out_edges(x))
          if (aliased(e)) out.emplace_back(e, g_.edge_target(e));
    }
    if ((want_out && want_in) || lab) {
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
  }

  const std::vector<int>& pre_conjuncts() const { return pre_conjuncts_; }
  const std::vector<Conjunct>& conjuncts() const { return conjuncts_; }

  std::vector<std::string> label_expansions() const {
    std::vector<std::string> out;
    std::vector<std::string> seen;
    for (const auto& s : nodes_) {
      for (const auto& label : s.labels) {
        if (std::find(seen.begin(), seen.end(), label) != seen.end()) continue;
        seen.push_back(label);
        std::string line = label;
        const auto& schema = g_.schema();
        std::string resolved = schema.resolve_label(label);
        if (resolved != label) line += " (alias of " + resolved + ")";
        if (options_.hierarchy_aware) {
          auto subs = schema.subclasses_of(resolved);
          line += " -> {";
          bool first = true;
          for (const auto& name : subs) {
            line += (first ? "" : ", ") + name;
            first = false;
          }
          line += "}";
        } else {
          line += " -> {" + resolved + "} (exact)";
        }
        std::size_t present = 0;
        for (LabelId l : g_.matching_labels(label, options_.hierarchy_aware)) present += g_.nodes_with_label_id(l).size();
        line += ", " + std::to_string(present) + " nodes";
        out.push_back(std::move(line));
      }
    }
    return out;
  }

 private:
  int node_slot_for(const query::NodePattern& n) {
    if (n.var) {
      auto it = node_var_.find(*n.var);
      if (it != node_var_.end()) return it->second;
    }
    int idx = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_.back().var = n.var.value_or("");
    if (n.var) node_var_.emplace(*n.var, idx);
    return idx;
  }

  void add_label(NodeSlot& s, const std::string& label) {
    s.labels.push_back(label);
    std::vector<char> mask(g_.node_label_count(), 0);
    for (LabelId l : g_.matching_labels(label, options_.hierarchy_aware)) mask[l] = 1;
    if (s.has_mask) {
      for (std::size_t i = 0; i < mask.size(); ++i) s.mask[i] = s.mask[i] && mask[i];
    } else {
      s.mask = std::move(mask);
      s.has_mask = true;
    }
    if (std::none_of(s.mask.begin(), s.mask.end(), [](char c) { return c != 0; })) impossible_ = true;
  }

  void build_slots() {
    for (const auto& path : ast_.patterns) {
      std::vector<int> path_nodes, path_edges;
      for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        const auto& n = path.nodes[i];
        int slot = node_slot_for(n);
        if (n.label) add_label(nodes_[slot], *n.label);
        for (const auto& kv : n.props) nodes_[slot].props.push_back(kv);
        path_nodes.push_back(slot);
        if (i > 0) {
          const auto& e = path.edges[i - 1];
          EdgeSlot es;
          es.var = e.var.value_or("");
          es.label = e.label;
          es.direction = e.direction;
          es.left = path_nodes[i - 1];
          es.right = slot;
          if (e.label) {
            es.label_id = g_.find_edge_label(*e.label);
            if (!es.label_id) impossible_ = true;
          }
          int eidx = static_cast<int>(edges_.size());
          if (e.var) edge_var_.emplace(*e.var, eidx);
          edges_.push_back(std::move(es));
          path_edges.push_back(eidx);
        }
      }
      if (path.path_var) path_var_.emplace(*path.path_var, paths_.size());
      paths_.emplace_back(std::move(path_nodes), std::move(path_edges));
    }
    const bool id_stored = g_.stores_key("id");
    for (auto& s : nodes_) {
      for (const auto& [key, lit] : s.props) {
        if (key != "id" || id_stored) continue;
        std::optional<std::int64_t> want;
        if (const auto* i = std::get_if<std::int64_t>(&lit)) want = *i;
        if (const auto* d = std::get_if<double>(&lit); d && std::floor(*d) == *d && std::abs(*d) < 9e18)
          want = static_cast<std::int64_t>(*d);
        if (!want) {
          impossible_ = true;  // `id` is always an integer
        } else if (*want < 1 || (s.id_lookup && s.id_lookup->value != static_cast<std::uint64_t>(*want))) {
          impossible_ = true;
        } else {
          s.id_lookup = InstanceId{static_cast<std::uint64_t>(*want)};
        }
      }
    }
  }

  void build_conjuncts() {
    if (!ast_.where) return;
    std::vector<const query::Expr*> parts;
    if (const auto* a = std::get_if<query::And>(&ast_.where->node)) {
      for (const auto& t : a->terms) parts.push_back(&t);
    } else {
      parts.push_back(&*ast_.where);
    }
    for (const auto* e : parts) {
      std::vector<std::string> vars;
      collect_vars(*e, vars);
      Conjunct c{e, {}, {}};
      for (const auto& v : vars) {
        if (auto it = node_var_.find(v); it != node_var_.end()) c.node_slots.push_back(it->second);
        else if (auto jt = edge_var_.find(v); jt != edge_var_.end()) c.edge_slots.push_back(jt->second);
      }
      int idx = static_cast<int>(conjuncts_.size());
      conjuncts_.push_back(std::move(c));
      if (conjuncts_.back().node_slots.empty() && conjuncts_.back().edge_slots.empty()) pre_conjuncts_.push_back(idx);
    }
  }

  double extent(const NodeSlot& s) const {
    if (!s.has_mask) return static_cast<double>(g_.node_count());
    double total = 0;
    for (LabelId l = 0; l < s.mask.size(); ++l)
      if (s.mask[l]) total += static_cast<double>(g_.nodes_with_label_id(l).size());
    return total;
  }

  void build_steps() {
    std::vector<char> node_bound(nodes_.size(), 0), edge_done(edges_.size(), 0);
    std::vector<char> conj_done(conjuncts_.size(), 0);
    for (int c : pre_conjuncts_) conj_done[c] = 1;
    const double avg_degree =
        g_.node_count() ? 2.0 * static_cast<double>(g_.edge_count()) / static_cast<double>(g_.node_count()) : 0.0;
    double rows = 1;

    auto attach = [&](Step& step) {
      for (std::size_t c = 0; c < conjuncts_.size(); ++c) {
        if (conj_done[c]) continue;
        const auto& cj = conjuncts_[c];
        bool ready = std::all_of(cj.node_slots.begin(), cj.node_slots.end(), [&](int s) { return node_bound[s]; }) &&
                     std::all_of(cj.edge_slots.begin(), cj.edge_slots.end(), [&](int e) { return edge_done[e]; });
        if (ready) {
          conj_done[c] = 1;
          step.conjuncts.push_back(static_cast<int>(c));
        }
      }
    };

    std::size_t bound_count = 0;
    while (bound_count < nodes_.size()) {
      // Seed: id lookup, then property equality, then smallest label extent, then scan.
      int best = -1;
      std::tuple<int, double> best_score{4, 0};
      for (int s = 0; s < static_cast<int>(nodes_.size()); ++s) {
        if (node_bound[s]) continue;
        const NodeSlot& ns = nodes_[s];
        std::tuple<int, double> score;
        if (ns.id_lookup) score = {0, 1.0};
        else if (!ns.props.empty()) score = {1, extent(ns)};
        else if (ns.has_mask) score = {2, extent(ns)};
        else score = {3, extent(ns)};
        if (best < 0 || score < best_score) {
          best = s;
          best_score = score;
        }
      }
      Step seed;
      seed.node = best;
      const NodeSlot& ns = nodes_[best];
      switch (std::get<0>(best_score)) {
        case 0: seed.how = "direct id lookup"; break;
        case 1: seed.how = ns.has_mask ? "label index + property filter" : "full node scan + property filter"; break;
        case 2: seed.how = "label index"; break;
        default: seed.how = "full node scan"; break;
      }
      double seed_est = std::get<0>(best_score) == 1 ? std::max(1.0, std::get<1>(best_score) * 0.1)
                                                      : std::get<1>(best_score);
      rows *= seed_est;
      seed.estimate = rows;
      node_bound[best] = 1;
      ++bound_count;
      attach(seed);
      steps_.push_back(std::move(seed));

      for (;;) {
        int pick = -1;
        bool close = false;
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
          if (edge_done[e]) continue;
          bool l = node_bound[edges_[e].left], r = node_bound[edges_[e].right];
          if (l && r) {
            pick = e;
            close = true;
            break;
          }
          if ((l || r) && pick < 0) pick = e;
        }
        if (pick < 0) break;
        const EdgeSlot& es = edges_[pick];
        Step step;
        step.kind = close ? Step::Kind::Close : Step::Kind::Expand;
        step.edge = pick;
        step.from = node_bound[es.left] ? es.left : es.right;
        edge_done[pick] = 1;
        if (close) {
          rows *= std::min(1.0, avg_degree / std::max<double>(1, static_cast<double>(g_.node_count())));
        } else {
          step.node = step.from == es.left ? es.right : es.left;
          node_bound[step.node] = 1;
          ++bound_count;
          double sel = nodes_[step.node].has_mask && g_.node_count()
                           ? extent(nodes_[step.node]) / static_cast<double>(g_.node_count())
                           : 1.0;
          rows *= std::max(avg_degree * sel, 0.0);
        }
        step.estimate = rows;
        attach(step);
        steps_.push_back(std::move(step));
      }
    }
  }

  const graph::PropertyGraph& g_;
  const query::QueryAst& ast_;
  ExecOptions options_;
  std::vector<NodeSlot> nodes_;
  std::vector<EdgeSlot> edges_;
  std::map<std::string, int> node_var_;
  std::map<std::string, int> edge_var_;
  std::map<std::string, std::size_t> path_var_;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> paths_;
  std::vector<Conjunct> conjuncts_;
  std::vector<int> pre_conjuncts_;
  std::vector<Step> steps_;
  bool impossible_ = false;
};

/// Bindings laid out flat: node slots then edge slots, `stride` entries per row.
struct FlatBindings {
  std::size_t node_width = 0;
  std::size_t stride = 0;
  std::vector<std::uint32_t> data;

  std::size_t size() const { return stride ? data.size() / stride : 0; }
  const std::uint32_t* row(std::size_t i) const { return data.data() + i * stride; }
};

class Matcher {
 public:
  Matcher(const graph::PropertyGraph& g, const Compiled& c, FlatBindings& out, std::size_t* counter)
      : g_(g), c_(c), out_(out), counter_(counter) {
    node_bind_.assign(c.nodes().size(), kUnbound);
    edge_bind_.assign(c.edges().size(), kUnbound);
    scratch_.resize(c.steps().size());
  }

  void run() {
    if (c_.impossible()) return;
    for (int cj : c_.pre_conjuncts())
      if (!conjunct_ok(cj)) return;
    if (c_.steps().empty()) {
      emit();
      return;
    }
    step(0);
  }

 private:
  Tri lookup_eval(const query::Expr& e) const {
    return evaluate(e, [&](const std::string& var, const std::string& key) -> std::optional<graph::PropValue> {
      if (auto it = c_.node_vars().find(var); it != c_.node_vars().end()) {
        return g_.property(node_bind_[it->second], key);
      }
      if (auto it = c_.edge_vars().find(var); it != c_.edge_vars().end()) {
        return edge_property(g_, edge_bind_[it->second], key);
      }
      return std::nullopt;
    });
  }

  bool conjunct_ok(int c) const { return lookup_eval(*c_.conjuncts()[c].expr) == Tri::True; }

  bool conjuncts_ok(const Step& s) const {
    for (int c : s.conjuncts)
      if (!conjunct_ok(c)) return false;
    return true;
  }

  bool edge_used(EdgeIndex e) const {
    for (EdgeIndex b : edge_bind_)
      if (b == e) return true;
    return false;
  }

  void emit() {
    if (counter_) {
      ++*counter_;
      return;
    }
    out_.data.insert(out_.data.end(), node_bind_.begin(), node_bind_.end());
    out_.data.insert(out_.data.end(), edge_bind_.begin(), edge_bind_.end());
  }

  void next(std::size_t i) {
    if (i + 1 == c_.steps().size()) emit();
    else step(i + 1);
  }

  void try_seed(std::size_t i, const Step& s, NodeIndex n) {
    if (!c_.node_ok(s.node, n)) return;
    node_bind_[s.node] = n;
    if (conjuncts_ok(s)) next(i);
    node_bind_[s.node] = kUnbound;
  }

  void step(std::size_t i) {
    const Step& s = c_.steps()[i];
    switch (s.kind) {
      case Step::Kind::Seed: {
        const NodeSlot& ns = c_.nodes()[s.node];
        if (ns.id_lookup) {
          if (auto n = g_.index_of(*ns.id_lookup)) try_seed(i, s, *n);
        } else if (ns.has_mask) {
          for (LabelId l = 0; l < ns.mask.size(); ++l) {
            if (!ns.mask[l]) continue;
            for (NodeIndex n : g_.nodes_with_label_id(l)) try_seed(i, s, n);
          }
        } else {
          for (NodeIndex n = 0; n < g_.node_count(); ++n) try_seed(i, s, n);
        }
        break;
      }
      case Step::Kind::Expand:
      case Step::Kind::Close: {
        const EdgeSlot& es = c_.edges()[s.edge];
        const bool from_left = s.from == es.left;
        auto& cands = scratch_[i];
        c_.candidates(s.edge, node_bind_[s.from], from_left, cands);
        const int other = from_left ? es.right : es.left;
        for (const auto& [e, y] : cands) {
          if (edge_used(e)) continue;
          if (s.kind == Step::Kind::Close) {
            if (y != node_bind_[other]) continue;
            edge_bind_[s.edge] = e;
            if (conjuncts_ok(s)) next(i);
            edge_bind_[s.edge] = kUnbound;
          } else {
            if (!c_.node_ok(other, y)) continue;
            edge_bind_[s.edge] = e;
            node_bind_[other] = y;
            if (conjuncts_ok(s)) next(i);
            node_bind_[other] = kUnbound;
            edge_bind_[s.edge] = kUnbound;
          }
        }
        break;
      }
    }
  }

  const graph::PropertyGraph& g_;
  const Compiled& c_;
  FlatBindings& out_;
  std::size_t* counter_;
  std::vector<NodeIndex> node_bind_;
  std::vector<EdgeIndex> edge_bind_;
  std::vector<std::vector<std::pair<EdgeIndex, NodeIndex>>> scratch_;
};

/// Sorted row order; rows are already distinct by construction.
std::vector<std::size_t> sorted_order(const FlatBindings& b) {
  std::vector<std::size_t> order(b.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(b.row(x), b.row(x) + b.stride, b.row(y), b.row(y) + b.stride);
  });
  return order;
}

FlatBindings run_matcher(const graph::PropertyGraph& g, const Compiled& c) {
  FlatBindings b;
  b.node_width = c.nodes().size();
  b.stride = c.nodes().size() + c.edges().size();
  Matcher(g, c, b, nullptr).run();
  return b;
}

/// Stable string key for grouping and dedup.
void key_of(const Value& v, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          out += "N;";
        } else if constexpr (std::is_same_v<T, NodeRef>) {
          out += "n" + std::to_string(x.id.value) + ";";
        } else if constexpr (std::is_same_v<T, EdgeRef>) {
          out += "e" + std::to_string(x.index) + ";";
        } else if constexpr (std::is_same_v<T, PathValue>) {
          out += "p";
          for (auto id : x.nodes) out += std::to_string(id.value) + ",";
          out += "|";
          for (auto e : x.edges) out += std::to_string(e) + ",";
          out += ";";
        } else {
          out += "v" + std::to_string(x.data.index()) + ":" + format_prop(x) + ";";
        }
      },
      v);
}

}  // namespace

std::optional<graph::PropValue> edge_property(const graph::PropertyGraph& g, graph::EdgeIndex e, std::string_view key) {
  if (key == "name") return graph::PropValue{std::string(g.edge_label(e))};
  if (key == "pos") {
    if (auto p = g.edge_pos(e)) return graph::PropValue{static_cast<std::int64_t>(*p)};
  }
  return std::nullopt;
}

MatchResult match(const graph::PropertyGraph& g, const query::QueryAst& ast, const ExecOptions& options) {
  Compiled c(g, ast, options);
  FlatBindings b = run_matcher(g, c);
  MatchResult r;
  for (const auto& s : c.nodes()) r.node_slots.push_back(s.var);
  for (const auto& s : c.edges()) r.edge_slots.push_back(s.var);
  for (std::size_t i : sorted_order(b)) {
    Binding binding;
    const std::uint32_t* row = b.row(i);
    for (std::size_t k = 0; k < b.node_width; ++k) binding.nodes.push_back(g.id_of(row[k]));
    binding.edges.assign(row + b.node_width, row + b.stride);
    r.bindings.push_back(std::move(binding));
  }
  return r;
}

ResultSet execute(const graph::PropertyGraph& g, const query::QueryAst& ast, const ExecOptions& options) {
  Compiled c(g, ast, options);
  ResultSet rs;
  for (const auto& item : ast.returns) {
    rs.columns.push_back(item.column());
    rs.column_kinds.push_back(item.kind);
  }

  const bool any_count = std::any_of(ast.returns.begin(), ast.returns.end(),
                                     [](const auto& r) { return r.kind == query::ReturnItem::Kind::Count; });
  const bool only_count = std::all_of(ast.returns.begin(), ast.returns.end(),
                                      [](const auto& r) { return r.kind == query::ReturnItem::Kind::Count; });
  if (only_count) {
    std::size_t n = 0;
    if (c.count_fast_path()) {
      n = c.fast_count();
    } else {
      FlatBindings unused;
      Matcher(g, c, unused, &n).run();
    }
    rs.rows.emplace_back(ast.returns.size(), Value{graph::PropValue{static_cast<std::int64_t>(n)}});
    return rs;
  }

  FlatBindings b = run_matcher(g, c);
  auto value_of = [&](const query::ReturnItem& item, const std::uint32_t* row) -> Value {
    if (item.kind == query::ReturnItem::Kind::Path) {
      const auto& [pn, pe] = c.paths()[c.path_vars().at(item.var)];
      PathValue p;
      for (int s : pn) p.nodes.push_back(g.id_of(row[s]));
      for (int s : pe) p.edges.push_back(row[b.node_width + s]);
      return p;
    }
    if (auto it = c.node_vars().find(item.var); it != c.node_vars().end()) {
      NodeIndex n = row[it->second];
      if (item.kind == query::ReturnItem::Kind::Property) {
        if (auto v = g.property(n, item.key)) return *v;
        return Null{};
      }
      return NodeRef{g.id_of(n)};
    }
    EdgeIndex e = row[b.node_width + c.edge_vars().at(item.var)];
    if (item.kind == query::ReturnItem::Kind::Property) {
      if (auto v = edge_property(g, e, item.key)) return *v;
      return Null{};
    }
    return EdgeRef{e};
  };

  std::vector<std::size_t> order = sorted_order(b);
  if (!any_count) {
    rs.rows.reserve(order.size());
    for (std::size_t i : order) {
      std::vector<Value> row;
      row.reserve(ast.returns.size());
      for (const auto& item : ast.returns) row.push_back(value_of(item, b.row(i)));
      rs.rows.push_back(std::move(row));
    }
    return rs;
  }

  // Implicit grouping by the non-count items, groups in order of first appearance.
  std::unordered_map<std::string, std::size_t> group_of;
  std::vector<std::int64_t> counts;
  for (std::size_t i : order) {
    std::vector<Value> row;
    std::string key;
    for (const auto& item : ast.returns) {
      if (item.kind == query::ReturnItem::Kind::Count) {
        row.emplace_back(Null{});
      } else {
        row.push_back(value_of(item, b.row(i)));
        key_of(row.back(), key);
      }
    }
    auto [it, fresh] = group_of.emplace(key, rs.rows.size());
    if (fresh) {
      rs.rows.push_back(std::move(row));
      counts.push_back(0);
    }
    ++counts[it->second];
  }
  for (std::size_t r = 0; r < rs.rows.size(); ++r)
    for (std::size_t k = 0; k < ast.returns.size(); ++k)
      if (ast.returns[k].kind == query::ReturnItem::Kind::Count) rs.rows[r][k] = graph::PropValue{counts[r]};
  return rs;
}

ResultSet execute(const graph::PropertyGraph& g, std::string_view query_text, const ExecOptions& options) {
  return execute(g, query::parse_query(query_text), options);
}

ResultSet distinct(ResultSet rs) {
  std::unordered_map<std::string, bool> seen;
  std::vector<std::vector<Value>> kept;
  for (auto& row : rs.rows) {
    std::string key;
    for (const auto& v : row) key_of(v, key);
    if (seen.emplace(std::move(key), true).second) kept.push_back(std::move(row));
  }
  rs.rows = std::move(kept);
  return rs;
}

Subgraph result_subgraph(const ResultSet& result) {
  std::vector<std::size_t> path_columns;
  for (std::size_t col = 0; col < result.column_kinds.size(); ++col)
    if (result.column_kinds[col] == query::ReturnItem::Kind::Path) path_columns.push_back(col);
  if (path_columns.empty()) throw NoPathColumn();
  Subgraph sg;
  for (const auto& row : result.rows) {
    for (std::size_t col : path_columns) {
      const auto& p = std::get<PathValue>(row[col]);
      sg.nodes.insert(sg.nodes.end(), p.nodes.begin(), p.nodes.end());
      sg.edges.insert(sg.edges.end(), p.edges.begin(), p.edges.end());
    }
  }
  std::sort(sg.nodes.begin(), sg.nodes.end());
  sg.nodes.erase(std::unique(sg.nodes.begin(), sg.nodes.end()), sg.nodes.end());
  std::sort(sg.edges.begin(), sg.edges.end());
  sg.edges.erase(std::unique(sg.edges.begin(), sg.edges.end()), sg.edges.end());
  return sg;
}

Plan explain(const graph::PropertyGraph& g, const query::QueryAst& ast, const ExecOptions& options) {
  Compiled c(g, ast, options);
  Plan plan;
  plan.label_expansions = c.label_expansions();
  auto slot_text = [&](int s) {
    const NodeSlot& ns = c.nodes()[s];
    std::string out = "(" + ns.var;
    for (const auto& l : ns.labels) out += ":" + l;
    return out + ")";
  };
  if (c.impossible()) plan.warnings.push_back("a label, edge label or id constraint matches nothing; result is empty");
  if (c.count_fast_path()) {
    plan.count_fast_path = true;
    plan.steps.push_back({"count " + slot_text(0) + " from label index extents",
                          static_cast<double>(c.fast_count())});
    return plan;
  }
  for (const auto& s : c.steps()) {
    PlanStep ps;
    ps.estimated_rows = s.estimate;
    if (s.kind == Step::Kind::Seed) {
      ps.description = "seed " + slot_text(s.node) + " via " + s.how;
      if (s.how == "full node scan")
        plan.warnings.push_back("full-graph scan over " + std::to_string(g.node_count()) + " nodes for " +
                                slot_text(s.node));
    } else {
      const EdgeSlot& es = c.edges()[s.edge];
      std::string edge = "[" + es.var + (es.label ? ":" + *es.label : "") + "]";
      std::string dir = es.direction == EdgeDirection::Undirected ? "undirected"
                        : es.direction == EdgeDirection::Right     ? "left-to-right"
                                                                   : "right-to-left";
      if (s.kind == Step::Kind::Expand)
        ps.description = "expand " + edge + " (" + dir + ") from " + slot_text(s.from) + " to " + slot_text(s.node);
      else
        ps.description = "close " + edge + " (" + dir + ") between " + slot_text(es.left) + " and " + slot_text(es.right);
    }
    if (!s.conjuncts.empty()) {
      ps.description += "; filter";
      for (int cj : s.conjuncts) ps.description += " [" + query::format_expr(*c.conjuncts()[cj].expr) + "]";
    }
    plan.steps.push_back(std::move(ps));
  }
  return plan;
}

std::string Plan::to_string() const {
  std::ostringstream out;
  out << "plan:\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out << "  " << (i + 1) << ". " << steps[i].description << "  (est. " << static_cast<long long>(steps[i].estimated_rows)
        << " rows)\n";
  }
  if (!label_expansions.empty()) {
    out << "labels:\n";
    for (const auto& l : label_expansions) out << "  " << l << "\n";
  }
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string format_prop(const graph::PropValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return query::format_literal(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return query::format_literal(v);
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            out += format_prop(v[i]);
          }
          return out + "]";
        }
      },
      value.data);
}

std::string format_value(const graph::PropertyGraph& g, const Value& value) {
  auto node = [&](InstanceId id) {
    auto n = g.index_of(id);
    return "(#" + std::to_string(id.value) + ":" + (n ? std::string(g.label_of(*n)) : std::string("?")) + ")";
  };
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Null>) {
          return "null";
        } else if constexpr (std::is_same_v<T, NodeRef>) {
          return node(v.id);
        } else if constexpr (std::is_same_v<T, EdgeRef>) {
          auto ev = g.edge(v.index);
          return "[#" + std::to_string(ev.from.value) + "-" + std::string(ev.label) + "->#" +
                 std::to_string(ev.to.value) + "]";
        } else if constexpr (std::is_same_v<T, PathValue>) {
          std::string out = node(v.nodes.front());
          for (std::size_t i = 0; i < v.edges.size(); ++i) {
            auto ev = g.edge(v.edges[i]);
            bool forward = ev.from == v.nodes[i] && ev.to == v.nodes[i + 1];
            out += forward ? "-[:" + std::string(ev.label) + "]->" : "<-[:" + std::string(ev.label) + "]-";
            out += node(v.nodes[i + 1]);
          }
          return out;
        } else {
          return format_prop(v);
        }
      },
      value);
}

std::string format_table(const graph::PropertyGraph& g, const ResultSet& result) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(result.columns);
  for (const auto& row : result.rows) {
    std::vector<std::string> line;
    for (const auto& v : row) line.push_back(format_value(g, v));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(result.columns.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      if (i) out << " | ";
      out << cells[r][i];
      if (i + 1 < cells[r].size()) out << std::string(width[i] - cells[r][i].size(), ' ');
    }
    out << "\n";
    if (r == 0) {
      for (std::size_t i = 0; i < width.size(); ++i) {
        if (i) out << "-+-";
        out << std::string(width[i], '-');
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace bimgraph::exec
