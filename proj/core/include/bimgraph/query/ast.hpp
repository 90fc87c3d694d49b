#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bimgraph/common.hpp"

namespace bimgraph::query {

using Literal = std::variant<std::int64_t, double, std::string, bool>;

struct NodePattern {
  std::optional<std::string> var;
  std::optional<std::string> label;
  /// Written order is kept; duplicate keys are conjunctive.
  std::vector<std::pair<std::string, Literal>> props;

  friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

enum class EdgeDirection { Left, Right, Undirected };

struct EdgePattern {
  std::optional<std::string> var;
  std::optional<std::string> label;
  EdgeDirection direction = EdgeDirection::Undirected;

  friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

/// nodes.size() == edges.size() + 1; edges[i] joins nodes[i] and nodes[i + 1].
struct PathPattern {
  std::optional<std::string> path_var;
  std::vector<NodePattern> nodes;
  std::vector<EdgePattern> edges;

  friend bool operator==(const PathPattern&, const PathPattern&) = default;
};

struct PropAccess {
  std::string var;
  std::string key;

  friend bool operator==(const PropAccess&, const PropAccess&) = default;
};

using Operand = std::variant<PropAccess, Literal>;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Expr;

struct Comparison {
  CompareOp op;
  Operand lhs;
  Operand rhs;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct InList {
  Operand lhs;
  std::vector<Literal> items;

  friend bool operator==(const InList&, const InList&) = default;
};

struct Contains {
  Operand lhs;
  std::string needle;

  friend bool operator==(const Contains&, const Contains&) = default;
};

struct And {
  std::vector<Expr> terms;
  friend bool operator==(const And&, const And&) = default;
};

struct Or {
  std::vector<Expr> terms;
  friend bool operator==(const Or&, const Or&) = default;
};

struct Not {
  Box<Expr> inner;
  friend bool operator==(const Not&, const Not&) = default;
};

struct Expr {
  std::variant<Comparison, InList, Contains, And, Or, Not> node;

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct ReturnItem {
  enum class Kind { Var, Property, Count, Path };
  Kind kind = Kind::Var;
  std::string var;
  /// Property key, Kind::Property only.
  std::string key;

  /// Column heading, e.g. `n`, `n.Name`, `count(n)`.
  std::string column() const;

  friend bool operator==(const ReturnItem&, const ReturnItem&) = default;
};

struct QueryAst {
  std::vector<PathPattern> patterns;
  std::optional<Expr> where;
  std::vector<ReturnItem> returns;

  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

/// Canonical text: lowercase keywords, no optional whitespace inside patterns.
/// parse_query(format_ast(a)) == a for every parsed `a`.
std::string format_ast(const QueryAst& ast);
std::string format_expr(const Expr& expr);
std::string format_literal(const Literal& literal);
std::string format_pattern(const PathPattern& pattern);

/// Variables bound by the patterns, in order of first appearance.
std::vector<std::string> bound_variables(const QueryAst& ast);

}  // namespace bimgraph::query
