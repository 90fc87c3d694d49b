#include <charconv>
#include <cmath>

#include "bimgraph/query/ast.hpp"

namespace bimgraph::query {

namespace {

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '\'';
  return out;
}

std::string format_operand(const Operand& op) {
  if (const auto* p = std::get_if<PropAccess>(&op)) return p->var + "." + p->key;
  return format_literal(std::get<Literal>(op));
}

const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

bool is_atom(const Expr& e) {
  return !std::holds_alternative<And>(e.node) && !std::holds_alternative<Or>(e.node);
}

std::string format_node(const NodePattern& n) {
  std::string out = "(";
  if (n.var) out += *n.var;
  if (n.label) out += ":" + *n.label;
  if (!n.props.empty()) {
    if (n.var || n.label) out += ' ';
    out += '{';
    for (std::size_t i = 0; i < n.props.size(); ++i) {
      if (i) out += ", ";
      out += n.props[i].first + ": " + format_literal(n.props[i].second);
    }
    out += '}';
  }
  return out + ")";
}

std::string format_edge(const EdgePattern& e) {
  std::string body;
  if (e.var || e.label) {
    body = "[";
    if (e.var) body += *e.var;
    if (e.label) body += ":" + *e.label;
    body += "]";
  }
  switch (e.direction) {
    case EdgeDirection::Left: return "<-" + body + "-";
    case EdgeDirection::Right: return "-" + body + "->";
    case EdgeDirection::Undirected: return "-" + body + "-";
  }
  return "--";
}

}  // namespace

std::string format_literal(const Literal& literal) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
          std::string s(buf, p);
          if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
          return s;
        } else {
          return quote(v);
        }
      },
      literal);
}

std::string format_expr(const Expr& expr) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          return format_operand(n.lhs) + " " + op_text(n.op) + " " + format_operand(n.rhs);
        } else if constexpr (std::is_same_v<T, InList>) {
          std::string out = format_operand(n.lhs) + " in [";
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) out += ", ";
            out += format_literal(n.items[i]);
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, Contains>) {
          return format_operand(n.lhs) + " contains " + quote(n.needle);
        } else if constexpr (std::is_same_v<T, Not>) {
          const Expr& inner = *n.inner;
          return is_atom(inner) ? "not " + format_expr(inner) : "not (" + format_expr(inner) + ")";
        } else {
          constexpr bool is_and = std::is_same_v<T, And>;
          std::string out;
          for (std::size_t i = 0; i < n.terms.size(); ++i) {
            if (i) out += is_and ? " and " : " or ";
            const Expr& t = n.terms[i];
            // Nested chains only arise from explicit parentheses.
            bool wrap = is_and ? !is_atom(t) : std::holds_alternative<Or>(t.node);
            out += wrap ? "(" + format_expr(t) + ")" : format_expr(t);
          }
          return out;
        }
      },
      expr.node);
}

std::string format_pattern(const PathPattern& pattern) {
  std::string out;
  if (pattern.path_var) out += *pattern.path_var + " = ";
  for (std::size_t i = 0; i < pattern.nodes.size(); ++i) {
    out += format_node(pattern.nodes[i]);
    if (i < pattern.edges.size()) out += format_edge(pattern.edges[i]);
  }
  return out;
}

std::string ReturnItem::column() const {
  switch (kind) {
    case Kind::Property: return var + "." + key;
    case Kind::Count: return "count(" + var + ")";
    default: return var;
  }
}

std::string format_ast(const QueryAst& ast) {
  std::string out = "match ";
  for (std::size_t i = 0; i < ast.patterns.size(); ++i) {
    if (i) out += ", ";
    out += format_pattern(ast.patterns[i]);
  }
  if (ast.where) out += " where " + format_expr(*ast.where);
  out += " return ";
  for (std::size_t i = 0; i < ast.returns.size(); ++i) {
    if (i) out += ", ";
    out += ast.returns[i].column();
  }
  return out;
}

}  // namespace bimgraph::query
