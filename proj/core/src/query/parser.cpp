#include "bimgraph/query/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace bimgraph::query {

ParseError::ParseError(std::size_t position, std::string expected, std::string found)
    : QueryError("at position " + std::to_string(position) + ": expected " + expected + ", found " + found),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

UnboundVariable::UnboundVariable(std::string name)
    : QueryError("variable '" + name + "' is not bound by any pattern"), name_(std::move(name)) {}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::Ident: return "'" + t.text + "'";
    case TokenKind::Integer:
    case TokenKind::Real: return "number " + t.text;
    case TokenKind::String: return "string literal";
    case TokenKind::End: return "end of input";
    default: return "'" + t.text + "'";
  }
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto punct = [&](TokenKind kind, std::size_t len) {
    out.push_back({kind, std::string(text.substr(i, len)), i});
    i += len;
  };
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t start = i;
      while (i < n && is_ident_char(text[i])) ++i;
      out.push_back({TokenKind::Ident, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (is_digit(c)) {
      std::size_t start = i;
      bool real = false;
      while (i < n && is_digit(text[i])) ++i;
      if (i + 1 < n && text[i] == '.' && is_digit(text[i + 1])) {
        real = true;
        ++i;
        while (i < n && is_digit(text[i])) ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < n && is_digit(text[j])) {
          real = true;
          i = j;
          while (i < n && is_digit(text[i])) ++i;
        }
      }
      out.push_back({real ? TokenKind::Real : TokenKind::Integer, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (c == '\'') {
      std::size_t start = i++;
      std::string body;
      bool closed = false;
      while (i < n) {
        char d = text[i++];
        if (d == '\'') {
          closed = true;
          break;
        }
        if (d == '\\' && i < n) {
          char e = text[i++];
          switch (e) {
            case 'n': body += '\n'; break;
            case 't': body += '\t'; break;
            case 'r': body += '\r'; break;
            default: body += e; break;
          }
          continue;
        }
        body += d;
      }
      if (!closed) throw ParseError(start, "closing quote", "end of input");
      out.push_back({TokenKind::String, std::move(body), start});
      continue;
    }
    char next = i + 1 < n ? text[i + 1] : '\0';
    switch (c) {
      case '(': punct(TokenKind::LParen, 1); break;
      case ')': punct(TokenKind::RParen, 1); break;
      case '[': punct(TokenKind::LBracket, 1); break;
      case ']': punct(TokenKind::RBracket, 1); break;
      case '{': punct(TokenKind::LBrace, 1); break;
      case '}': punct(TokenKind::RBrace, 1); break;
      case ':': punct(TokenKind::Colon, 1); break;
      case ',': punct(TokenKind::Comma, 1); break;
      case '.': punct(TokenKind::Dot, 1); break;
      case '-': punct(TokenKind::Dash, 1); break;
      case '=': punct(TokenKind::Eq, 1); break;
      case '!':
        if (next != '=') throw ParseError(i, "'!='", "'!'");
        punct(TokenKind::Ne, 2);
        break;
      case '<':
        if (next == '>') punct(TokenKind::Ne, 2);
        else if (next == '=') punct(TokenKind::Le, 2);
        else punct(TokenKind::Lt, 1);
        break;
      case '>':
        if (next == '=') punct(TokenKind::Ge, 2);
        else punct(TokenKind::Gt, 1);
        break;
      default:
        throw ParseError(i, "token", "'" + std::string(1, c) + "'");
    }
  }
  out.push_back({TokenKind::End, "", n});
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  QueryAst parse() {
    QueryAst ast;
    expect_keyword("match");
    ast.patterns.push_back(match_item());
    while (accept(TokenKind::Comma)) ast.patterns.push_back(match_item());
    if (accept_keyword("where")) ast.where = or_expr();
    expect_keyword("return");
    ast.returns.push_back(return_item());
    while (accept(TokenKind::Comma)) ast.returns.push_back(return_item());
    if (peek().kind != TokenKind::End) fail("end of query");
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool accept(TokenKind kind) {
    if (peek().kind != kind) return false;
    advance();
    return true;
  }
  bool is_keyword(const Token& t, std::string_view word) const {
    return t.kind == TokenKind::Ident && iequals(t.text, word);
  }
  bool accept_keyword(std::string_view word) {
    if (!is_keyword(peek(), word)) return false;
    advance();
    return true;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(peek().position, expected, describe(peek()));
  }
  const Token& expect(TokenKind kind, const char* what) {
    if (peek().kind != kind) fail(what);
    return advance();
  }
  void expect_keyword(std::string_view word) {
    if (!accept_keyword(word)) fail("'" + std::string(word) + "'");
  }
  std::string identifier(const char* what) { return expect(TokenKind::Ident, what).text; }

  bool is_reserved(const Token& t) const {
    static constexpr std::string_view kReserved[] = {"match", "where", "return", "and", "or",
                                                     "not",   "in",    "contains", "true", "false"};
    for (auto w : kReserved)
      if (is_keyword(t, w)) return true;
    return false;
  }
  bool at_variable() const { return peek().kind == TokenKind::Ident && !is_reserved(peek()); }
  std::string variable(const char* what) {
    if (!at_variable()) fail(what);
    return advance().text;
  }

  PathPattern match_item() {
    PathPattern path;
    if (at_variable() && peek(1).kind == TokenKind::Eq) {
      path.path_var = advance().text;
      advance();
    }
    path.nodes.push_back(node());
    while (peek().kind == TokenKind::Dash || (peek().kind == TokenKind::Lt && peek(1).kind == TokenKind::Dash)) {
      path.edges.push_back(edge());
      path.nodes.push_back(node());
    }
    return path;
  }

  NodePattern node() {
    NodePattern n;
    expect(TokenKind::LParen, "'('");
    if (peek().kind == TokenKind::Ident) n.var = variable("variable");
    // A colon without a label is tolerated: `(n: {Name: 'x'})`.
    if (accept(TokenKind::Colon) && peek().kind == TokenKind::Ident) n.label = advance().text;
    if (accept(TokenKind::LBrace)) {
      do {
        std::string key = identifier("property key");
        expect(TokenKind::Colon, "':'");
        n.props.emplace_back(std::move(key), literal());
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RBrace, "'}'");
    }
    expect(TokenKind::RParen, "')'");
    return n;
  }

  EdgePattern edge() {
    EdgePattern e;
    bool left = accept(TokenKind::Lt);
    expect(TokenKind::Dash, "'-'");
    if (accept(TokenKind::LBracket)) {
      if (peek().kind == TokenKind::Ident) e.var = variable("variable");
      if (accept(TokenKind::Colon)) e.label = identifier("edge label");
      expect(TokenKind::RBracket, "']'");
      expect(TokenKind::Dash, "'-'");
    }
    // Extra dashes and a lone `-` between nodes are tolerated.
    while (accept(TokenKind::Dash)) {
    }
    bool right = accept(TokenKind::Gt);
    if (left && !right) e.direction = EdgeDirection::Left;
    else if (right && !left) e.direction = EdgeDirection::Right;
    else e.direction = EdgeDirection::Undirected;
    return e;
  }

  Literal literal() {
    std::size_t at = peek().position;
    bool negative = false;
    if (accept(TokenKind::Dash)) negative = true;
    const Token& t = peek();
    if (t.kind == TokenKind::Integer) {
      std::string digits = (negative ? "-" : "") + advance().text;
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc() || p != digits.data() + digits.size()) throw ParseError(at, "64-bit integer", digits);
      return v;
    }
    if (t.kind == TokenKind::Real) {
      std::string digits = (negative ? "-" : "") + advance().text;
      double v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc() || p != digits.data() + digits.size()) throw ParseError(at, "finite real", digits);
      return v;
    }
    if (negative) fail("number");
    if (t.kind == TokenKind::String) return advance().text;
    if (is_keyword(t, "true")) {
      advance();
      return true;
    }
    if (is_keyword(t, "false")) {
      advance();
      return false;
    }
    fail("literal");
  }

  Expr or_expr() {
    Or o;
    o.terms.push_back(and_expr());
    while (accept_keyword("or")) o.terms.push_back(and_expr());
    if (o.terms.size() == 1) return std::move(o.terms.front());
    return Expr{std::move(o)};
  }

  Expr and_expr() {
    And a;
    a.terms.push_back(unary());
    while (accept_keyword("and")) a.terms.push_back(unary());
    if (a.terms.size() == 1) return std::move(a.terms.front());
    return Expr{std::move(a)};
  }

  Expr unary() {
    if (accept_keyword("not")) return Expr{Not{unary()}};
    if (accept(TokenKind::LParen)) {
      Expr inner = or_expr();
      expect(TokenKind::RParen, "')'");
      return inner;
    }
    return comparison();
  }

  Operand operand() {
    if (at_variable()) {
      std::string var = advance().text;
      expect(TokenKind::Dot, "'.'");
      return PropAccess{std::move(var), identifier("property key")};
    }
    return literal();
  }

  Expr comparison() {
    Operand lhs = operand();
    if (accept_keyword("in")) {
      InList in{std::move(lhs), {}};
      expect(TokenKind::LBracket, "'['");
      do {
        in.items.push_back(literal());
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RBracket, "']'");
      return Expr{std::move(in)};
    }
    if (accept_keyword("contains")) {
      return Expr{Contains{std::move(lhs), expect(TokenKind::String, "string literal").text}};
    }
    CompareOp op;
    switch (peek().kind) {
      case TokenKind::Eq: op = CompareOp::Eq; break;
      case TokenKind::Ne: op = CompareOp::Ne; break;
      case TokenKind::Lt: op = CompareOp::Lt; break;
      case TokenKind::Le: op = CompareOp::Le; break;
      case TokenKind::Gt: op = CompareOp::Gt; break;
      case TokenKind::Ge: op = CompareOp::Ge; break;
      default: fail("comparison operator");
    }
    advance();
    return Expr{Comparison{op, std::move(lhs), operand()}};
  }

  ReturnItem return_item() {
    ReturnItem item;
    if (is_keyword(peek(), "count") && peek(1).kind == TokenKind::LParen) {
      advance();
      advance();
      item.kind = ReturnItem::Kind::Count;
      item.var = variable("variable");
      expect(TokenKind::RParen, "')'");
      return item;
    }
    item.var = variable("return item");
    if (accept(TokenKind::Dot)) {
      item.kind = ReturnItem::Kind::Property;
      item.key = identifier("property key");
    }
    return item;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

enum class VarKind { Node, Edge, Path };

void check_operand(const Operand& op, const std::map<std::string, VarKind>& vars) {
  const auto* access = std::get_if<PropAccess>(&op);
  if (!access) return;
  auto it = vars.find(access->var);
  if (it == vars.end()) throw UnboundVariable(access->var);
  if (it->second == VarKind::Path) throw QueryError("path variable '" + access->var + "' has no properties");
}

void check_expr(const Expr& e, const std::map<std::string, VarKind>& vars) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          check_operand(n.lhs, vars);
          check_operand(n.rhs, vars);
        } else if constexpr (std::is_same_v<T, InList> || std::is_same_v<T, Contains>) {
          check_operand(n.lhs, vars);
        } else if constexpr (std::is_same_v<T, Not>) {
          check_expr(*n.inner, vars);
        } else {
          for (const auto& t : n.terms) check_expr(t, vars);
        }
      },
      e.node);
}

void resolve(QueryAst& ast) {
  std::map<std::string, VarKind> vars;
  auto bind = [&](const std::string& name, VarKind kind) {
    auto [it, fresh] = vars.emplace(name, kind);
    if (fresh) return;
    if (it->second != kind) throw QueryError("variable '" + name + "' is bound to different kinds of element");
    if (kind != VarKind::Node) throw QueryError("variable '" + name + "' is bound more than once");
  };
  for (const auto& path : ast.patterns) {
    if (path.path_var) bind(*path.path_var, VarKind::Path);
    for (const auto& n : path.nodes)
      if (n.var) bind(*n.var, VarKind::Node);
    for (const auto& e : path.edges)
      if (e.var) bind(*e.var, VarKind::Edge);
  }
  if (ast.where) check_expr(*ast.where, vars);
  for (auto& item : ast.returns) {
    auto it = vars.find(item.var);
    if (it == vars.end()) throw UnboundVariable(item.var);
    if (item.kind == ReturnItem::Kind::Property && it->second == VarKind::Path)
      throw QueryError("path variable '" + item.var + "' has no properties");
    if (item.kind == ReturnItem::Kind::Var && it->second == VarKind::Path) item.kind = ReturnItem::Kind::Path;
  }
}

}  // namespace

QueryAst parse_query(std::string_view text) {
  QueryAst ast = Parser(tokenize(text)).parse();
  resolve(ast);
  return ast;
}

std::vector<std::string> bound_variables(const QueryAst& ast) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::optional<std::string>& v) {
    if (v && seen.insert(*v).second) out.push_back(*v);
  };
  for (const auto& path : ast.patterns) {
    add(path.path_var);
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
      add(path.nodes[i].var);
      if (i < path.edges.size()) add(path.edges[i].var);
    }
  }
  return out;
}

}  // namespace bimgraph::query
