#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bimgraph/common.hpp"
#include "bimgraph/query/ast.hpp"

namespace bimgraph::query {

class QueryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public QueryError {
 public:
  ParseError(std::size_t position, std::string expected, std::string found);

  /// Byte offset into the query text.
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

class UnboundVariable : public QueryError {
 public:
  explicit UnboundVariable(std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

enum class TokenKind {
  Ident,
  Integer,
  Real,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Colon,
  Comma,
  Dot,
  Dash,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  End,
};

struct Token {
  TokenKind kind;
  /// Identifier name, decoded string body, or numeric spelling.
  std::string text;
  std::size_t position;
};

/// Splits query text into tokens. `//` comments run to end of line.
std::vector<Token> tokenize(std::string_view text);

/// Parses a query. Keywords are case-insensitive, identifiers are not.
QueryAst parse_query(std::string_view text);

}  // namespace bimgraph::query
