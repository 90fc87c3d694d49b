#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "bimgraph/common.hpp"
#include "bimgraph/schema/registry.hpp"
#include "bimgraph/step/file.hpp"

namespace bimgraph::step {

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(InstanceId id);
  InstanceId id() const { return id_; }

 private:
  InstanceId id_;
};

class MissingDataSection : public Error {
 public:
  MissingDataSection();
};

/// Aggregate/typed nesting deeper than this is rejected.
inline constexpr std::size_t kMaxNestingDepth = 32;

struct ParseOptions {
  /// Used to canonicalize entity names. When null, the compiled-in schema matching the
  /// header's FILE_SCHEMA is used (IFC4 for unknown schemas).
  std::shared_ptr<const schema::SchemaRegistry> registry;
};

/// Parses an ISO 10303-21 exchange structure. Deterministic; the result owns all its data.
StepFile parse_file(std::string_view text, const ParseOptions& options = {});
StepFile parse_file(std::istream& in, const ParseOptions& options = {});
StepFile read_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Decodes the body of a STEP string literal (quotes already stripped): `''`, `\\`,
/// `\S\`, `\X\hh`, `\X2\...\X0\`, `\X4\...\X0\`. Output is UTF-8.
std::string decode_string(std::string_view body, std::size_t line = 0);
/// Inverse of decode_string, without the surrounding quotes. Non-ASCII goes out as \X2\ / \X4\.
std::string encode_string(std::string_view utf8);

}  // namespace bimgraph::step
