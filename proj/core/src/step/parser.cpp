#include "bimgraph/step/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace bimgraph::step {

SyntaxError::SyntaxError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

DuplicateId::DuplicateId(InstanceId id) : Error("duplicate instance id #" + std::to_string(id.value)), id_(id) {}

MissingDataSection::MissingDataSection() : Error("no DATA section") {}

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::uint32_t parse_hex(std::string_view s, std::size_t line) {
  std::uint32_t v = 0;
  for (char c : s) {
    int d = hex_digit(c);
    if (d < 0) throw SyntaxError(line, "bad hex digit in string escape");
    v = v * 16 + static_cast<std::uint32_t>(d);
  }
  return v;
}

// Decodes one UTF-8 sequence at s[i]; invalid bytes come back as themselves (Latin-1).
std::uint32_t next_code_point(std::string_view s, std::size_t& i) {
  auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    std::uint32_t cp = ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    std::uint32_t cp = ((b0 & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
                       (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    std::uint32_t cp = ((b0 & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
                       ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
                       (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
    i += 4;
    return cp;
  }
  ++i;
  return b0;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options) : s_(text), options_(options) {}

  StepFile run() {
    StepFile file;
    skip_ws();
    expect_keyword("ISO-10303-21");
    expect(';');
    skip_ws();
    expect_keyword("HEADER");
    expect(';');
    parse_header(file);
    resolve_registry(file);

    bool saw_data = false;
    while (true) {
      skip_ws();
      if (at_end()) throw SyntaxError(line_, "missing END-ISO-10303-21");
      std::string_view kw = keyword();
      if (kw == "DATA") {
        skip_ws();
        if (peek() == '(') {
          // Named data section (edition 3); its parameters are not interpreted.
          ++i_;
          skip_ws();
          if (peek() != ')') parse_list_items(0);
          expect(')');
        }
        expect(';');
        parse_data(file);
        saw_data = true;
      } else if (kw == "END-ISO-10303-21") {
        expect(';');
        break;
      } else if (kw.empty()) {
        throw SyntaxError(line_, std::string("unexpected character '") + peek() + "'");
      } else {
        throw SyntaxError(line_, "unexpected section " + std::string(kw));
      }
    }
    if (!saw_data) throw MissingDataSection();
    return file;
  }

 private:
  bool at_end() const { return i_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[i_]; }

  void skip_ws() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++i_;
      } else if (c == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '*') {
        std::size_t start_line = line_;
        i_ += 2;
        while (true) {
          if (i_ + 1 >= s_.size()) throw SyntaxError(start_line, "unterminated comment");
          if (s_[i_] == '*' && s_[i_ + 1] == '/') {
            i_ += 2;
            break;
          }
          if (s_[i_] == '\n') ++line_;
          ++i_;
        }
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      std::string found = at_end() ? "end of input" : std::string("'") + peek() + "'";
      throw SyntaxError(line_, std::string("expected '") + c + "', found " + found);
    }
    ++i_;
  }

  static bool keyword_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '!';
  }

  std::string_view keyword() {
    skip_ws();
    std::size_t start = i_;
    if (start < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[start])) || s_[start] == '!' || s_[start] == '_')) {
      while (i_ < s_.size() && keyword_char(s_[i_])) ++i_;
    }
    return s_.substr(start, i_ - start);
  }

  void expect_keyword(std::string_view kw) {
    std::size_t line = line_;
    std::string_view got = keyword();
    if (got != kw) throw SyntaxError(line, "expected " + std::string(kw) + ", found '" + std::string(got) + "'");
  }

  void parse_header(StepFile& file) {
    while (true) {
      skip_ws();
      std::size_t start = i_;
      std::string_view kw = keyword();
      if (kw.empty()) throw SyntaxError(line_, "expected header record");
      if (kw == "ENDSEC") {
        expect(';');
        return;
      }
      expect('(');
      std::vector<Value> args;
      skip_ws();
      if (peek() != ')') args = parse_list_items(0);
      expect(')');
      std::string_view raw = s_.substr(start, i_ - start);
      expect(';');
      file.header.records.emplace_back(raw);

      if (kw == "FILE_DESCRIPTION") {
        if (!args.empty()) collect_strings(args[0], file.header.description);
        if (args.size() > 1)
          if (const auto* lvl = args[1].get_if<std::string>()) file.header.implementation_level = *lvl;
      } else if (kw == "FILE_SCHEMA") {
        if (!args.empty()) collect_strings(args[0], file.header.schema_identifiers);
      }
    }
  }

  static void collect_strings(const Value& v, std::vector<std::string>& out) {
    if (const auto* s = v.get_if<std::string>()) {
      out.push_back(*s);
    } else if (const auto* agg = v.get_if<Aggregate>()) {
      for (const auto& item : *agg) collect_strings(item, out);
    }
  }

  void resolve_registry(StepFile& file) {
    if (!file.header.schema_identifiers.empty()) {
      file.schema_version.name = file.header.schema_identifiers.front();
      file.schema_version.known = schema::parse_version(file.schema_version.name);
    }
    registry_ = options_.registry ? options_.registry : schema::builtin_schema(effective_version(file));
  }

  void parse_data(StepFile& file) {
    while (true) {
      skip_ws();
      if (peek() == '#') {
        parse_instance(file);
        continue;
      }
      std::string_view kw = keyword();
      if (kw == "ENDSEC") {
        expect(';');
        return;
      }
      if (at_end()) throw SyntaxError(line_, "unterminated DATA section");
      throw SyntaxError(line_, kw.empty() ? std::string("unexpected character '") + peek() + "'"
                                          : "unexpected keyword " + std::string(kw) + " in DATA section");
    }
  }

  InstanceId instance_name() {
    // at '#'
    ++i_;
    std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) throw SyntaxError(line_, "expected digits after '#'");
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + i_, v);
    if (ec != std::errc{} || v == 0) throw SyntaxError(line_, "invalid instance id");
    return InstanceId{v};
  }

  void parse_instance(StepFile& file) {
    StepInstance inst;
    inst.line = line_;
    inst.id = instance_name();
    expect('=');
    skip_ws();
    if (peek() == '(') throw SyntaxError(line_, "complex entity instances are not supported");
    std::string_view name = keyword();
    if (name.empty()) throw SyntaxError(line_, "expected entity name");
    if (auto canonical = registry_->canonical_name(name)) {
      inst.entity = std::move(*canonical);
    } else {
      inst.entity = std::string(name);
    }
    expect('(');
    skip_ws();
    if (peek() != ')') inst.args = parse_list_items(0);
    expect(')');
    expect(';');
    auto [it, inserted] = file.instances.emplace(inst.id, std::move(inst));
    if (!inserted) throw DuplicateId(it->first);
  }

  // Comma-separated values up to (not including) the closing ')'.
  std::vector<Value> parse_list_items(std::size_t depth) {
    std::vector<Value> items;
    while (true) {
      items.push_back(parse_value(depth));
      skip_ws();
      if (peek() == ',') {
        ++i_;
        continue;
      }
      return items;
    }
  }

  Value parse_value(std::size_t depth) {
    skip_ws();
    if (at_end()) throw SyntaxError(line_, "unexpected end of input");
    char c = s_[i_];
    switch (c) {
      case '$':
        ++i_;
        return Unset{};
      case '*':
        ++i_;
        return Derived{};
      case '#':
        return EntityRef{instance_name()};
      case '\'':
        return parse_string();
      case '"':
        return parse_binary();
      case '.':
        return parse_enum();
      case '(': {
        if (depth + 1 > kMaxNestingDepth) throw SyntaxError(line_, "nesting deeper than 32 levels");
        ++i_;
        skip_ws();
        Aggregate agg;
        if (peek() != ')') agg = parse_list_items(depth + 1);
        expect(')');
        return agg;
      }
      default:
        break;
    }
    if (c == '+' || c == '-' || std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '!') {
      if (depth + 1 > kMaxNestingDepth) throw SyntaxError(line_, "nesting deeper than 32 levels");
      std::string_view type = keyword();
      expect('(');
      Value inner = parse_value(depth + 1);
      expect(')');
      if (inner.is<Typed>()) throw SyntaxError(line_, "typed value wraps another typed value");
      return Typed{std::string(type), Box<Value>(std::move(inner))};
    }
    throw SyntaxError(line_, std::string("unexpected character '") + c + "'");
  }

  Value parse_string() {
    std::size_t start_line = line_;
    ++i_;  // opening quote
    std::size_t start = i_;
    while (true) {
      if (i_ >= s_.size()) throw SyntaxError(start_line, "unterminated string");
      char c = s_[i_];
      if (c == '\'') {
        if (i_ + 1 < s_.size() && s_[i_ + 1] == '\'') {
          i_ += 2;
          continue;
        }
        break;
      }
      if (c == '\n') ++line_;
      ++i_;
    }
    std::string_view body = s_.substr(start, i_ - start);
    ++i_;  // closing quote
    return decode_string(body, start_line);
  }

  Value parse_binary() {
    ++i_;
    std::size_t start = i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (hex_digit(s_[i_]) < 0) throw SyntaxError(line_, "bad binary literal");
      ++i_;
    }
    if (i_ >= s_.size()) throw SyntaxError(line_, "unterminated binary literal");
    Binary b{std::string(s_.substr(start, i_ - start))};
    ++i_;
    return b;
  }

  Value parse_enum() {
    ++i_;
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (i_ >= s_.size() || s_[i_] != '.' || start == i_) throw SyntaxError(line_, "malformed enumeration");
    std::string_view name = s_.substr(start, i_ - start);
    ++i_;
    if (name == "T") return Logical::True;
    if (name == "F") return Logical::False;
    if (name == "U") return Logical::Unknown;
    return Enumeration{std::string(name)};
  }

  Value parse_number() {
    std::size_t start = i_;
    if (s_[i_] == '+' || s_[i_] == '-') ++i_;
    std::size_t digits_start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (digits_start == i_) throw SyntaxError(line_, "malformed number");
    bool is_real = false;
    if (i_ < s_.size() && s_[i_] == '.') {
      is_real = true;
      ++i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    if (i_ < s_.size() && (s_[i_] == 'E' || s_[i_] == 'e')) {
      is_real = true;
      ++i_;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
      std::size_t exp_start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (exp_start == i_) throw SyntaxError(line_, "malformed exponent");
    }
    std::string_view tok = s_.substr(start, i_ - start);
    const char* first = tok.data();
    if (*first == '+') ++first;
    const char* last = tok.data() + tok.size();
    if (is_real) {
      double v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || p != last) throw SyntaxError(line_, "malformed real " + std::string(tok));
      return v;
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last) throw SyntaxError(line_, "integer out of range: " + std::string(tok));
    return v;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  const ParseOptions& options_;
  std::shared_ptr<const schema::SchemaRegistry> registry_;
};

}  // namespace

std::string decode_string(std::string_view body, std::size_t line) {
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    char c = body[i];
    if (c == '\'') {
      // body comes from the parser, so quotes are always doubled
      out += '\'';
      i += (i + 1 < body.size() && body[i + 1] == '\'') ? 2 : 1;
      continue;
    }
    if (c != '\\') {
      out += c;
      ++i;
      continue;
    }
    std::string_view rest = body.substr(i);
    if (rest.starts_with("\\\\")) {
      out += '\\';
      i += 2;
    } else if (rest.starts_with("\\S\\") && rest.size() >= 4) {
      append_utf8(out, static_cast<unsigned char>(rest[3]) + 128u);
      i += 4;
    } else if (rest.size() >= 4 && rest[1] == 'P' && rest[3] == '\\') {
      i += 4;  // code page switch; only ISO 8859-1 is honoured
    } else if (rest.starts_with("\\X\\") && rest.size() >= 5) {
      append_utf8(out, parse_hex(rest.substr(3, 2), line));
      i += 5;
    } else if (rest.starts_with("\\X2\\") || rest.starts_with("\\X4\\")) {
      const std::size_t width = rest[2] == '2' ? 4 : 8;
      std::size_t j = 4;
      std::uint32_t pending_high = 0;
      while (true) {
        if (rest.substr(j).starts_with("\\X0\\")) {
          j += 4;
          break;
        }
        if (j + width > rest.size()) throw SyntaxError(line, "unterminated \\X2\\ or \\X4\\ escape");
        std::uint32_t cp = parse_hex(rest.substr(j, width), line);
        j += width;
        if (width == 4 && cp >= 0xD800 && cp <= 0xDBFF) {
          pending_high = cp;
          continue;
        }
        if (width == 4 && cp >= 0xDC00 && cp <= 0xDFFF && pending_high != 0) {
          cp = 0x10000 + ((pending_high - 0xD800) << 10) + (cp - 0xDC00);
          pending_high = 0;
        }
        append_utf8(out, cp);
      }
      i += j;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

std::string encode_string(std::string_view utf8) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(utf8.size() + 8);
  std::size_t i = 0;
  while (i < utf8.size()) {
    auto c = static_cast<unsigned char>(utf8[i]);
    if (c >= 0x20 && c < 0x7F) {
      if (c == '\'') out += "''";
      else if (c == '\\') out += "\\\\";
      else out += static_cast<char>(c);
      ++i;
      continue;
    }
    if (c < 0x80) {
      out += "\\X\\";
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
      ++i;
      continue;
    }
    // Run of non-ASCII code points.
    std::vector<std::uint32_t> run;
    while (i < utf8.size() && static_cast<unsigned char>(utf8[i]) >= 0x80) run.push_back(next_code_point(utf8, i));
    bool wide = std::any_of(run.begin(), run.end(), [](std::uint32_t cp) { return cp > 0xFFFF; });
    out += wide ? "\\X4\\" : "\\X2\\";
    for (std::uint32_t cp : run) {
      for (int shift = wide ? 28 : 12; shift >= 0; shift -= 4) out += kHex[(cp >> shift) & 0xF];
    }
    out += "\\X0\\";
  }
  return out;
}

StepFile parse_file(std::string_view text, const ParseOptions& options) { return Parser(text, options).run(); }

StepFile parse_file(std::istream& in, const ParseOptions& options) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_file(std::string_view(ss.str()), options);
}

StepFile read_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_file(std::string_view(text), options);
}

}  // namespace bimgraph::step
