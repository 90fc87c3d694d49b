#include "bimgraph/step/writer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "bimgraph/step/parser.hpp"

namespace bimgraph::step {

namespace {

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void write_value(std::string& out, const Value& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Unset>) {
          out += '$';
        } else if constexpr (std::is_same_v<T, Derived>) {
          out += '*';
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out += std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          out += format_real(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          out += '\'';
          out += encode_string(x);
          out += '\'';
        } else if constexpr (std::is_same_v<T, Enumeration>) {
          out += '.';
          out += x.name;
          out += '.';
        } else if constexpr (std::is_same_v<T, Logical>) {
          out += x == Logical::True ? ".T." : x == Logical::False ? ".F." : ".U.";
        } else if constexpr (std::is_same_v<T, EntityRef>) {
          out += '#';
          out += std::to_string(x.target.value);
        } else if constexpr (std::is_same_v<T, Binary>) {
          out += '"';
          out += x.digits;
          out += '"';
        } else if constexpr (std::is_same_v<T, Typed>) {
          out += x.type;
          out += '(';
          write_value(out, *x.inner);
          out += ')';
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          out += '(';
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) out += ',';
            write_value(out, x[i]);
          }
          out += ')';
        }
      },
      v.data);
}

}  // namespace

std::string format_real(double value) {
  if (!std::isfinite(value)) return "0.";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, end);
  std::string mantissa = s;
  std::string exponent;
  if (auto e = s.find('e'); e != std::string::npos) {
    mantissa = s.substr(0, e);
    exponent = "E" + s.substr(e + 1);
  }
  if (mantissa.find('.') == std::string::npos) mantissa += '.';
  return mantissa + exponent;
}

std::string format_value(const Value& value) {
  std::string out;
  write_value(out, value);
  return out;
}

void serialize_file(const StepFile& file, std::ostream& out) {
  auto registry = schema::builtin_schema(effective_version(file));
  out << "ISO-10303-21;\nHEADER;\n";
  if (file.header.records.empty()) {
    out << "FILE_DESCRIPTION((''),'2;1');\n";
    out << "FILE_NAME('','',(''),(''),'','','');\n";
    out << "FILE_SCHEMA(('" << (file.schema_version.name.empty() ? "IFC4" : file.schema_version.name) << "'));\n";
  }
  for (const auto& record : file.header.records) out << record << ";\n";
  out << "ENDSEC;\nDATA;\n";
  std::string line;
  for (const auto& [id, inst] : file.instances) {
    line.clear();
    line += '#';
    line += std::to_string(id.value);
    line += '=';
    // Unknown entities keep their spelling so that re-parsing reproduces it.
    line += registry->contains(inst.entity) ? to_upper(inst.entity) : inst.entity;
    line += '(';
    for (std::size_t i = 0; i < inst.args.size(); ++i) {
      if (i) line += ',';
      write_value(line, inst.args[i]);
    }
    line += ");\n";
    out << line;
  }
  out << "ENDSEC;\nEND-ISO-10303-21;\n";
}

std::string serialize_file(const StepFile& file) {
  std::ostringstream ss;
  serialize_file(file, ss);
  return ss.str();
}

}  // namespace bimgraph::step
