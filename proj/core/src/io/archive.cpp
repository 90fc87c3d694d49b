#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <unordered_map>

#include "bimgraph/io/io.hpp"

namespace bimgraph::io {

namespace {

enum Tag : std::uint8_t { kInt = 0, kReal = 1, kText = 2, kBool = 3, kList = 4 };

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(std::string_view s) { buf_.append(s); }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  /// Element counts can never exceed the bytes left.
  std::size_t count(std::size_t min_element_size) {
    std::uint64_t n = u64();
    if (n > (data_.size() - pos_) / std::max<std::size_t>(min_element_size, 1)) fail("count exceeds archive size");
    return static_cast<std::size_t>(n);
  }
  bool done() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("archive: " + what + " at byte " + std::to_string(pos_));
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("truncated");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

class StringTable {
 public:
  std::uint32_t intern(std::string_view s) {
    auto [it, inserted] = ids_.try_emplace(std::string(s), static_cast<std::uint32_t>(strings_.size()));
    if (inserted) strings_.emplace_back(s);
    return it->second;
  }
  const std::vector<std::string>& strings() const { return strings_; }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> strings_;
};

void intern_value(StringTable& t, const graph::PropValue& v) {
  if (const auto* s = v.get_if<std::string>()) t.intern(*s);
  if (const auto* l = v.get_if<graph::PropValue::List>())
    for (const auto& x : *l) intern_value(t, x);
}

void put_value(Writer& w, StringTable& t, const graph::PropValue& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          w.u8(kInt);
          w.u64(static_cast<std::uint64_t>(x));
        } else if constexpr (std::is_same_v<T, double>) {
          w.u8(kReal);
          w.u64(std::bit_cast<std::uint64_t>(x));
        } else if constexpr (std::is_same_v<T, std::string>) {
          w.u8(kText);
          w.u32(t.intern(x));
        } else if constexpr (std::is_same_v<T, bool>) {
          w.u8(kBool);
          w.u8(x ? 1 : 0);
        } else {
          w.u8(kList);
          w.u64(x.size());
          for (const auto& e : x) put_value(w, t, e);
        }
      },
      v.data);
}

const std::string& string_at(Reader& r, const std::vector<std::string>& strings) {
  auto i = r.u32();
  if (i >= strings.size()) r.fail("string index out of range");
  return strings[i];
}

graph::PropValue get_value(Reader& r, const std::vector<std::string>& strings, int depth = 0) {
  if (depth > 64) r.fail("list nesting too deep");
  switch (r.u8()) {
    case kInt: return static_cast<std::int64_t>(r.u64());
    case kReal: return std::bit_cast<double>(r.u64());
    case kText: return string_at(r, strings);
    case kBool: return r.u8() != 0;
    case kList: {
      graph::PropValue::List list(r.count(2));
      for (auto& e : list) e = get_value(r, strings, depth + 1);
      return list;
    }
    default: r.fail("unknown value tag");
  }
}

}  // namespace

void write_archive(const graph::PropertyGraph& g, std::ostream& out) {
  StringTable table;
  for (graph::NodeIndex n = 0; n < g.node_count(); ++n) {
    table.intern(g.label_of(n));
    for (const auto& [key, value] : g.stored_properties(n)) {
      table.intern(key);
      intern_value(table, value);
    }
  }
  for (graph::EdgeIndex e = 0; e < g.edge_count(); ++e) table.intern(g.edge_label(e));

  Writer w;
  w.bytes({kArchiveMagic, sizeof kArchiveMagic});
  w.u32(kArchiveVersion);
  w.u8(g.schema().version() == schema::Version::Ifc4 ? 4 : 3);

  w.u64(table.strings().size());
  for (const auto& s : table.strings()) {
    w.u32(static_cast<std::uint32_t>(s.size()));
    w.bytes(s);
  }
  w.u64(g.node_count());
  for (graph::NodeIndex n = 0; n < g.node_count(); ++n) {
    w.u64(g.id_of(n).value);
    w.u32(table.intern(g.label_of(n)));
    const auto& props = g.stored_properties(n);
    w.u64(props.size());
    for (const auto& [key, value] : props) {
      w.u32(table.intern(key));
      put_value(w, table, value);
    }
  }
  w.u64(g.edge_count());
  for (graph::EdgeIndex e = 0; e < g.edge_count(); ++e) {
    w.u64(g.id_of(g.edge_source(e)).value);
    w.u64(g.id_of(g.edge_target(e)).value);
    w.u32(table.intern(g.edge_label(e)));
    w.u32(static_cast<std::uint32_t>(g.edge_pos(e).value_or(graph::kNoPos)));
  }
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  if (!out) throw IoError("archive: write failed");
}

graph::PropertyGraph read_archive(std::istream& in, const SchemaResolver& resolve) {
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}));
  if (r.bytes(sizeof kArchiveMagic) != std::string_view(kArchiveMagic, sizeof kArchiveMagic))
    r.fail("not a graph archive");
  if (auto v = r.u32(); v != kArchiveVersion) r.fail("unsupported format version " + std::to_string(v));
  auto version_tag = r.u8();
  if (version_tag != 3 && version_tag != 4) r.fail("unknown schema version");
  auto version = version_tag == 4 ? schema::Version::Ifc4 : schema::Version::Ifc2x3;
  auto schema = resolve ? resolve(version) : schema::builtin_schema(version);

  std::vector<std::string> strings(r.count(4));
  for (auto& s : strings) s = r.bytes(r.u32());

  graph::GraphBuilder b(std::move(schema));
  auto nodes = r.count(20);
  for (std::size_t i = 0; i < nodes; ++i) {
    InstanceId id{r.u64()};
    std::string label = string_at(r, strings);
    graph::Properties props(r.count(6));
    for (auto& [key, value] : props) {
      key = string_at(r, strings);
      value = get_value(r, strings);
    }
    b.add_node(id, label, std::move(props));
  }
  auto edges = r.count(24);
  b.reserve(nodes, edges);
  for (std::size_t i = 0; i < edges; ++i) {
    InstanceId from{r.u64()};
    InstanceId to{r.u64()};
    std::string label = string_at(r, strings);
    auto pos = static_cast<std::int32_t>(r.u32());
    b.add_edge(from, to, label, pos == graph::kNoPos ? std::nullopt : std::optional<std::int32_t>(pos));
  }
  if (!r.done()) r.fail("trailing bytes");
  try {
    return std::move(b).freeze();
  } catch (const Error& e) {
    throw FormatError(std::string("archive: ") + e.what());
  }
}

}  // namespace bimgraph::io
