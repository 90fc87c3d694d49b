#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bimgraph/common.hpp"

namespace bimgraph::step {

/// `$`
struct Unset {
  friend bool operator==(Unset, Unset) = default;
};

/// `*`
struct Derived {
  friend bool operator==(Derived, Derived) = default;
};

/// `.NAME.` with the dots stripped. `.T.`, `.F.` and `.U.` parse as Logical instead.
struct Enumeration {
  std::string name;
  friend bool operator==(const Enumeration&, const Enumeration&) = default;
};

enum class Logical : std::uint8_t { False, True, Unknown };

/// `#N`
struct EntityRef {
  InstanceId target;
  friend bool operator==(EntityRef, EntityRef) = default;
};

/// `"0AF..."`, kept as the hex digit string.
struct Binary {
  std::string digits;
  friend bool operator==(const Binary&, const Binary&) = default;
};

struct Value;

/// `IFCLABEL('x')`: a defined-type wrapper around exactly one value.
struct Typed {
  std::string type;
  Box<Value> inner;
  friend bool operator==(const Typed&, const Typed&) = default;
};

using Aggregate = std::vector<Value>;

/// One STEP attribute value. Text holds the decoded string (UTF-8).
struct Value {
  using Variant =
      std::variant<Unset, Derived, std::int64_t, double, std::string, Enumeration, Logical, EntityRef, Binary, Typed,
                   Aggregate>;
  Variant data;

  Value() = default;
  template <class T>
    requires std::is_constructible_v<Variant, T&&> && (!std::is_same_v<std::remove_cvref_t<T>, Value>)
  Value(T&& v) : data(std::forward<T>(v)) {}  // NOLINT(google-explicit-constructor)

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(data);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(data);
  }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&data);
  }

  friend bool operator==(const Value&, const Value&) = default;
};

inline Value ref(std::uint64_t id) { return Value{EntityRef{InstanceId{id}}}; }
inline Value text(std::string s) { return Value{std::move(s)}; }
inline Value enumeration(std::string s) { return Value{Enumeration{std::move(s)}}; }
inline Value typed(std::string type, Value inner) { return Value{Typed{std::move(type), Box<Value>(std::move(inner))}}; }

/// Calls `fn(EntityRef)` for every reference at any nesting depth, in textual order.
template <class Fn>
void for_each_ref(const Value& v, Fn&& fn) {
  if (const auto* r = v.get_if<EntityRef>()) {
    fn(*r);
  } else if (const auto* t = v.get_if<Typed>()) {
    for_each_ref(*t->inner, fn);
  } else if (const auto* agg = v.get_if<Aggregate>()) {
    for (const Value& item : *agg) for_each_ref(item, fn);
  }
}

}  // namespace bimgraph::step
