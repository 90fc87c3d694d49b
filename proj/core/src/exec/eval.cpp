#include "bimgraph/exec/eval.hpp"

namespace bimgraph::exec {

Tri tri_not(Tri t) {
  if (t == Tri::Unknown) return t;
  return t == Tri::True ? Tri::False : Tri::True;
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::True;
}

Tri tri_or(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::False;
}

graph::PropValue to_prop(const query::Literal& literal) {
  return std::visit([](const auto& v) { return graph::PropValue{v}; }, literal);
}

namespace {

Tri from_bool(bool b) { return b ? Tri::True : Tri::False; }

template <class T>
Tri order(const T& a, query::CompareOp op, const T& b) {
  switch (op) {
    case query::CompareOp::Eq: return from_bool(a == b);
    case query::CompareOp::Ne: return from_bool(!(a == b));
    case query::CompareOp::Lt: return from_bool(a < b);
    case query::CompareOp::Le: return from_bool(a <= b);
    case query::CompareOp::Gt: return from_bool(a > b);
    case query::CompareOp::Ge: return from_bool(a >= b);
  }
  return Tri::Unknown;
}

bool is_number(const graph::PropValue& v) {
  return v.get_if<std::int64_t>() || v.get_if<double>();
}

double as_double(const graph::PropValue& v) {
  if (const auto* i = v.get_if<std::int64_t>()) return static_cast<double>(*i);
  return *v.get_if<double>();
}

bool equal(const graph::PropValue& a, const graph::PropValue& b) {
  return compare(a, query::CompareOp::Eq, b) == Tri::True;
}

}  // namespace

Tri compare(const graph::PropValue& lhs, query::CompareOp op, const graph::PropValue& rhs) {
  using List = graph::PropValue::List;
  if (const auto* a = lhs.get_if<std::int64_t>()) {
    if (const auto* b = rhs.get_if<std::int64_t>()) return order(*a, op, *b);
  }
  if (is_number(lhs) && is_number(rhs)) return order(as_double(lhs), op, as_double(rhs));
  if (const auto* a = lhs.get_if<std::string>()) {
    if (const auto* b = rhs.get_if<std::string>()) return order(*a, op, *b);
    return Tri::Unknown;
  }
  if (const auto* a = lhs.get_if<bool>()) {
    if (const auto* b = rhs.get_if<bool>()) return order(*a, op, *b);
    return Tri::Unknown;
  }
  const auto* a = lhs.get_if<List>();
  const auto* b = rhs.get_if<List>();
  if (a && b && (op == query::CompareOp::Eq || op == query::CompareOp::Ne)) {
    bool same = a->size() == b->size();
    for (std::size_t i = 0; same && i < a->size(); ++i) same = equal((*a)[i], (*b)[i]);
    return from_bool(op == query::CompareOp::Eq ? same : !same);
  }
  return Tri::Unknown;
}

Tri evaluate(const query::Expr& expr, const PropertyLookup& lookup) {
  auto operand = [&](const query::Operand& op) -> std::optional<graph::PropValue> {
    if (const auto* p = std::get_if<query::PropAccess>(&op)) return lookup(p->var, p->key);
    return to_prop(std::get<query::Literal>(op));
  };
  return std::visit(
      [&](const auto& n) -> Tri {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, query::Comparison>) {
          auto l = operand(n.lhs);
          auto r = operand(n.rhs);
          if (!l || !r) return Tri::Unknown;
          return compare(*l, n.op, *r);
        } else if constexpr (std::is_same_v<T, query::InList>) {
          auto l = operand(n.lhs);
          if (!l) return Tri::Unknown;
          for (const auto& item : n.items)
            if (compare(*l, query::CompareOp::Eq, to_prop(item)) == Tri::True) return Tri::True;
          return Tri::False;
        } else if constexpr (std::is_same_v<T, query::Contains>) {
          auto l = operand(n.lhs);
          const auto* s = l ? l->template get_if<std::string>() : nullptr;
          if (!s) return Tri::Unknown;
          return from_bool(s->find(n.needle) != std::string::npos);
        } else if constexpr (std::is_same_v<T, query::Not>) {
          return tri_not(evaluate(*n.inner, lookup));
        } else if constexpr (std::is_same_v<T, query::And>) {
          Tri acc = Tri::True;
          for (const auto& t : n.terms) {
            acc = tri_and(acc, evaluate(t, lookup));
            if (acc == Tri::False) break;
          }
          return acc;
        } else {
          Tri acc = Tri::False;
          for (const auto& t : n.terms) {
            acc = tri_or(acc, evaluate(t, lookup));
            if (acc == Tri::True) break;
          }
          return acc;
        }
      },
      expr.node);
}

}  // namespace bimgraph::exec
