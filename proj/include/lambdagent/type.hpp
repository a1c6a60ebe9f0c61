#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lambdagent/predicate.hpp"

namespace lambdagent {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

/// Types over the string base: Str, arrows, products, labeled variants and
/// refinements {x:base | P(x)}. Variant labels are kept in declaration
/// order and must be pairwise distinct.
struct Type {
  struct Str {};
  struct Arrow {
    TypePtr dom;
    TypePtr cod;
  };
  struct Product {
    TypePtr left;
    TypePtr right;
  };
  struct Variant {
    std::vector<std::pair<std::string, TypePtr>> labels;
  };
  struct Refinement {
    TypePtr base;
    PredicatePtr predicate;
  };

  using Node = std::variant<Str, Arrow, Product, Variant, Refinement>;
  Node node;
};

namespace ty {

inline TypePtr str() {
  static const TypePtr s = std::make_shared<Type>(Type{Type::Str{}});
  return s;
}
inline TypePtr arrow(TypePtr dom, TypePtr cod) {
  return std::make_shared<Type>(Type{Type::Arrow{std::move(dom), std::move(cod)}});
}
inline TypePtr product(TypePtr left, TypePtr right) {
  return std::make_shared<Type>(
      Type{Type::Product{std::move(left), std::move(right)}});
}
inline TypePtr variant(std::vector<std::pair<std::string, TypePtr>> labels) {
  return std::make_shared<Type>(Type{Type::Variant{std::move(labels)}});
}
inline TypePtr refinement(TypePtr base, PredicatePtr predicate) {
  return std::make_shared<Type>(
      Type{Type::Refinement{std::move(base), std::move(predicate)}});
}

}  // namespace ty

inline bool typeEqual(const TypePtr& a, const TypePtr& b);

inline bool operator==(const Type& a, const Type& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Type::Str>) {
          return true;
        } else if constexpr (std::is_same_v<T, Type::Arrow>) {
          return typeEqual(lhs.dom, rhs.dom) && typeEqual(lhs.cod, rhs.cod);
        } else if constexpr (std::is_same_v<T, Type::Product>) {
          return typeEqual(lhs.left, rhs.left) && typeEqual(lhs.right, rhs.right);
        } else if constexpr (std::is_same_v<T, Type::Variant>) {
          if (lhs.labels.size() != rhs.labels.size()) return false;
          for (size_t i = 0; i < lhs.labels.size(); ++i) {
            if (lhs.labels[i].first != rhs.labels[i].first) return false;
            if (!typeEqual(lhs.labels[i].second, rhs.labels[i].second)) return false;
          }
          return true;
        } else {
          return typeEqual(lhs.base, rhs.base) &&
                 predicateEqual(lhs.predicate, rhs.predicate);
        }
      },
      a.node);
}

inline bool typeEqual(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

/// Strips refinement wrappers, leaving the underlying structural type.
/// Refinements are checked dynamically at guard boundaries; for premise
/// compatibility two types agree when their erasures agree.
inline TypePtr eraseRefinements(const TypePtr& t) {
  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Type::Str>) {
          return t;
        } else if constexpr (std::is_same_v<T, Type::Arrow>) {
          return ty::arrow(eraseRefinements(n.dom), eraseRefinements(n.cod));
        } else if constexpr (std::is_same_v<T, Type::Product>) {
          return ty::product(eraseRefinements(n.left), eraseRefinements(n.right));
        } else if constexpr (std::is_same_v<T, Type::Variant>) {
          std::vector<std::pair<std::string, TypePtr>> labels;
          labels.reserve(n.labels.size());
          for (const auto& [l, lt] : n.labels) labels.emplace_back(l, eraseRefinements(lt));
          return ty::variant(std::move(labels));
        } else {
          return eraseRefinements(n.base);
        }
      },
      t->node);
}

inline bool typeCompatible(const TypePtr& expected, const TypePtr& found) {
  if (typeEqual(expected, found)) return true;
  return typeEqual(eraseRefinements(expected), eraseRefinements(found));
}

inline std::string printType(const TypePtr& t) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Type::Str>) {
          return "Str";
        } else if constexpr (std::is_same_v<T, Type::Arrow>) {
          return "(" + printType(n.dom) + " -> " + printType(n.cod) + ")";
        } else if constexpr (std::is_same_v<T, Type::Product>) {
          return "(" + printType(n.left) + " * " + printType(n.right) + ")";
        } else if constexpr (std::is_same_v<T, Type::Variant>) {
          std::string out = "<";
          bool first = true;
          for (const auto& [label, lt] : n.labels) {
            if (!first) out += ", ";
            first = false;
            out += label + ": " + printType(lt);
          }
          return out + ">";
        } else {
          return "{x: " + printType(n.base) + " | " + printPredicate(n.predicate) + "}";
        }
      },
      t->node);
}

}  // namespace lambdagent
