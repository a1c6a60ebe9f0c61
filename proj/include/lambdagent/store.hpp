#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "lambdagent/value.hpp"

namespace lambdagent {

/// Append-only assignment of types to store keys. Once a key has a type it
/// never changes; re-assigning the same type is a no-op.
class StoreTyping {
 public:
  /// Returns false when the key already carries a different type.
  bool assign(const std::string& key, const TypePtr& type) {
    auto it = types_.find(key);
    if (it == types_.end()) {
      types_.emplace(key, type);
      return true;
    }
    return typeEqual(it->second, type);
  }

  std::optional<TypePtr> lookup(const std::string& key) const {
    auto it = types_.find(key);
    if (it == types_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::string, TypePtr>& entries() const { return types_; }

  /// Σ' ⊇ Σ: every key of other is present here with the same type.
  bool extends(const StoreTyping& other) const {
    for (const auto& [key, type] : other.types_) {
      auto own = lookup(key);
      if (!own || !typeEqual(*own, type)) return false;
    }
    return true;
  }

 private:
  std::map<std::string, TypePtr> types_;
};

/// Structural check that a value inhabits a type, used for store
/// compatibility. Refinement predicates are evaluated on string values.
inline bool valueHasType(const ValuePtr& v, const TypePtr& t) {
  return std::visit(
      [&](const auto& tn) -> bool {
        using T = std::decay_t<decltype(tn)>;
        if constexpr (std::is_same_v<T, Type::Str>) {
          return std::holds_alternative<Value::StrV>(v->node);
        } else if constexpr (std::is_same_v<T, Type::Arrow>) {
          if (const auto* c = std::get_if<Value::ClosureV>(&v->node))
            return typeEqual(c->paramType, tn.dom) ||
                   typeEqual(eraseRefinements(c->paramType), eraseRefinements(tn.dom));
          return std::holds_alternative<Value::ToolV>(v->node) ||
                 std::holds_alternative<Value::OracleV>(v->node);
        } else if constexpr (std::is_same_v<T, Type::Product>) {
          const auto* p = std::get_if<Value::PairV>(&v->node);
          return p && valueHasType(p->first, tn.left) && valueHasType(p->second, tn.right);
        } else if constexpr (std::is_same_v<T, Type::Variant>) {
          const auto* l = std::get_if<Value::LabelV>(&v->node);
          if (!l) return false;
          for (const auto& [label, _] : tn.labels)
            if (label == l->label) return true;
          return false;
        } else {
          if (!valueHasType(v, tn.base)) return false;
          auto text = valueText(v);
          return !text || evalPredicate(tn.predicate, *text);
        }
      },
      t->node);
}

/// Mutable key/value memory with capacity-based eviction and a TTL measured
/// against an injected logical clock. Writes enforce the append-only store
/// typing before mutating anything.
class Store {
 public:
  struct Entry {
    ValuePtr value;
    std::uint64_t insertedAtStep = 0;
  };

  Store() = default;
  explicit Store(StoreDecl decl) : decl_(decl) {}

  const StoreDecl& decl() const { return decl_; }
  const StoreTyping& typing() const { return typing_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Infers the structural type of a value for the typing record.
  static TypePtr typeOfValue(const ValuePtr& v) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Value::StrV>) {
            return ty::str();
          } else if constexpr (std::is_same_v<T, Value::ClosureV>) {
            return ty::arrow(n.paramType, ty::str());
          } else if constexpr (std::is_same_v<T, Value::PairV>) {
            return ty::product(typeOfValue(n.first), typeOfValue(n.second));
          } else if constexpr (std::is_same_v<T, Value::ToolV> ||
                               std::is_same_v<T, Value::OracleV>) {
            return ty::arrow(ty::str(), ty::str());
          } else {
            return ty::variant({{n.label, ty::str()}});
          }
        },
        v->node);
  }

  /// Rejects (before any mutation) writes that would change the type of an
  /// existing key. On success evicts the oldest entries down to capacity.
  bool write(const std::string& key, ValuePtr value, std::uint64_t now) {
    TypePtr t = typeOfValue(value);
    if (auto existing = typing_.lookup(key)) {
      if (!typeEqual(*existing, t)) return false;
    }
    typing_.assign(key, t);
    entries_[key] = Entry{std::move(value), now};
    evictOverflow();
    return true;
  }

  /// Entries older than ttlSeconds relative to `now` are invisible.
  std::optional<ValuePtr> read(const std::string& key, std::uint64_t now) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    if (expired(it->second, now)) return std::nullopt;
    return it->second.value;
  }

 private:
  bool expired(const Entry& e, std::uint64_t now) const {
    return decl_.ttlSeconds > 0 && now > e.insertedAtStep &&
           now - e.insertedAtStep > decl_.ttlSeconds;
  }

  void evictOverflow() {
    if (decl_.capacity == 0) return;
    while (entries_.size() > decl_.capacity) {
      auto oldest = entries_.begin();
      for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        if (it->second.insertedAtStep < oldest->second.insertedAtStep) oldest = it;
      }
      entries_.erase(oldest);
    }
  }

  StoreDecl decl_;
  StoreTyping typing_;
  std::map<std::string, Entry> entries_;
};

}  // namespace lambdagent
