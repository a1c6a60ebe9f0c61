#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lambdagent/term.hpp"

namespace lambdagent {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

/// Runtime values. The evaluator is substitution-based, so closures carry
/// an already-closed body; capturedEnv is kept for callers that build
/// closures over open bodies by hand.
struct Value {
  struct StrV {
    std::string text;
  };
  struct ClosureV {
    std::string param;
    TypePtr paramType;
    TermPtr body;
    std::vector<std::pair<std::string, ValuePtr>> capturedEnv;
  };
  struct PairV {
    ValuePtr first;
    ValuePtr second;
  };
  struct ToolV {
    std::string toolId;
  };
  struct OracleV {
    std::string prompt;
    ModelParams params;
  };
  struct LabelV {
    std::string label;
  };

  using Node = std::variant<StrV, ClosureV, PairV, ToolV, OracleV, LabelV>;
  Node node;
};

namespace val {

inline ValuePtr make(Value::Node node) {
  return std::make_shared<Value>(Value{std::move(node)});
}

inline ValuePtr str(std::string text) { return make(Value::StrV{std::move(text)}); }
inline ValuePtr closure(std::string param, TypePtr paramType, TermPtr body) {
  return make(Value::ClosureV{std::move(param), std::move(paramType),
                              std::move(body), {}});
}
inline ValuePtr pair(ValuePtr a, ValuePtr b) {
  return make(Value::PairV{std::move(a), std::move(b)});
}
inline ValuePtr tool(std::string toolId) { return make(Value::ToolV{std::move(toolId)}); }
inline ValuePtr oracle(std::string prompt, ModelParams params) {
  return make(Value::OracleV{std::move(prompt), std::move(params)});
}
inline ValuePtr label(std::string l) { return make(Value::LabelV{std::move(l)}); }

}  // namespace val

inline bool valueEqual(const ValuePtr& a, const ValuePtr& b);

inline bool operator==(const Value& a, const Value& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Value::StrV>) {
          return lhs.text == rhs.text;
        } else if constexpr (std::is_same_v<T, Value::ClosureV>) {
          if (!(lhs.param == rhs.param && typeEqual(lhs.paramType, rhs.paramType) &&
                termEqual(lhs.body, rhs.body)))
            return false;
          if (lhs.capturedEnv.size() != rhs.capturedEnv.size()) return false;
          for (size_t i = 0; i < lhs.capturedEnv.size(); ++i) {
            if (lhs.capturedEnv[i].first != rhs.capturedEnv[i].first) return false;
            if (!valueEqual(lhs.capturedEnv[i].second, rhs.capturedEnv[i].second))
              return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Value::PairV>) {
          return valueEqual(lhs.first, rhs.first) && valueEqual(lhs.second, rhs.second);
        } else if constexpr (std::is_same_v<T, Value::ToolV>) {
          return lhs.toolId == rhs.toolId;
        } else if constexpr (std::is_same_v<T, Value::OracleV>) {
          return lhs.prompt == rhs.prompt && lhs.params == rhs.params;
        } else {
          return lhs.label == rhs.label;
        }
      },
      a.node);
}

inline bool valueEqual(const ValuePtr& a, const ValuePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

/// Embeds a value back into term syntax (labels become string literals;
/// they are interchangeable at dispatch sites).
inline TermPtr valueToTerm(const ValuePtr& v) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Value::StrV>) {
          return term::str(n.text);
        } else if constexpr (std::is_same_v<T, Value::ClosureV>) {
          return term::abs(n.param, n.paramType, n.body);
        } else if constexpr (std::is_same_v<T, Value::PairV>) {
          return term::pair(valueToTerm(n.first), valueToTerm(n.second));
        } else if constexpr (std::is_same_v<T, Value::ToolV>) {
          return term::tool(n.toolId);
        } else if constexpr (std::is_same_v<T, Value::OracleV>) {
          return term::lamOracle(n.prompt, n.params);
        } else {
          return term::str(n.label);
        }
      },
      v->node);
}

/// Extracts the string payload of a StrV or LabelV, if any.
inline std::optional<std::string> valueText(const ValuePtr& v) {
  if (const auto* s = std::get_if<Value::StrV>(&v->node)) return s->text;
  if (const auto* l = std::get_if<Value::LabelV>(&v->node)) return l->label;
  return std::nullopt;
}

}  // namespace lambdagent
