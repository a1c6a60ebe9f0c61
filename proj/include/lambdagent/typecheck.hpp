#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lambdagent/store.hpp"
#include "lambdagent/term.hpp"

namespace lambdagent {

/// Γ;Σ plus the ambient tool signatures. terminate is always present at
/// Str -> Str: it is the identity and the base case of every ReAct loop.
struct TypeContext {
  std::map<std::string, TypePtr> varBindings;
  StoreTyping storeTyping;
  std::map<std::string, std::pair<TypePtr, TypePtr>> toolSignatures;

  TypeContext() { toolSignatures["terminate"] = {ty::str(), ty::str()}; }

  TypeContext withVar(const std::string& name, TypePtr type) const {
    TypeContext out = *this;
    out.varBindings[name] = std::move(type);
    return out;
  }
};

enum class TypeErrorKind {
  Mismatch,
  UnboundVar,
  UnknownTool,
  NonExhaustiveCase,
  BadFixShape,
  StoreTypeConflict,
};

inline const char* typeErrorKindName(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::Mismatch: return "Mismatch";
    case TypeErrorKind::UnboundVar: return "UnboundVar";
    case TypeErrorKind::UnknownTool: return "UnknownTool";
    case TypeErrorKind::NonExhaustiveCase: return "NonExhaustiveCase";
    case TypeErrorKind::BadFixShape: return "BadFixShape";
    case TypeErrorKind::StoreTypeConflict: return "StoreTypeConflict";
  }
  return "Unknown";
}

struct TypeError {
  TypeErrorKind kind = TypeErrorKind::Mismatch;
  std::string location;  // dotted path into the term
  std::optional<TypePtr> expected;
  std::optional<TypePtr> found;
  std::string detail;

  std::string render() const {
    std::string out = typeErrorKindName(kind);
    out += " at ";
    out += location.empty() ? "<root>" : location;
    if (expected) out += " expected " + printType(*expected);
    if (found) out += " found " + printType(*found);
    if (!detail.empty()) out += " (" + detail + ")";
    return out;
  }
};

using InferResult = std::variant<TypePtr, TypeError>;

inline bool inferOk(const InferResult& r) { return r.index() == 0; }
inline const TypePtr& inferType(const InferResult& r) { return std::get<0>(r); }
inline const TypeError& inferError(const InferResult& r) { return std::get<1>(r); }

/// True iff every variant label is covered by a branch, or a default
/// branch exists. nullopt when the classifier type is not an arrow into a
/// variant.
inline std::optional<bool> caseExhaustive(const TypePtr& classifierType,
                                          const std::vector<std::string>& branchLabels,
                                          bool hasDefault) {
  const auto* arrow = std::get_if<Type::Arrow>(&classifierType->node);
  if (!arrow) return std::nullopt;
  const auto* variant = std::get_if<Type::Variant>(&arrow->cod->node);
  if (!variant) return std::nullopt;
  if (hasDefault) return true;
  std::set<std::string> covered(branchLabels.begin(), branchLabels.end());
  for (const auto& [label, _] : variant->labels) {
    if (!covered.count(label)) return false;
  }
  return true;
}

namespace detail {

inline std::string childPath(const std::string& base, const std::string& seg) {
  return base.empty() ? seg : base + "." + seg;
}

/// Codomain of applying a function-shaped type to an argument type. Pairs
/// of functions apply component-wise (the runtime form of the parallel
/// sugar e1 | e2).
inline std::optional<TypePtr> applyType(const TypePtr& fnType, const TypePtr& argType) {
  if (const auto* arrow = std::get_if<Type::Arrow>(&fnType->node)) {
    if (!typeCompatible(arrow->dom, argType)) return std::nullopt;
    return arrow->cod;
  }
  if (const auto* prod = std::get_if<Type::Product>(&fnType->node)) {
    auto left = applyType(prod->left, argType);
    auto right = applyType(prod->right, argType);
    if (!left || !right) return std::nullopt;
    return ty::product(*left, *right);
  }
  return std::nullopt;
}

/// Common type of two branches that must agree. Exact match wins; branches
/// that agree only after refinement erasure join at the erased type.
inline std::optional<TypePtr> joinTypes(const TypePtr& a, const TypePtr& b) {
  if (typeEqual(a, b)) return a;
  TypePtr ea = eraseRefinements(a);
  if (typeEqual(ea, eraseRefinements(b))) return ea;
  return std::nullopt;
}

inline InferResult inferRec(const TypeContext& ctx, const TermPtr& t,
                            const std::string& path);

inline std::optional<TypeError> inferChild(const TypeContext& ctx, const TermPtr& t,
                                           const std::string& path, TypePtr& out) {
  InferResult r = inferRec(ctx, t, path);
  if (!inferOk(r)) return inferError(r);
  out = inferType(r);
  return std::nullopt;
}

inline InferResult inferRec(const TypeContext& ctx, const TermPtr& t,
                            const std::string& path) {
  return std::visit(
      [&](const auto& n) -> InferResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          auto it = ctx.varBindings.find(n.name);
          if (it == ctx.varBindings.end())
            return TypeError{TypeErrorKind::UnboundVar, path, std::nullopt,
                             std::nullopt, "variable " + n.name};
          return it->second;
        } else if constexpr (std::is_same_v<T, Term::StrLit>) {
          return ty::str();
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          InferResult body =
              inferRec(ctx.withVar(n.param, n.paramType), n.body, childPath(path, "body"));
          if (!inferOk(body)) return body;
          return ty::arrow(n.paramType, inferType(body));
        } else if constexpr (std::is_same_v<T, Term::App>) {
          TypePtr fnType, argType;
          if (auto err = inferChild(ctx, n.fn, childPath(path, "fn"), fnType))
            return *err;
          if (auto err = inferChild(ctx, n.arg, childPath(path, "arg"), argType))
            return *err;
          auto cod = applyType(fnType, argType);
          if (!cod)
            return TypeError{TypeErrorKind::Mismatch, path, fnType, argType,
                             "cannot apply"};
          return *cod;
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          TypePtr firstType, secondType;
          if (auto err = inferChild(ctx, n.first, childPath(path, "first"), firstType))
            return *err;
          if (auto err =
                  inferChild(ctx, n.second, childPath(path, "second"), secondType))
            return *err;
          const auto* a1 = std::get_if<Type::Arrow>(&firstType->node);
          const auto* a2 = std::get_if<Type::Arrow>(&secondType->node);
          if (!a1 || !a2)
            return TypeError{TypeErrorKind::Mismatch, path, firstType, secondType,
                             "composition needs two functions"};
          if (!typeCompatible(a2->dom, a1->cod))
            return TypeError{TypeErrorKind::Mismatch, childPath(path, "second"),
                             a1->cod, a2->dom, "stage interface mismatch"};
          return ty::arrow(a1->dom, a2->cod);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          TypePtr condType, thenType, elseType;
          if (auto err = inferChild(ctx, n.cond, childPath(path, "cond"), condType))
            return *err;
          if (auto err =
                  inferChild(ctx, n.thenBranch, childPath(path, "then"), thenType))
            return *err;
          if (auto err =
                  inferChild(ctx, n.elseBranch, childPath(path, "else"), elseType))
            return *err;
          const auto* ca = std::get_if<Type::Arrow>(&condType->node);
          if (!ca || !typeEqual(eraseRefinements(ca->cod), ty::str()))
            return TypeError{TypeErrorKind::Mismatch, childPath(path, "cond"),
                             ty::arrow(ty::str(), ty::str()), condType,
                             "condition must map input to Str"};
          const auto* ta = std::get_if<Type::Arrow>(&thenType->node);
          const auto* ea = std::get_if<Type::Arrow>(&elseType->node);
          if (!ta || !ea)
            return TypeError{TypeErrorKind::Mismatch, path, thenType, elseType,
                             "branches must be functions"};
          if (!typeCompatible(ta->dom, ca->dom) || !typeCompatible(ea->dom, ca->dom))
            return TypeError{TypeErrorKind::Mismatch, path, ca->dom, ta->dom,
                             "branch domain mismatch"};
          auto cod = joinTypes(ta->cod, ea->cod);
          if (!cod)
            return TypeError{TypeErrorKind::Mismatch, path, ta->cod, ea->cod,
                             "branch codomain mismatch"};
          return ty::arrow(ca->dom, *cod);
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          TypePtr bodyType;
          if (auto err = inferChild(ctx, n.body, childPath(path, "body"), bodyType))
            return *err;
          const auto* outer = std::get_if<Type::Arrow>(&bodyType->node);
          if (!outer)
            return TypeError{TypeErrorKind::BadFixShape, path, std::nullopt, bodyType,
                             "fix body must be a function"};
          const auto* dom = std::get_if<Type::Arrow>(&outer->dom->node);
          const auto* cod = std::get_if<Type::Arrow>(&outer->cod->node);
          if (!dom || !cod || !typeCompatible(outer->dom, outer->cod) ||
              !typeCompatible(dom->dom, dom->cod))
            return TypeError{TypeErrorKind::BadFixShape, path, std::nullopt, bodyType,
                             "fix body must have shape (t->t)->(t->t)"};
          return eraseRefinements(outer->cod);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          TypePtr leftType, rightType;
          if (auto err = inferChild(ctx, n.left, childPath(path, "left"), leftType))
            return *err;
          if (auto err = inferChild(ctx, n.right, childPath(path, "right"), rightType))
            return *err;
          return ty::product(leftType, rightType);
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          TypePtr innerType;
          if (auto err = inferChild(ctx, n.inner, childPath(path, "inner"), innerType))
            return *err;
          const auto* prod = std::get_if<Type::Product>(&innerType->node);
          if (!prod)
            return TypeError{TypeErrorKind::Mismatch, path, std::nullopt, innerType,
                             "projection needs a product"};
          return n.index == 1 ? prod->left : prod->right;
        } else if constexpr (std::is_same_v<T, Term::Tool>) {
          auto it = ctx.toolSignatures.find(n.toolId);
          if (it == ctx.toolSignatures.end())
            return TypeError{TypeErrorKind::UnknownTool, path, std::nullopt,
                             std::nullopt, "tool " + n.toolId};
          return ty::arrow(it->second.first, it->second.second);
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          TypePtr clsType;
          if (auto err =
                  inferChild(ctx, n.classifier, childPath(path, "classifier"), clsType))
            return *err;
          const auto* ca = std::get_if<Type::Arrow>(&clsType->node);
          if (!ca)
            return TypeError{TypeErrorKind::Mismatch, childPath(path, "classifier"),
                             std::nullopt, clsType, "classifier must be a function"};
          const bool strClassifier = typeEqual(eraseRefinements(ca->cod), ty::str());
          const auto* variant = std::get_if<Type::Variant>(&ca->cod->node);
          if (!strClassifier && !variant)
            return TypeError{TypeErrorKind::Mismatch, childPath(path, "classifier"),
                             std::nullopt, clsType,
                             "classifier must yield a label or Str"};
          if (variant) {
            std::vector<std::string> labels;
            labels.reserve(n.branches.size());
            for (const auto& [label, _] : n.branches) labels.push_back(label);
            auto exhaustive =
                caseExhaustive(clsType, labels, n.defaultBranch != nullptr);
            if (!exhaustive || !*exhaustive)
              return TypeError{TypeErrorKind::NonExhaustiveCase, path, std::nullopt,
                               clsType, "uncovered variant label"};
          }
          if (n.branches.empty() && !n.defaultBranch)
            return TypeError{TypeErrorKind::NonExhaustiveCase, path, std::nullopt,
                             clsType, "dispatch has no branches"};
          std::optional<TypePtr> result;
          auto checkBranch = [&](const TermPtr& branch,
                                 const std::string& branchPath) -> std::optional<TypeError> {
            TypePtr branchType;
            if (auto err = inferChild(ctx, branch, branchPath, branchType)) return *err;
            const auto* ba = std::get_if<Type::Arrow>(&branchType->node);
            if (!ba)
              return TypeError{TypeErrorKind::Mismatch, branchPath, std::nullopt,
                               branchType, "branch must be a function"};
            if (!typeCompatible(ba->dom, ca->dom))
              return TypeError{TypeErrorKind::Mismatch, branchPath, ca->dom, ba->dom,
                               "branch domain mismatch"};
            if (!result) {
              result = ba->cod;
              return std::nullopt;
            }
            auto joined = joinTypes(*result, ba->cod);
            if (!joined)
              return TypeError{TypeErrorKind::Mismatch, branchPath, *result, ba->cod,
                               "branch codomain mismatch"};
            result = joined;
            return std::nullopt;
          };
          for (const auto& [label, branch] : n.branches) {
            if (auto err = checkBranch(branch, childPath(path, "branch[" + label + "]")))
              return *err;
          }
          if (n.defaultBranch) {
            if (auto err = checkBranch(n.defaultBranch, childPath(path, "default")))
              return *err;
          }
          return ty::arrow(ca->dom, *result);
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          TypePtr innerType;
          if (auto err = inferChild(ctx, n.inner, childPath(path, "inner"), innerType))
            return *err;
          const auto* ia = std::get_if<Type::Arrow>(&innerType->node);
          if (!ia)
            return TypeError{TypeErrorKind::Mismatch, path, std::nullopt, innerType,
                             "guard wraps a function"};
          if (!typeEqual(eraseRefinements(ia->cod), ty::str()))
            return TypeError{TypeErrorKind::Mismatch, path, ty::str(), ia->cod,
                             "guard predicates apply to Str outputs"};
          return ty::arrow(ia->dom,
                           ty::refinement(eraseRefinements(ia->cod), n.predicate));
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          TypePtr innerType;
          if (auto err = inferChild(ctx, n.inner, childPath(path, "inner"), innerType))
            return *err;
          if (!std::holds_alternative<Type::Arrow>(innerType->node))
            return TypeError{TypeErrorKind::Mismatch, path, std::nullopt, innerType,
                             "mem wraps a function"};
          return innerType;
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          TypePtr leftType, rightType;
          if (auto err = inferChild(ctx, n.left, childPath(path, "left"), leftType))
            return *err;
          if (auto err = inferChild(ctx, n.right, childPath(path, "right"), rightType))
            return *err;
          auto joined = joinTypes(leftType, rightType);
          if (!joined)
            return TypeError{TypeErrorKind::Mismatch, path, leftType, rightType,
                             "probabilistic branches must have one type"};
          return *joined;
        } else {  // LamOracle
          return ty::arrow(ty::str(), ty::str());
        }
      },
      t->node);
}

}  // namespace detail

/// Type inference for the judgment Γ;Σ ⊢ e : τ. Deterministic: repeated
/// calls on equal inputs agree exactly.
inline InferResult infer(const TypeContext& ctx, const TermPtr& t) {
  return detail::inferRec(ctx, t, "");
}

/// σ : Σ — every populated key's value inhabits the type Σ assigns. The
/// first offending key (in key order) is reported.
inline std::optional<TypeError> checkStoreCompat(const Store& store,
                                                 const StoreTyping& sigma) {
  for (const auto& [key, entry] : store.entries()) {
    auto expected = sigma.lookup(key);
    if (!expected) continue;  // untyped keys are unconstrained
    if (!valueHasType(entry.value, *expected)) {
      return TypeError{TypeErrorKind::StoreTypeConflict, key, *expected,
                       Store::typeOfValue(entry.value), "store key " + key};
    }
  }
  return std::nullopt;
}

}  // namespace lambdagent
