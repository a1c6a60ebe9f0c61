#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "lambdagent/term.hpp"

namespace lambdagent {

/// Shortest non-ambiguous decimal rendering for probabilities and
/// temperatures (deterministic across platforms for the values we emit).
inline std::string printReal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

inline std::string quoteText(const std::string& s) {
  return nlohmann::json(s).dump();
}

namespace detail {

inline std::string renderTerm(const TermPtr& t);

inline bool isAtomTerm(const TermPtr& t) {
  return std::holds_alternative<Term::Var>(t->node) ||
         std::holds_alternative<Term::StrLit>(t->node) ||
         std::holds_alternative<Term::Tool>(t->node) ||
         std::holds_alternative<Term::Pair>(t->node);
}

inline std::string renderAtom(const TermPtr& t) {
  if (isAtomTerm(t)) return renderTerm(t);
  return "(" + renderTerm(t) + ")";
}

inline std::string renderTerm(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          return "λ" + n.param + ":" + printType(n.paramType) + ". " +
                 renderTerm(n.body);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return renderAtom(n.fn) + " " + renderAtom(n.arg);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          return renderAtom(n.first) + " >> " + renderAtom(n.second);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          return "if " + renderAtom(n.cond) + " then " + renderAtom(n.thenBranch) +
                 " else " + renderAtom(n.elseBranch);
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          return "fix_" + std::to_string(n.bound) + " " + renderAtom(n.body);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return "⟨" + renderTerm(n.left) + ", " + renderTerm(n.right) + "⟩";
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          return (n.index == 1 ? std::string("π1 ") : std::string("π2 ")) +
                 renderAtom(n.inner);
        } else if constexpr (std::is_same_v<T, Term::Tool>) {
          return "tool[" + n.toolId + "]";
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          std::string out = "case " + renderAtom(n.classifier) + " [";
          bool first = true;
          for (const auto& [label, branch] : n.branches) {
            if (!first) out += ", ";
            first = false;
            out += label + " => " + renderTerm(branch);
          }
          if (n.defaultBranch) {
            if (!first) out += ", ";
            out += "_ => " + renderTerm(n.defaultBranch);
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          return "guard " + renderAtom(n.inner) + " " + printPredicate(n.predicate);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          return "mem " + renderAtom(n.inner) + " σ{capacity=" +
                 std::to_string(n.store.capacity) + ", ttl=" +
                 std::to_string(n.store.ttlSeconds) + "}";
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          return renderAtom(n.left) + " ⊕" + printReal(n.p) + " " +
                 renderAtom(n.right);
        } else if constexpr (std::is_same_v<T, Term::LamOracle>) {
          return "lam " + quoteText(n.prompt) + " θ{" + quoteText(n.params.modelName) +
                 ", " + printReal(n.params.temperature) + "}";
        } else {
          return quoteText(n.text);
        }
      },
      t->node);
}

}  // namespace detail

/// Deterministic, bit-stable textual rendering of a term. The format is
/// read back by the test suite's term reader; goldens are stored as UTF-8.
inline std::string prettyPrintLambda(const TermPtr& t) {
  return detail::renderTerm(t);
}

}  // namespace lambdagent
