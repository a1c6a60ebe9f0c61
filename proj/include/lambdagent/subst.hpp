#pragma once

#include <atomic>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "lambdagent/term.hpp"

namespace lambdagent {

/// Fresh-name supply: a process-wide counter appended to a base name.
inline std::string freshName(const std::string& base = "x") {
  static std::atomic<std::uint64_t> counter{0};
  return base + "$" + std::to_string(counter.fetch_add(1));
}

inline void collectFreeVars(const TermPtr& t, std::set<std::string>& bound,
                            std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          if (!bound.count(n.name)) out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          bool inserted = bound.insert(n.param).second;
          collectFreeVars(n.body, bound, out);
          if (inserted) bound.erase(n.param);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          collectFreeVars(n.fn, bound, out);
          collectFreeVars(n.arg, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          collectFreeVars(n.first, bound, out);
          collectFreeVars(n.second, bound, out);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          collectFreeVars(n.cond, bound, out);
          collectFreeVars(n.thenBranch, bound, out);
          collectFreeVars(n.elseBranch, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          collectFreeVars(n.body, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          collectFreeVars(n.left, bound, out);
          collectFreeVars(n.right, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          collectFreeVars(n.inner, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          collectFreeVars(n.classifier, bound, out);
          for (const auto& [_, branch] : n.branches) collectFreeVars(branch, bound, out);
          if (n.defaultBranch) collectFreeVars(n.defaultBranch, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          collectFreeVars(n.inner, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          collectFreeVars(n.inner, bound, out);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          collectFreeVars(n.left, bound, out);
          collectFreeVars(n.right, bound, out);
        }
        // Var-free leaves: Tool, LamOracle, StrLit.
      },
      t->node);
}

inline std::set<std::string> freeVars(const TermPtr& t) {
  std::set<std::string> bound, out;
  collectFreeVars(t, bound, out);
  return out;
}

inline bool isClosed(const TermPtr& t) { return freeVars(t).empty(); }

/// Capture-avoiding substitution of `replacement` for free occurrences of
/// `varName`. Binders shadow; binders whose parameter would capture a free
/// variable of the replacement are renamed with a fresh suffix first.
inline TermPtr substitute(const TermPtr& body, const std::string& varName,
                          const TermPtr& replacement) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          return n.name == varName ? replacement : body;
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          if (n.param == varName) return body;  // shadowed
          if (freeVars(replacement).count(n.param)) {
            std::string renamed = freshName(n.param);
            TermPtr freshBody = substitute(n.body, n.param, term::var(renamed));
            return term::abs(renamed, n.paramType,
                             substitute(freshBody, varName, replacement));
          }
          return term::abs(n.param, n.paramType,
                           substitute(n.body, varName, replacement));
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return term::app(substitute(n.fn, varName, replacement),
                           substitute(n.arg, varName, replacement));
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          return term::comp(substitute(n.first, varName, replacement),
                            substitute(n.second, varName, replacement));
        } else if constexpr (std::is_same_v<T, Term::If>) {
          return term::ifThenElse(substitute(n.cond, varName, replacement),
                                  substitute(n.thenBranch, varName, replacement),
                                  substitute(n.elseBranch, varName, replacement));
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          return term::fix(n.bound, substitute(n.body, varName, replacement));
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return term::pair(substitute(n.left, varName, replacement),
                            substitute(n.right, varName, replacement));
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          return term::proj(n.index, substitute(n.inner, varName, replacement));
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          std::vector<Term::Branch> branches;
          branches.reserve(n.branches.size());
          for (const auto& [label, branch] : n.branches)
            branches.emplace_back(label, substitute(branch, varName, replacement));
          TermPtr def = n.defaultBranch
                            ? substitute(n.defaultBranch, varName, replacement)
                            : nullptr;
          return term::caseOf(substitute(n.classifier, varName, replacement),
                              std::move(branches), std::move(def));
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          return term::guard(substitute(n.inner, varName, replacement), n.predicate);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          return term::mem(substitute(n.inner, varName, replacement), n.store);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          return term::prob(substitute(n.left, varName, replacement),
                            substitute(n.right, varName, replacement), n.p);
        } else {
          return body;  // Tool, LamOracle, StrLit
        }
      },
      body->node);
}

namespace detail {

inline TermPtr alphaNormalizeRec(const TermPtr& t,
                                 std::map<std::string, std::string>& renames,
                                 std::uint64_t& next) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          auto it = renames.find(n.name);
          return it == renames.end() ? t : term::var(it->second);
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          std::string canonical = "v" + std::to_string(next++);
          auto previous = renames.find(n.param);
          std::optional<std::string> saved;
          if (previous != renames.end()) saved = previous->second;
          renames[n.param] = canonical;
          TermPtr body = alphaNormalizeRec(n.body, renames, next);
          if (saved)
            renames[n.param] = *saved;
          else
            renames.erase(n.param);
          return term::abs(canonical, n.paramType, body);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          auto fn = alphaNormalizeRec(n.fn, renames, next);
          return term::app(fn, alphaNormalizeRec(n.arg, renames, next));
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          auto first = alphaNormalizeRec(n.first, renames, next);
          return term::comp(first, alphaNormalizeRec(n.second, renames, next));
        } else if constexpr (std::is_same_v<T, Term::If>) {
          auto cond = alphaNormalizeRec(n.cond, renames, next);
          auto thenB = alphaNormalizeRec(n.thenBranch, renames, next);
          return term::ifThenElse(cond, thenB,
                                  alphaNormalizeRec(n.elseBranch, renames, next));
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          return term::fix(n.bound, alphaNormalizeRec(n.body, renames, next));
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          auto left = alphaNormalizeRec(n.left, renames, next);
          return term::pair(left, alphaNormalizeRec(n.right, renames, next));
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          return term::proj(n.index, alphaNormalizeRec(n.inner, renames, next));
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          auto cls = alphaNormalizeRec(n.classifier, renames, next);
          std::vector<Term::Branch> branches;
          branches.reserve(n.branches.size());
          for (const auto& [label, branch] : n.branches)
            branches.emplace_back(label, alphaNormalizeRec(branch, renames, next));
          TermPtr def = n.defaultBranch
                            ? alphaNormalizeRec(n.defaultBranch, renames, next)
                            : nullptr;
          return term::caseOf(cls, std::move(branches), std::move(def));
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          return term::guard(alphaNormalizeRec(n.inner, renames, next), n.predicate);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          return term::mem(alphaNormalizeRec(n.inner, renames, next), n.store);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          auto left = alphaNormalizeRec(n.left, renames, next);
          return term::prob(left, alphaNormalizeRec(n.right, renames, next), n.p);
        } else {
          return t;
        }
      },
      t->node);
}

}  // namespace detail

/// Renames binders to canonical positional names (v0, v1, ...) in traversal
/// order. Two α-equivalent closed terms normalize to equal terms.
inline TermPtr alphaNormalize(const TermPtr& t) {
  std::map<std::string, std::string> renames;
  std::uint64_t next = 0;
  return detail::alphaNormalizeRec(t, renames, next);
}

inline bool alphaEqual(const TermPtr& a, const TermPtr& b) {
  return termEqual(alphaNormalize(a), alphaNormalize(b));
}

/// e1 >> e2 desugars to λx:τ. e2 (e1 x) with a fresh x. The source term
/// must be a composition node.
inline TermPtr desugarComp(const TermPtr& t, const TypePtr& domain = ty::str()) {
  const auto* c = termAs<Term::Comp>(t);
  if (!c) throw std::invalid_argument("desugarComp: term is not a composition");
  std::string x = freshName("x");
  return term::abs(x, domain, term::app(c->second, term::app(c->first, term::var(x))));
}

}  // namespace lambdagent
