#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "lambdagent/term.hpp"

namespace lambdagent {

struct CostError {
  std::string unknownOracleId;
};

using CostResult = std::variant<double, CostError>;

/// Oracle ids: tool ids for tool[f], the model name for lam p θ.
using OracleCosts = std::map<std::string, double>;

namespace detail {

inline std::variant<double, CostError> lookupCost(const OracleCosts& costs,
                                                  const std::string& id) {
  auto it = costs.find(id);
  if (it == costs.end()) return CostError{id};
  return it->second;
}

/// Max cost over every oracle node occurring in the subtree.
inline std::variant<double, CostError> maxOracleNodeCost(const TermPtr& t,
                                                         const OracleCosts& costs) {
  double best = 0.0;
  CostError error{};
  bool failed = false;
  auto visit = [&](const TermPtr& node, auto&& self) -> void {
    if (failed) return;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::LamOracle>) {
            auto c = lookupCost(costs, n.params.modelName);
            if (c.index() == 1) {
              failed = true;
              error = std::get<1>(c);
            } else {
              best = std::max(best, std::get<0>(c));
            }
          } else if constexpr (std::is_same_v<T, Term::Tool>) {
            auto c = lookupCost(costs, n.toolId);
            if (c.index() == 1) {
              failed = true;
              error = std::get<1>(c);
            } else {
              best = std::max(best, std::get<0>(c));
            }
          } else if constexpr (std::is_same_v<T, Term::Abs>) {
            self(n.body, self);
          } else if constexpr (std::is_same_v<T, Term::App>) {
            self(n.fn, self);
            self(n.arg, self);
          } else if constexpr (std::is_same_v<T, Term::Comp>) {
            self(n.first, self);
            self(n.second, self);
          } else if constexpr (std::is_same_v<T, Term::If>) {
            self(n.cond, self);
            self(n.thenBranch, self);
            self(n.elseBranch, self);
          } else if constexpr (std::is_same_v<T, Term::Fix>) {
            self(n.body, self);
          } else if constexpr (std::is_same_v<T, Term::Pair>) {
            self(n.left, self);
            self(n.right, self);
          } else if constexpr (std::is_same_v<T, Term::Proj>) {
            self(n.inner, self);
          } else if constexpr (std::is_same_v<T, Term::Case>) {
            self(n.classifier, self);
            for (const auto& [_, b] : n.branches) self(b, self);
            if (n.defaultBranch) self(n.defaultBranch, self);
          } else if constexpr (std::is_same_v<T, Term::Guard>) {
            self(n.inner, self);
          } else if constexpr (std::is_same_v<T, Term::Mem>) {
            self(n.inner, self);
          } else if constexpr (std::is_same_v<T, Term::Prob>) {
            self(n.left, self);
            self(n.right, self);
          }
        },
        node->node);
  };
  visit(t, visit);
  if (failed) return error;
  return best;
}

inline CostResult applyCost(const TermPtr& t, const OracleCosts& costs);

inline CostResult evalCost(const TermPtr& t, const OracleCosts& costs) {
  return std::visit(
      [&](const auto& n) -> CostResult {
        using T = std::decay_t<decltype(n)>;
        auto sum2 = [&](const TermPtr& a, const TermPtr& b) -> CostResult {
          auto ca = evalCost(a, costs);
          if (ca.index() == 1) return ca;
          auto cb = evalCost(b, costs);
          if (cb.index() == 1) return cb;
          return std::get<0>(ca) + std::get<0>(cb);
        };
        if constexpr (std::is_same_v<T, Term::App>) {
          auto cf = evalCost(n.fn, costs);
          if (cf.index() == 1) return cf;
          auto ca = evalCost(n.arg, costs);
          if (ca.index() == 1) return ca;
          auto cp = applyCost(n.fn, costs);
          if (cp.index() == 1) return cp;
          return std::get<0>(cf) + std::get<0>(ca) + std::get<0>(cp);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return sum2(n.left, n.right);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          return sum2(n.first, n.second);
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          return evalCost(n.inner, costs);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          auto cl = evalCost(n.left, costs);
          if (cl.index() == 1) return cl;
          auto cr = evalCost(n.right, costs);
          if (cr.index() == 1) return cr;
          return std::max(std::get<0>(cl), std::get<0>(cr));
        } else {
          return 0.0;  // values and function formers evaluate without calls
        }
      },
      t->node);
}

inline CostResult applyCost(const TermPtr& t, const OracleCosts& costs) {
  return std::visit(
      [&](const auto& n) -> CostResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::LamOracle>) {
          return lookupCost(costs, n.params.modelName);
        } else if constexpr (std::is_same_v<T, Term::Tool>) {
          return lookupCost(costs, n.toolId);
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          return evalCost(n.body, costs);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          auto ca = applyCost(n.first, costs);
          if (ca.index() == 1) return ca;
          auto cb = applyCost(n.second, costs);
          if (cb.index() == 1) return cb;
          return std::get<0>(ca) + std::get<0>(cb);
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          // cost(fix_n e applied) <= n * max cost over oracles(e)
          auto m = maxOracleNodeCost(n.body, costs);
          if (m.index() == 1) return std::get<1>(m);
          return static_cast<double>(n.bound) * std::get<0>(m);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          auto ca = applyCost(n.left, costs);
          if (ca.index() == 1) return ca;
          auto cb = applyCost(n.right, costs);
          if (cb.index() == 1) return cb;
          return std::get<0>(ca) + std::get<0>(cb);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          auto cc = applyCost(n.cond, costs);
          if (cc.index() == 1) return cc;
          auto ct = applyCost(n.thenBranch, costs);
          if (ct.index() == 1) return ct;
          auto ce = applyCost(n.elseBranch, costs);
          if (ce.index() == 1) return ce;
          return std::get<0>(cc) + std::max(std::get<0>(ct), std::get<0>(ce));
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          auto cc = applyCost(n.classifier, costs);
          if (cc.index() == 1) return cc;
          double branchMax = 0.0;
          for (const auto& [_, b] : n.branches) {
            auto cb = applyCost(b, costs);
            if (cb.index() == 1) return cb;
            branchMax = std::max(branchMax, std::get<0>(cb));
          }
          if (n.defaultBranch) {
            auto cd = applyCost(n.defaultBranch, costs);
            if (cd.index() == 1) return cd;
            branchMax = std::max(branchMax, std::get<0>(cd));
          }
          return std::get<0>(cc) + branchMax;
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          return applyCost(n.inner, costs);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          return applyCost(n.inner, costs);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          auto cl = applyCost(n.left, costs);
          if (cl.index() == 1) return cl;
          auto cr = applyCost(n.right, costs);
          if (cr.index() == 1) return cr;
          return std::max(std::get<0>(cl), std::get<0>(cr));
        } else {
          return 0.0;  // Var (self references), StrLit
        }
      },
      t->node);
}

inline std::uint64_t applyCalls(const TermPtr& t);

inline std::uint64_t evalCalls(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> std::uint64_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::App>) {
          return evalCalls(n.fn) + evalCalls(n.arg) + applyCalls(n.fn);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return evalCalls(n.left) + evalCalls(n.right);
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          return evalCalls(n.inner);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          return std::max(evalCalls(n.left), evalCalls(n.right));
        } else {
          return 0;
        }
      },
      t->node);
}

inline std::uint64_t oracleNodeCount(const TermPtr& t);

}  // namespace detail

/// Worst-case oracle call count for one application of t: each bounded
/// fixpoint contributes bound * calls-per-unfolding (a ReAct body counts
/// Think plus one tool, i.e. two per iteration).
inline std::uint64_t predictedCalls(const TermPtr& t) { return detail::applyCalls(t); }

namespace detail {

inline std::uint64_t applyCalls(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> std::uint64_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::LamOracle> ||
                      std::is_same_v<T, Term::Tool>) {
          return 1;
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          return evalCalls(n.body);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          return applyCalls(n.first) + applyCalls(n.second);
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          std::uint64_t perUnfold;
          if (const auto* selfAbs = termAs<Term::Abs>(n.body)) {
            perUnfold = applyCalls(selfAbs->body);
          } else {
            perUnfold = oracleNodeCount(n.body);
          }
          return static_cast<std::uint64_t>(n.bound) * perUnfold;
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return applyCalls(n.left) + applyCalls(n.right);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          return applyCalls(n.cond) +
                 std::max(applyCalls(n.thenBranch), applyCalls(n.elseBranch));
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          std::uint64_t branchMax = 0;
          for (const auto& [_, b] : n.branches)
            branchMax = std::max(branchMax, applyCalls(b));
          if (n.defaultBranch) branchMax = std::max(branchMax, applyCalls(n.defaultBranch));
          return applyCalls(n.classifier) + branchMax;
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          return applyCalls(n.inner);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          return applyCalls(n.inner);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          return std::max(applyCalls(n.left), applyCalls(n.right));
        } else {
          return 0;  // Var, StrLit
        }
      },
      t->node);
}

inline std::uint64_t oracleNodeCount(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> std::uint64_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::LamOracle> ||
                      std::is_same_v<T, Term::Tool>) {
          return 1;
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          return oracleNodeCount(n.body);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return oracleNodeCount(n.fn) + oracleNodeCount(n.arg);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          return oracleNodeCount(n.first) + oracleNodeCount(n.second);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          return oracleNodeCount(n.cond) + oracleNodeCount(n.thenBranch) +
                 oracleNodeCount(n.elseBranch);
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          return oracleNodeCount(n.body);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return oracleNodeCount(n.left) + oracleNodeCount(n.right);
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          return oracleNodeCount(n.inner);
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          std::uint64_t out = oracleNodeCount(n.classifier);
          for (const auto& [_, b] : n.branches) out += oracleNodeCount(b);
          if (n.defaultBranch) out += oracleNodeCount(n.defaultBranch);
          return out;
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          return oracleNodeCount(n.inner);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          return oracleNodeCount(n.inner);
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          return oracleNodeCount(n.left) + oracleNodeCount(n.right);
        } else {
          return 0;
        }
      },
      t->node);
}

}  // namespace detail

/// Dollar-cost bound for one application of t: per fixpoint,
/// bound * max cost over the oracles occurring in the body; pipeline
/// stages compose additively. Unknown oracle ids are reported.
inline CostResult costEstimate(const TermPtr& t, const OracleCosts& perOracleCost) {
  return detail::applyCost(t, perOracleCost);
}

}  // namespace lambdagent
