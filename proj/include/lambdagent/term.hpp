#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lambdagent/type.hpp"

namespace lambdagent {

/// Model parameters of an LLM oracle. The deterministic fragment studied by
/// the test suites fixes temperature = 0.
struct ModelParams {
  std::string modelName;
  double temperature = 0.0;
};

inline bool operator==(const ModelParams& a, const ModelParams& b) {
  return a.modelName == b.modelName && a.temperature == b.temperature;
}

/// Static description of the store attached to a mem wrapper. capacity = 0
/// means unbounded; ttlSeconds = 0 means entries never expire.
struct StoreDecl {
  std::uint64_t capacity = 0;
  std::uint64_t ttlSeconds = 0;
};

inline bool operator==(const StoreDecl& a, const StoreDecl& b) {
  return a.capacity == b.capacity && a.ttlSeconds == b.ttlSeconds;
}

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Abstract syntax. Terms are immutable after construction and safe to
/// share across threads; subterms are shared by pointer.
struct Term {
  using Branch = std::pair<std::string, TermPtr>;

  struct Var {
    std::string name;
  };
  struct Abs {
    std::string param;
    TypePtr paramType;
    TermPtr body;
  };
  struct App {
    TermPtr fn;
    TermPtr arg;
  };
  struct Comp {
    TermPtr first;
    TermPtr second;
  };
  struct If {
    TermPtr cond;
    TermPtr thenBranch;
    TermPtr elseBranch;
  };
  struct Fix {
    std::uint32_t bound = 0;
    TermPtr body;
  };
  struct Pair {
    TermPtr left;
    TermPtr right;
  };
  struct Proj {
    int index = 1;  // 1 or 2
    TermPtr inner;
  };
  struct Tool {
    std::string toolId;
  };
  struct Case {
    TermPtr classifier;
    std::vector<Branch> branches;
    TermPtr defaultBranch;  // may be null
  };
  struct Guard {
    TermPtr inner;
    PredicatePtr predicate;
  };
  struct Mem {
    TermPtr inner;
    StoreDecl store;
  };
  struct Prob {
    TermPtr left;
    TermPtr right;
    double p = 0.5;
  };
  struct LamOracle {
    std::string prompt;
    ModelParams params;
  };
  struct StrLit {
    std::string text;
  };

  using Node = std::variant<Var, Abs, App, Comp, If, Fix, Pair, Proj, Tool, Case,
                            Guard, Mem, Prob, LamOracle, StrLit>;
  Node node;
};

namespace term {

inline TermPtr make(Term::Node node) {
  return std::make_shared<Term>(Term{std::move(node)});
}

inline TermPtr var(std::string name) { return make(Term::Var{std::move(name)}); }

inline TermPtr abs(std::string param, TypePtr paramType, TermPtr body) {
  return make(Term::Abs{std::move(param), std::move(paramType), std::move(body)});
}

inline TermPtr app(TermPtr fn, TermPtr arg) {
  return make(Term::App{std::move(fn), std::move(arg)});
}

inline TermPtr comp(TermPtr first, TermPtr second) {
  return make(Term::Comp{std::move(first), std::move(second)});
}

inline TermPtr ifThenElse(TermPtr cond, TermPtr thenBranch, TermPtr elseBranch) {
  return make(
      Term::If{std::move(cond), std::move(thenBranch), std::move(elseBranch)});
}

inline TermPtr fix(std::uint32_t bound, TermPtr body) {
  return make(Term::Fix{bound, std::move(body)});
}

inline TermPtr pair(TermPtr left, TermPtr right) {
  return make(Term::Pair{std::move(left), std::move(right)});
}

inline TermPtr proj(int index, TermPtr inner) {
  if (index != 1 && index != 2)
    throw std::invalid_argument("proj index must be 1 or 2");
  return make(Term::Proj{index, std::move(inner)});
}

inline TermPtr tool(std::string toolId) { return make(Term::Tool{std::move(toolId)}); }

inline TermPtr caseOf(TermPtr classifier, std::vector<Term::Branch> branches,
                      TermPtr defaultBranch = nullptr) {
  std::set<std::string> seen;
  for (const auto& [label, _] : branches) {
    if (!seen.insert(label).second)
      throw std::invalid_argument("case branch labels must be pairwise distinct");
  }
  return make(Term::Case{std::move(classifier), std::move(branches),
                         std::move(defaultBranch)});
}

inline TermPtr guard(TermPtr inner, PredicatePtr predicate) {
  return make(Term::Guard{std::move(inner), std::move(predicate)});
}

inline TermPtr mem(TermPtr inner, StoreDecl store) {
  return make(Term::Mem{std::move(inner), store});
}

inline TermPtr prob(TermPtr left, TermPtr right, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("prob p must lie in [0,1]");
  return make(Term::Prob{std::move(left), std::move(right), p});
}

inline TermPtr lamOracle(std::string prompt, ModelParams params) {
  return make(Term::LamOracle{std::move(prompt), std::move(params)});
}

inline TermPtr str(std::string text) { return make(Term::StrLit{std::move(text)}); }

/// id = λx:Str. x, the neutral element of pipeline composition and the
/// semantics of the terminate tool.
inline TermPtr identity(const std::string& param = "x") {
  return abs(param, ty::str(), var(param));
}

}  // namespace term

inline bool termEqual(const TermPtr& a, const TermPtr& b);

inline bool operator==(const Term& a, const Term& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Term::Var>) {
          return lhs.name == rhs.name;
        } else if constexpr (std::is_same_v<T, Term::Abs>) {
          return lhs.param == rhs.param && typeEqual(lhs.paramType, rhs.paramType) &&
                 termEqual(lhs.body, rhs.body);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return termEqual(lhs.fn, rhs.fn) && termEqual(lhs.arg, rhs.arg);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          return termEqual(lhs.first, rhs.first) && termEqual(lhs.second, rhs.second);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          return termEqual(lhs.cond, rhs.cond) &&
                 termEqual(lhs.thenBranch, rhs.thenBranch) &&
                 termEqual(lhs.elseBranch, rhs.elseBranch);
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          return lhs.bound == rhs.bound && termEqual(lhs.body, rhs.body);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return termEqual(lhs.left, rhs.left) && termEqual(lhs.right, rhs.right);
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          return lhs.index == rhs.index && termEqual(lhs.inner, rhs.inner);
        } else if constexpr (std::is_same_v<T, Term::Tool>) {
          return lhs.toolId == rhs.toolId;
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          if (!termEqual(lhs.classifier, rhs.classifier)) return false;
          if (lhs.branches.size() != rhs.branches.size()) return false;
          for (size_t i = 0; i < lhs.branches.size(); ++i) {
            if (lhs.branches[i].first != rhs.branches[i].first) return false;
            if (!termEqual(lhs.branches[i].second, rhs.branches[i].second))
              return false;
          }
          return termEqual(lhs.defaultBranch, rhs.defaultBranch);
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          return termEqual(lhs.inner, rhs.inner) &&
                 predicateEqual(lhs.predicate, rhs.predicate);
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          return termEqual(lhs.inner, rhs.inner) && lhs.store == rhs.store;
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          return lhs.p == rhs.p && termEqual(lhs.left, rhs.left) &&
                 termEqual(lhs.right, rhs.right);
        } else if constexpr (std::is_same_v<T, Term::LamOracle>) {
          return lhs.prompt == rhs.prompt && lhs.params == rhs.params;
        } else {
          return lhs.text == rhs.text;
        }
      },
      a.node);
}

inline bool termEqual(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

template <typename NodeT>
const NodeT* termAs(const TermPtr& t) {
  if (!t) return nullptr;
  return std::get_if<NodeT>(&t->node);
}

}  // namespace lambdagent
