#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lambdagent/oracle.hpp"
#include "lambdagent/store.hpp"
#include "lambdagent/subst.hpp"
#include "lambdagent/toolreg.hpp"
#include "lambdagent/trace.hpp"
#include "lambdagent/typecheck.hpp"

namespace lambdagent {

/// Injected, monotone seconds counter. Evaluation never consults wall time.
struct LogicalClock {
  std::uint64_t seconds = 0;
  std::uint64_t now() const { return seconds; }
  void advance(std::uint64_t s) { seconds += s; }
};

/// Result of an evaluation. A guard failure is the only outcome a
/// well-typed, exhaustively-dispatched program can produce besides Ok.
struct Outcome {
  struct Ok {
    ValuePtr value;
    Store finalStore;
  };
  struct GuardStuck {
    PredicatePtr failedPredicate;
    ValuePtr offendingValue;
  };
  struct RouteError {
    std::string unmatchedLabel;
  };
  struct OracleFailure {
    std::string detail;
  };

  using Node = std::variant<Ok, GuardStuck, RouteError, OracleFailure>;
  Node node;

  bool ok() const { return std::holds_alternative<Ok>(node); }
  const Ok& asOk() const { return std::get<Ok>(node); }
};

struct EvalContext {
  EvalContext(OracleProvider& oracleProvider, ToolRegistry registry,
              std::uint64_t seed = 0)
      : oracle(&oracleProvider), tools(std::move(registry)), rngSeed(seed), rng_(seed) {
    for (const auto& [id, sig] : tools.signatures())
      typeContext.toolSignatures[id] = sig;
  }

  OracleProvider* oracle;
  ToolRegistry tools;
  TypeContext typeContext;
  Store store;
  bool storeInstalled = false;
  std::uint64_t rngSeed = 0;
  LogicalClock clock;
  Trace trace;
  std::uint64_t memStepCounter = 0;  // session-wide memory key index

  /// 53-bit uniform draw in [0,1); bit-stable across platforms.
  double drawUniform() {
    return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
  }

  void installStore(const StoreDecl& decl) {
    if (!storeInstalled) {
      store = Store(decl);
      storeInstalled = true;
    }
  }

 private:
  std::mt19937_64 rng_;
};

using StepResult = std::variant<TermPtr, Outcome>;

/// CBV normal forms: literals, abstractions, tools, oracles, pairs of
/// values, and the function formers (comp, if, case, guard, mem, fix).
/// Like an abstraction body, the inside of a function former evaluates
/// when the function is applied, so e.g. a >> b and its desugaring
/// λx. b (a x) resolve probabilistic choices in the same order.
inline bool isValueTerm(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Pair>) {
          return isValueTerm(n.left) && isValueTerm(n.right);
        } else if constexpr (std::is_same_v<T, Term::Var> ||
                             std::is_same_v<T, Term::App> ||
                             std::is_same_v<T, Term::Proj> ||
                             std::is_same_v<T, Term::Prob>) {
          return false;
        } else {
          return true;
        }
      },
      t->node);
}

inline ValuePtr termToValue(const TermPtr& t, const TypeContext& ctx);

/// Phase 2 of the ReAct decomposition. Recognizes `ACTION: <name>` with an
/// optional `ARGS: <text>` line; output without an ACTION line is the final
/// answer by convention and parses as terminate.
inline std::pair<std::string, std::string> parseAction(const std::string& llmOutput) {
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, e - b + 1);
  };
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= llmOutput.size()) {
    std::size_t nl = llmOutput.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(llmOutput.substr(start));
      break;
    }
    lines.push_back(llmOutput.substr(start, nl - start));
    start = nl + 1;
  }
  std::optional<std::size_t> actionLine;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).rfind("ACTION:", 0) == 0) {
      actionLine = i;
      break;
    }
  }
  if (!actionLine) return {"terminate", llmOutput};
  std::string action = trim(trim(lines[*actionLine]).substr(7));
  std::string args;
  for (std::size_t i = *actionLine + 1; i < lines.size(); ++i) {
    std::string t = trim(lines[i]);
    if (t.rfind("ARGS:", 0) == 0) {
      args = trim(t.substr(5));
      break;
    }
  }
  return {action, args};
}

inline std::string formatAction(const std::string& action, const std::string& args) {
  std::string out = "ACTION: " + action;
  if (!args.empty()) out += "\nARGS: " + args;
  return out;
}

namespace detail {

/// Structure of a compiled ReAct loop body:
///   λs:(Str->Str). λx:Str. (case (lam p θ) [l_i => tool[t_i] >> s,
///                                           terminate => tool[terminate]]) x
/// Terms of this shape evaluate through the big-step engine.
struct ReactShape {
  std::string prompt;
  ModelParams params;
  std::vector<std::pair<std::string, std::string>> actionTools;  // label -> tool
};

inline std::optional<ReactShape> matchReactShape(const Term::Fix& fx) {
  const auto* selfAbs = termAs<Term::Abs>(fx.body);
  if (!selfAbs) return std::nullopt;
  const auto* inputAbs = termAs<Term::Abs>(selfAbs->body);
  if (!inputAbs) return std::nullopt;
  const auto* bodyApp = termAs<Term::App>(inputAbs->body);
  if (!bodyApp) return std::nullopt;
  const auto* argVar = termAs<Term::Var>(bodyApp->arg);
  if (!argVar || argVar->name != inputAbs->param) return std::nullopt;
  const auto* dispatch = termAs<Term::Case>(bodyApp->fn);
  if (!dispatch || dispatch->defaultBranch) return std::nullopt;
  const auto* classifier = termAs<Term::LamOracle>(dispatch->classifier);
  if (!classifier) return std::nullopt;

  ReactShape shape;
  shape.prompt = classifier->prompt;
  shape.params = classifier->params;
  for (const auto& [label, branch] : dispatch->branches) {
    if (label == "terminate") {
      // The base case must be the identity; a missing terminate branch is
      // still the ReAct shape (the bound then forces truncation).
      const auto* tl = termAs<Term::Tool>(branch);
      bool identityAbs = false;
      if (const auto* ab = termAs<Term::Abs>(branch)) {
        const auto* v = termAs<Term::Var>(ab->body);
        identityAbs = v && v->name == ab->param;
      }
      if (!(tl && tl->toolId == "terminate") && !identityAbs) return std::nullopt;
      continue;
    }
    const auto* cp = termAs<Term::Comp>(branch);
    if (!cp) return std::nullopt;
    const auto* toolNode = termAs<Term::Tool>(cp->first);
    const auto* selfVar = termAs<Term::Var>(cp->second);
    if (!toolNode || !selfVar || selfVar->name != selfAbs->param) return std::nullopt;
    shape.actionTools.emplace_back(label, toolNode->toolId);
  }
  if (shape.actionTools.empty()) return std::nullopt;
  return shape;
}

}  // namespace detail

/// Big-step ReAct engine: up to maxSteps iterations of the 7-phase loop
/// (Think, Parse, Route, Invoke, Observe, Update, Check). Halts early when
/// the parsed action is terminate; exhausting the bound is a forced
/// truncation that returns the accumulated state.
inline Outcome runReactLoop(
    const std::string& prompt, const ModelParams& params,
    const std::vector<std::pair<std::string, std::string>>& actionTools,
    std::uint32_t maxSteps, const std::optional<StoreDecl>& memory,
    const std::string& input, EvalContext& ctx) {
  if (memory) ctx.installStore(*memory);
  std::string state = input;
  for (std::uint32_t i = 0; i < maxSteps; ++i) {
    ctx.trace.add(TraceEvent::LoopIter{maxSteps - i});

    ctx.trace.add(TraceEvent::Phase{"Think"});
    std::string thought;
    try {
      thought = ctx.oracle->complete(prompt, params, state);
    } catch (const std::exception& e) {
      return Outcome{Outcome::OracleFailure{e.what()}};
    }
    ctx.trace.add(TraceEvent::LlmCall{prompt, state, thought, i});

    ctx.trace.add(TraceEvent::Phase{"Parse"});
    auto [action, args] = parseAction(thought);

    ctx.trace.add(TraceEvent::Phase{"Route"});
    if (action == "terminate") {
      // Halt precedes the memory write: no Update for the final step.
      ctx.trace.add(TraceEvent::Phase{"Check"});
      std::string result = args.empty() ? state : args;
      return Outcome{Outcome::Ok{val::str(result), ctx.store}};
    }
    std::string toolId;
    bool routed = false;
    for (const auto& [label, tool] : actionTools) {
      if (label == action) {
        toolId = tool;
        routed = true;
        break;
      }
    }
    if (!routed) return Outcome{Outcome::RouteError{action}};

    ctx.trace.add(TraceEvent::Phase{"Invoke"});
    std::optional<std::string> output;
    try {
      output = ctx.tools.invoke(toolId, args);
    } catch (const std::exception& e) {
      return Outcome{Outcome::OracleFailure{e.what()}};
    }
    if (!output)
      return Outcome{Outcome::OracleFailure{"tool not registered: " + toolId}};
    ctx.trace.add(TraceEvent::ToolCall{toolId, args, *output});

    ctx.trace.add(TraceEvent::Phase{"Observe"});
    const std::string& observation = *output;

    if (ctx.storeInstalled) {
      ctx.trace.add(TraceEvent::Phase{"Update"});
      std::string key = "step-" + std::to_string(ctx.memStepCounter++);
      std::string summary = thought + " | " + observation;
      if (summary.size() > 512) summary.resize(512);
      if (!ctx.store.write(key, val::str(summary), ctx.clock.now()))
        throw std::logic_error("store typing conflict on engine summary write");
      ctx.trace.add(TraceEvent::MemWrite{key});
    }

    ctx.trace.add(TraceEvent::Phase{"Check"});
    state += "\nObservation: " + observation;
    ctx.clock.advance(1);
  }
  return Outcome{Outcome::Ok{val::str(state), ctx.store}};
}

/// Public form of the engine: action names are tool ids.
inline Outcome runReact(const std::string& prompt, const ModelParams& params,
                        const std::vector<std::string>& tools, std::uint32_t maxSteps,
                        const std::optional<StoreDecl>& memory, const std::string& input,
                        EvalContext& ctx) {
  std::vector<std::pair<std::string, std::string>> actionTools;
  actionTools.reserve(tools.size());
  for (const auto& t : tools) {
    if (t != "terminate") actionTools.emplace_back(t, t);
  }
  return runReactLoop(prompt, params, actionTools, maxSteps, memory, input, ctx);
}

inline StepResult step(const TermPtr& t, EvalContext& ctx);

/// Iterates step until a normal form or a non-Ok outcome.
inline std::variant<TermPtr, Outcome> evalToValue(TermPtr t, EvalContext& ctx) {
  constexpr std::uint64_t kStepBudget = 20'000'000;
  std::uint64_t steps = 0;
  while (!isValueTerm(t)) {
    if (++steps > kStepBudget) throw std::logic_error("evaluation step budget exceeded");
    StepResult r = step(t, ctx);
    if (r.index() == 1) return std::get<1>(r);
    t = std::get<0>(r);
  }
  return t;
}

namespace detail {

inline TypePtr inferredType(const TermPtr& t, EvalContext& ctx, const char* what) {
  InferResult r = infer(ctx.typeContext, t);
  if (!inferOk(r))
    throw std::logic_error(std::string("evaluator met an ill-typed ") + what + ": " +
                           inferError(r).render());
  return inferType(r);
}

inline StepResult applyFunction(const TermPtr& fn, const TermPtr& arg,
                                EvalContext& ctx) {
  return std::visit(
      [&](const auto& n) -> StepResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Abs>) {
          return substitute(n.body, n.param, arg);
        } else if constexpr (std::is_same_v<T, Term::Tool>) {
          const auto* lit = termAs<Term::StrLit>(arg);
          if (!lit) throw std::logic_error("tool applied to a non-string value");
          std::optional<std::string> out;
          try {
            out = ctx.tools.invoke(n.toolId, lit->text);
          } catch (const std::exception& e) {
            return Outcome{Outcome::OracleFailure{e.what()}};
          }
          if (!out)
            return Outcome{Outcome::OracleFailure{"tool not registered: " + n.toolId}};
          ctx.trace.add(TraceEvent::ToolCall{n.toolId, lit->text, *out});
          return term::str(*out);
        } else if constexpr (std::is_same_v<T, Term::LamOracle>) {
          const auto* lit = termAs<Term::StrLit>(arg);
          if (!lit) throw std::logic_error("oracle applied to a non-string value");
          std::string out;
          try {
            out = ctx.oracle->complete(n.prompt, n.params, lit->text);
          } catch (const std::exception& e) {
            return Outcome{Outcome::OracleFailure{e.what()}};
          }
          ctx.trace.add(TraceEvent::LlmCall{n.prompt, lit->text, out,
                                            ctx.trace.llmCalls()});
          return term::str(out);
        } else if constexpr (std::is_same_v<T, Term::Comp>) {
          return term::app(n.second, term::app(n.first, arg));
        } else if constexpr (std::is_same_v<T, Term::Fix>) {
          if (n.bound == 0) return arg;
          if (auto shape = matchReactShape(n)) {
            const auto* lit = termAs<Term::StrLit>(arg);
            if (!lit) throw std::logic_error("react loop applied to a non-string value");
            Outcome out = runReactLoop(shape->prompt, shape->params, shape->actionTools,
                                       n.bound, std::nullopt, lit->text, ctx);
            if (!out.ok()) return out;
            return valueToTerm(out.asOk().value);
          }
          ctx.trace.add(TraceEvent::LoopIter{n.bound});
          TypePtr argType = inferredType(arg, ctx, "fix argument");
          std::string x = freshName("x");
          TermPtr selfRef = term::abs(
              x, eraseRefinements(argType),
              term::app(term::fix(n.bound - 1, n.body), term::var(x)));
          return term::app(term::app(n.body, selfRef), arg);
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          return term::pair(term::app(n.left, arg), term::app(n.right, arg));
        } else if constexpr (std::is_same_v<T, Term::Case>) {
          auto classified = evalToValue(term::app(n.classifier, arg), ctx);
          if (classified.index() == 1) return std::get<1>(classified);
          const auto* lit = termAs<Term::StrLit>(std::get<0>(classified));
          if (!lit) throw std::logic_error("classifier produced a non-label value");
          for (const auto& [label, branch] : n.branches) {
            if (label == lit->text) return term::app(branch, arg);
          }
          if (n.defaultBranch) return term::app(n.defaultBranch, arg);
          return Outcome{Outcome::RouteError{lit->text}};
        } else if constexpr (std::is_same_v<T, Term::Guard>) {
          auto checked = evalToValue(term::app(n.inner, arg), ctx);
          if (checked.index() == 1) return std::get<1>(checked);
          TermPtr resultTerm = std::get<0>(checked);
          const auto* lit = termAs<Term::StrLit>(resultTerm);
          if (!lit) throw std::logic_error("guard checked a non-string value");
          bool passed = evalPredicate(n.predicate, lit->text);
          ctx.trace.add(TraceEvent::GuardCheck{n.predicate, passed});
          if (!passed)
            return Outcome{Outcome::GuardStuck{n.predicate, val::str(lit->text)}};
          return resultTerm;
        } else if constexpr (std::is_same_v<T, Term::Mem>) {
          ctx.installStore(n.store);
          return term::app(n.inner, arg);
        } else if constexpr (std::is_same_v<T, Term::If>) {
          auto condOut = evalToValue(term::app(n.cond, arg), ctx);
          if (condOut.index() == 1) return std::get<1>(condOut);
          const auto* lit = termAs<Term::StrLit>(std::get<0>(condOut));
          if (!lit) throw std::logic_error("condition produced a non-string value");
          return term::app(lit->text == "true" ? n.thenBranch : n.elseBranch, arg);
        } else {
          throw std::logic_error("applied a non-function value");
        }
      },
      fn->node);
}

}  // namespace detail

/// Performs one outermost reduction on a closed, well-typed term.
/// Premise evaluations (classifier, guard body, condition) run to a value
/// inside the corresponding rule. Stepping a value is a contract violation.
inline StepResult step(const TermPtr& t, EvalContext& ctx) {
  return std::visit(
      [&](const auto& n) -> StepResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          throw std::logic_error("cannot step an open term");
        } else if constexpr (std::is_same_v<T, Term::App>) {
          // A probabilistic choice in function position resolves once its
          // argument is a value, exactly where a >> chain would resolve it,
          // so seeded runs agree across extensionally equal pipelines.
          const bool fnIsChoice = std::holds_alternative<Term::Prob>(n.fn->node);
          if (!isValueTerm(n.fn) && !fnIsChoice) {
            StepResult r = step(n.fn, ctx);
            if (r.index() == 1) return r;
            return term::app(std::get<0>(r), n.arg);
          }
          if (!isValueTerm(n.arg)) {
            StepResult r = step(n.arg, ctx);
            if (r.index() == 1) return r;
            return term::app(n.fn, std::get<0>(r));
          }
          if (fnIsChoice) {
            StepResult r = step(n.fn, ctx);  // E-Prob on the callee
            if (r.index() == 1) return r;
            return term::app(std::get<0>(r), n.arg);
          }
          return detail::applyFunction(n.fn, n.arg, ctx);
        } else if constexpr (std::is_same_v<T, Term::Proj>) {
          if (!isValueTerm(n.inner)) {
            StepResult r = step(n.inner, ctx);
            if (r.index() == 1) return r;
            return term::proj(n.index, std::get<0>(r));
          }
          const auto* p = termAs<Term::Pair>(n.inner);
          if (!p) throw std::logic_error("projection from a non-pair value");
          return n.index == 1 ? p->left : p->right;
        } else if constexpr (std::is_same_v<T, Term::Prob>) {
          double u = ctx.drawUniform();
          bool left = u < n.p;
          ctx.trace.add(TraceEvent::ProbChoice{left ? "left" : "right", n.p, ctx.rngSeed});
          return left ? n.left : n.right;
        } else if constexpr (std::is_same_v<T, Term::Pair>) {
          if (!isValueTerm(n.left)) {
            StepResult r = step(n.left, ctx);
            if (r.index() == 1) return r;
            return term::pair(std::get<0>(r), n.right);
          }
          StepResult r = step(n.right, ctx);
          if (r.index() == 1) return r;
          return term::pair(n.left, std::get<0>(r));
        } else {
          // Literals and function formers are normal forms.
          throw std::logic_error("cannot step a value");
        }
      },
      t->node);
}

/// Converts a normal-form term into a runtime value. Function formers that
/// are not syntactic abstractions are eta-wrapped into closures.
inline ValuePtr termToValue(const TermPtr& t, const TypeContext& ctx) {
  if (const auto* s = termAs<Term::StrLit>(t)) return val::str(s->text);
  if (const auto* a = termAs<Term::Abs>(t)) return val::closure(a->param, a->paramType, a->body);
  if (const auto* p = termAs<Term::Pair>(t))
    return val::pair(termToValue(p->left, ctx), termToValue(p->right, ctx));
  if (const auto* f = termAs<Term::Tool>(t)) return val::tool(f->toolId);
  if (const auto* o = termAs<Term::LamOracle>(t)) return val::oracle(o->prompt, o->params);
  InferResult r = infer(ctx, t);
  if (inferOk(r)) {
    if (const auto* arrow = std::get_if<Type::Arrow>(&inferType(r)->node)) {
      std::string x = freshName("x");
      return val::closure(x, arrow->dom, term::app(t, term::var(x)));
    }
  }
  throw std::logic_error("normal form is not a value: " + prettyPrintLambda(t));
}

/// Applies t (a function term) to the input and evaluates to an Outcome.
/// The trace is appended in place; Prob draws use the context's seed.
inline Outcome reduce(const TermPtr& t, const ValuePtr& input, EvalContext& ctx) {
  auto out = evalToValue(term::app(t, valueToTerm(input)), ctx);
  if (out.index() == 1) return std::get<1>(out);
  return Outcome{Outcome::Ok{termToValue(std::get<0>(out), ctx.typeContext), ctx.store}};
}

inline Outcome reduce(const TermPtr& t, const std::string& input, EvalContext& ctx) {
  return reduce(t, val::str(input), ctx);
}

}  // namespace lambdagent
