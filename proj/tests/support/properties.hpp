#pragma once

// Executable forms of the metatheory, shared between the unit suite (small
// N) and the acceptance suite (full N).

#include <sstream>
#include <string>

#include "lambdagent/cost.hpp"
#include "lambdagent/eval.hpp"
#include "support/generators.hpp"

namespace lambdagent::testsupport {

struct PropertyResult {
  bool ok = true;
  std::size_t checked = 0;
  std::string detail;

  void fail(const std::string& what) {
    if (ok) {
      ok = false;
      detail = what;
    }
  }
};

inline FunctionOracle fuzzOracle() {
  return FunctionOracle([](const std::string& prompt, const std::string& input) {
    // Deterministic, input-dependent, bounded-size output.
    std::size_t h = std::hash<std::string>{}(prompt) * 31 ^ std::hash<std::string>{}(input);
    return "o" + std::to_string(h % 997);
  });
}

inline std::string outcomeSignature(const Outcome& out) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Outcome::Ok>) {
          return "ok:" + prettyPrintLambda(valueToTerm(n.value));
        } else if constexpr (std::is_same_v<T, Outcome::GuardStuck>) {
          return "guard:" + printPredicate(n.failedPredicate) + ":" +
                 prettyPrintLambda(valueToTerm(n.offendingValue));
        } else if constexpr (std::is_same_v<T, Outcome::RouteError>) {
          return "route:" + n.unmatchedLabel;
        } else {
          return "oracle:" + n.detail;
        }
      },
      out.node);
}

/// fix_n makes at most n unfoldings, for every generated body, bound and
/// input.
inline PropertyResult checkTermination(std::size_t cases, std::uint64_t seed) {
  PropertyResult result;
  TermGen gen(seed);
  gen.allowFix(false);  // a single fix per program; LoopIter counts are its own
  auto oracle = fuzzOracle();
  for (std::size_t i = 0; i < cases; ++i) {
    std::uint32_t bound = static_cast<std::uint32_t>(gen.natBelow(33));
    TermPtr body = gen.fixBody({}, 2);
    std::string input = gen.word();
    EvalContext ctx(oracle, builtinToolRegistry(), seed + i);
    Outcome out = reduce(term::fix(bound, body), input, ctx);
    ++result.checked;
    if (!out.ok() && !std::holds_alternative<Outcome::GuardStuck>(out.node)) {
      result.fail("unexpected outcome " + outcomeSignature(out));
      break;
    }
    if (ctx.trace.loopIters() > bound) {
      result.fail("fix_" + std::to_string(bound) + " made " +
                  std::to_string(ctx.trace.loopIters()) + " unfoldings: " +
                  prettyPrintLambda(body));
      break;
    }
  }
  return result;
}

/// Progress + preservation, executable form: a well-typed closed term steps
/// to a value or a guard failure, and re-inference after every step agrees
/// with the original type modulo refinement erasure, under a store typing
/// that extends the initial one.
inline PropertyResult checkProgressPreservation(std::size_t cases, std::uint64_t seed) {
  PropertyResult result;
  TermGen gen(seed);
  auto oracle = fuzzOracle();
  for (std::size_t i = 0; i < cases; ++i) {
    auto [program, declaredType] = gen.closedProgram(3);
    EvalContext ctx(oracle, builtinToolRegistry(), seed + i);
    InferResult first = infer(ctx.typeContext, program);
    if (!inferOk(first)) {
      result.fail("generated term does not typecheck: " + inferError(first).render() +
                  " in " + prettyPrintLambda(program));
      break;
    }
    TypePtr erased = eraseRefinements(inferType(first));
    StoreTyping initialSigma = ctx.typeContext.storeTyping;

    TermPtr t = program;
    std::size_t budget = 100000;
    bool failed = false;
    while (!isValueTerm(t)) {
      if (budget-- == 0) {
        result.fail("step budget exhausted on " + prettyPrintLambda(program));
        failed = true;
        break;
      }
      StepResult r = step(t, ctx);
      if (r.index() == 1) {
        const Outcome& out = std::get<1>(r);
        if (!std::holds_alternative<Outcome::GuardStuck>(out.node)) {
          result.fail("stuck in a non-guard state: " + outcomeSignature(out) +
                      " from " + prettyPrintLambda(program));
          failed = true;
        }
        break;
      }
      t = std::get<0>(r);
      InferResult again = infer(ctx.typeContext, t);
      if (!inferOk(again)) {
        result.fail("preservation: intermediate term does not typecheck: " +
                    inferError(again).render() + " in " + prettyPrintLambda(t));
        failed = true;
        break;
      }
      if (!typeEqual(eraseRefinements(inferType(again)), erased)) {
        result.fail("preservation: type changed from " + printType(erased) + " to " +
                    printType(inferType(again)));
        failed = true;
        break;
      }
      if (!ctx.store.typing().extends(initialSigma)) {
        result.fail("store typing shrank during evaluation");
        failed = true;
        break;
      }
    }
    ++result.checked;
    if (failed) break;
  }
  return result;
}

/// Pipeline algebra: >> is associative with id as identity, up to exact
/// outcome equality under a deterministic oracle.
inline PropertyResult checkMonoidLaws(std::size_t cases, std::uint64_t seed) {
  PropertyResult result;
  TermGen gen(seed);
  auto oracle = fuzzOracle();
  auto runOn = [&](const TermPtr& t, const std::string& input,
                   std::uint64_t runSeed) {
    EvalContext ctx(oracle, builtinToolRegistry(), runSeed);
    return outcomeSignature(reduce(t, input, ctx));
  };
  for (std::size_t i = 0; i < cases; ++i) {
    TermPtr a = gen.functionOfType(ty::str(), ty::str(), {}, 2);
    TermPtr b = gen.functionOfType(ty::str(), ty::str(), {}, 2);
    TermPtr c = gen.functionOfType(ty::str(), ty::str(), {}, 2);
    std::string input = gen.word();
    std::uint64_t runSeed = seed + i;

    std::string leftAssoc = runOn(term::comp(term::comp(a, b), c), input, runSeed);
    std::string rightAssoc = runOn(term::comp(a, term::comp(b, c)), input, runSeed);
    if (leftAssoc != rightAssoc) {
      result.fail("associativity: " + leftAssoc + " != " + rightAssoc);
      ++result.checked;
      break;
    }

    TermPtr id = term::identity();
    std::string plain = runOn(a, input, runSeed);
    std::string rightId = runOn(term::comp(a, id), input, runSeed);
    std::string leftId = runOn(term::comp(id, a), input, runSeed);
    if (plain != rightId || plain != leftId) {
      result.fail("identity: " + plain + " vs " + rightId + " vs " + leftId);
      ++result.checked;
      break;
    }
    ++result.checked;
  }
  return result;
}

/// Observed oracle calls never exceed the static prediction; fixed-iteration
/// (always-recursing) bodies are exercised elsewhere for tightness.
inline PropertyResult checkCostSoundness(std::size_t cases, std::uint64_t seed) {
  PropertyResult result;
  TermGen gen(seed);
  auto oracle = fuzzOracle();
  for (std::size_t i = 0; i < cases; ++i) {
    std::uint32_t bound = static_cast<std::uint32_t>(gen.natBelow(8));
    TermPtr program = term::fix(bound, gen.fixBody({}, 2));
    std::uint64_t predicted = predictedCalls(program);
    EvalContext ctx(oracle, builtinToolRegistry(), seed + i);
    Outcome out = reduce(program, gen.word(), ctx);
    ++result.checked;
    if (!out.ok() && !std::holds_alternative<Outcome::GuardStuck>(out.node)) {
      result.fail("unexpected outcome " + outcomeSignature(out));
      break;
    }
    if (ctx.trace.oracleCalls() > predicted) {
      result.fail("observed " + std::to_string(ctx.trace.oracleCalls()) +
                  " oracle calls, predicted max " + std::to_string(predicted) + ": " +
                  prettyPrintLambda(program));
      break;
    }
  }
  return result;
}

/// Substitution lemma, syntax level: for closed v, typechecking after
/// substitution matches typechecking under the extended context.
inline PropertyResult checkSubstitutionLemma(std::size_t cases, std::uint64_t seed) {
  PropertyResult result;
  TermGen gen(seed);
  ToolRegistry registry = builtinToolRegistry();
  TypeContext base;
  for (const auto& [id, sig] : registry.signatures()) base.toolSignatures[id] = sig;
  for (std::size_t i = 0; i < cases; ++i) {
    TypePtr holeType = gen.type(2);
    TermPtr replacement = gen.valueOfType(holeType, {}, 2);
    TermPtr body = gen.termOfType(gen.type(2), {{"hole", holeType}}, 3);

    InferResult direct = infer(base, substitute(body, "hole", replacement));
    InferResult contextual = infer(base.withVar("hole", holeType), body);
    ++result.checked;
    if (!inferOk(direct) || !inferOk(contextual)) {
      result.fail("substitution lemma: inference failed");
      break;
    }
    if (!typeEqual(eraseRefinements(inferType(direct)),
                   eraseRefinements(inferType(contextual)))) {
      result.fail("substitution lemma: " + printType(inferType(direct)) + " vs " +
                  printType(inferType(contextual)));
      break;
    }
  }
  return result;
}

}  // namespace lambdagent::testsupport
