#pragma once

#include <string>
#include <variant>
#include <vector>

#include "lambdagent/config.hpp"
#include "lambdagent/term.hpp"
#include "lambdagent/typecheck.hpp"

namespace lambdagent {

struct CompileError {
  std::string path;
  std::string message;

  std::string render() const {
    return (path.empty() ? std::string("<root>") : path) + ": " + message;
  }
};

using CompileResult = std::variant<TermPtr, CompileError>;

inline bool compileOk(const CompileResult& r) { return r.index() == 0; }
inline const TermPtr& compiledTerm(const CompileResult& r) { return std::get<0>(r); }
inline const CompileError& compileError(const CompileResult& r) { return std::get<1>(r); }

namespace detail {

inline bool frameworkProvidesDefaultModel(FrameworkKind k) {
  return k == FrameworkKind::CrewAI;  // the runtime falls back to a built-in LLM
}

/// A stage that is a bare tool reference compiles to tool[f] directly.
inline bool isToolStage(const CanonicalConfig& c) {
  return c.agentType == AgentType::Simple && c.tools.size() == 1 && !c.model &&
         !c.systemPrompt;
}

inline std::variant<ModelParams, CompileError> oracleParams(const CanonicalConfig& c,
                                                            const std::string& path) {
  if (c.model) return *c.model;
  if (frameworkProvidesDefaultModel(c.framework))
    return ModelParams{"framework-default", 0.0};
  return CompileError{path.empty() ? "model" : path + ".model", "agent without model"};
}

inline CompileResult compileRec(const CanonicalConfig& c, const std::string& path,
                                bool memAbove);

inline CompileResult wrapAgent(const CanonicalConfig& c, TermPtr base,
                               const std::string& path, bool memAbove) {
  if (c.guard) base = term::guard(base, c.guard);
  if (c.memory) {
    if (memAbove)
      return CompileError{path.empty() ? "memory" : path + ".memory",
                          "nested mem: an enclosing agent already declares memory"};
    base = term::mem(base, StoreDecl{c.memory->size, c.memory->ttl});
  }
  return base;
}

inline CompileResult compileRec(const CanonicalConfig& c, const std::string& path,
                                bool memAbove) {
  bool memHere = memAbove || c.memory.has_value();
  auto sub = [&](const std::string& seg) {
    return path.empty() ? seg : path + "." + seg;
  };

  TermPtr base;
  switch (c.agentType) {
    case AgentType::Simple: {
      if (isToolStage(c)) {
        base = term::tool(c.tools[0]);
        break;
      }
      auto params = oracleParams(c, path);
      if (params.index() == 1) return std::get<1>(params);
      base = term::lamOracle(c.systemPrompt.value_or(""), std::get<0>(params));
      break;
    }
    case AgentType::React: {
      std::vector<std::string> tools = c.allTools();
      auto params = oracleParams(c, path);
      if (params.index() == 1) return std::get<1>(params);
      if (tools.empty()) {
        // No tools means no dispatch and no loop: a single oracle call.
        base = term::lamOracle(c.systemPrompt.value_or(""), std::get<0>(params));
        break;
      }
      std::vector<Term::Branch> branches;
      branches.reserve(tools.size());
      for (const std::string& toolId : tools) {
        if (toolId == "terminate") {
          branches.emplace_back("terminate", term::tool("terminate"));
        } else {
          branches.emplace_back(toolId,
                                term::comp(term::tool(toolId), term::var("s")));
        }
      }
      TermPtr body = term::abs(
          "s", ty::arrow(ty::str(), ty::str()),
          term::abs("x", ty::str(),
                    term::app(term::caseOf(term::lamOracle(
                                               c.systemPrompt.value_or(""),
                                               std::get<0>(params)),
                                           std::move(branches)),
                              term::var("x"))));
      base = term::fix(c.maxSteps.value_or(10), body);
      break;
    }
    case AgentType::Chain: {
      if (c.stages.empty())
        return CompileError{sub("stages"), "chain without stages"};
      std::vector<TermPtr> compiled;
      compiled.reserve(c.stages.size());
      for (std::size_t i = 0; i < c.stages.size(); ++i) {
        CompileResult r =
            compileRec(c.stages[i], sub("stages[" + std::to_string(i) + "]"), memHere);
        if (!compileOk(r)) return r;
        compiled.push_back(compiledTerm(r));
      }
      base = compiled.back();
      for (std::size_t i = compiled.size() - 1; i-- > 0;)
        base = term::comp(compiled[i], base);
      break;
    }
    case AgentType::Router: {
      auto params = oracleParams(c, path);
      if (params.index() == 1) return std::get<1>(params);
      std::string prompt;
      if (c.systemPrompt) prompt = *c.systemPrompt + "\n";
      prompt += "Classify the input. Reply with exactly one of:";
      for (const auto& [label, _] : c.routes) prompt += " " + label;
      TermPtr classifier = term::lamOracle(prompt, std::get<0>(params));
      std::vector<Term::Branch> branches;
      branches.reserve(c.routes.size());
      for (const auto& [label, routeCfg] : c.routes) {
        CompileResult r = compileRec(routeCfg, sub("routes[" + label + "]"), memHere);
        if (!compileOk(r)) return r;
        branches.emplace_back(label, compiledTerm(r));
      }
      TermPtr defaultBranch;
      if (!c.routeDefault.empty()) {
        CompileResult r = compileRec(c.routeDefault[0], sub("routes[default]"), memHere);
        if (!compileOk(r)) return r;
        defaultBranch = compiledTerm(r);
      }
      base = term::caseOf(classifier, std::move(branches), defaultBranch);
      break;
    }
    case AgentType::Parallel: {
      if (c.branches.empty())
        return CompileError{sub("branches"), "parallel without branches"};
      std::vector<TermPtr> compiled;
      compiled.reserve(c.branches.size());
      for (std::size_t i = 0; i < c.branches.size(); ++i) {
        CompileResult r = compileRec(c.branches[i],
                                     sub("branches[" + std::to_string(i) + "]"), memHere);
        if (!compileOk(r)) return r;
        compiled.push_back(compiledTerm(r));
      }
      base = compiled.back();
      for (std::size_t i = compiled.size() - 1; i-- > 0;)
        base = term::pair(compiled[i], base);
      break;
    }
  }
  return wrapAgent(c, base, path, memAbove);
}

}  // namespace detail

/// Translation: simple -> lam, react -> fix_n, chain -> composition,
/// router -> case, parallel -> pair fan; guard then mem wrap the result,
/// mem outermost. Structurally recursive over subconfigurations.
inline CompileResult compile(const CanonicalConfig& c) {
  return detail::compileRec(c, "", false);
}

/// Every tool id declared anywhere in the configuration tree.
inline void collectDeclaredTools(const CanonicalConfig& c,
                                 std::vector<std::string>& out) {
  for (const auto& id : c.allTools()) out.push_back(id);
  for (const auto& sub : c.stages) collectDeclaredTools(sub, out);
  for (const auto& [_, sub] : c.routes) collectDeclaredTools(sub, out);
  for (const auto& sub : c.routeDefault) collectDeclaredTools(sub, out);
  for (const auto& sub : c.branches) collectDeclaredTools(sub, out);
}

/// Declares Str -> Str signatures for every tool the configuration names,
/// so compiled terms typecheck without a live registry.
inline void applyConfigToolSignatures(TypeContext& ctx, const CanonicalConfig& c) {
  std::vector<std::string> tools;
  collectDeclaredTools(c, tools);
  for (const auto& id : tools) {
    if (!ctx.toolSignatures.count(id)) ctx.toolSignatures[id] = {ty::str(), ty::str()};
  }
}

}  // namespace lambdagent
