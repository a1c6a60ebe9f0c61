#include <doctest.h>

#include <set>
#include <string>

#include "lambdagent/fault.hpp"
#include "lambdagent/lint.hpp"

using namespace lambdagent;

namespace {

const std::string kFixtures = LAMBDAGENT_FIXTURES_DIR;

CanonicalConfig loadFixture(const std::string& rel) {
  return loadCanonicalConfig(kFixtures + "/" + rel);
}

std::multiset<std::string> ruleIds(const std::vector<LintFinding>& findings) {
  std::multiset<std::string> out;
  for (const auto& f : findings) out.insert(f.ruleId);
  return out;
}

std::vector<CanonicalConfig> shippedBaselines() {
  std::vector<CanonicalConfig> out;
  for (int i = 1; i <= 10; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "baselines/b%02d_", i);
    for (const char* suffix :
         {"react_coder.yaml", "react_support.yaml", "simple_writer.yaml",
          "chain_research.yaml", "chain_pipeline.yaml", "parallel_panel.yaml",
          "parallel_fanout.yaml", "router_frontdesk.yaml", "router_dispatch.yaml",
          "multiagent_team.yaml"}) {
      std::string candidate = std::string(name) + suffix;
      std::ifstream probe(kFixtures + "/" + candidate);
      if (probe) {
        out.push_back(loadFixture(candidate));
        break;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("the CrewAI analyst lints to exactly L004c INFO and L017 WARN") {
  auto findings = lint(loadFixture("configs/crewai_analyst.yaml"));
  REQUIRE(findings.size() == 2);
  CHECK(findings[0].ruleId == "L004c");
  CHECK(findings[0].severity == Severity::Info);
  CHECK(findings[0].path == "mcp.localTools");
  REQUIRE(findings[0].mitigation.has_value());
  CHECK(*findings[0].mitigation == "CrewAI: handled by framework");
  CHECK(findings[1].ruleId == "L017");
  CHECK(findings[1].severity == Severity::Warn);
  CHECK(findings[1].path == "react.maxSteps");
}

TEST_CASE("the CrewAI analyst renders as the two-finding CLI block") {
  auto findings = lint(loadFixture("configs/crewai_analyst.yaml"));
  CHECK(renderFindingsHuman(findings) ==
        "ERROR L004c  mcp.localTools: no terminate tool\n"
        "             (CrewAI: handled by framework) -> INFO\n"
        "WARN  L017   react.maxSteps: not specified\n");
  CHECK(lintExitCode(findings) == 1);
}

TEST_CASE("the fully specified react config has no ERROR findings") {
  auto findings = lint(loadFixture("configs/seecoder_react.yaml"));
  CHECK_FALSE(hasErrorFindings(findings));
  CHECK(lintExitCode(findings) == 0);
}

TEST_CASE("removing terminate raises L004a") {
  CanonicalConfig c = loadFixture("configs/seecoder_react.yaml");
  c.tools.clear();  // localTools: [terminate] removed
  auto ids = ruleIds(lint(c));
  CHECK(ids.count("L004a") == 1);
}

TEST_CASE("maxSteps 0 raises L003") {
  CanonicalConfig c = loadFixture("configs/seecoder_react.yaml");
  c.maxSteps = 0;
  auto findings = lint(c);
  auto ids = ruleIds(findings);
  CHECK(ids.count("L003") == 1);
  CHECK(ids.count("L017") == 0);
}

TEST_CASE("router rules: empty routes is an error, missing default a warning") {
  CanonicalConfig c = loadFixture("configs/router_support.yaml");

  CanonicalConfig noRoutes = c;
  noRoutes.routes.clear();
  noRoutes.routeDefault.clear();
  CHECK(ruleIds(lint(noRoutes)).count("L005") == 1);

  CanonicalConfig noDefault = c;
  noDefault.routeDefault.clear();
  auto ids = ruleIds(lint(noDefault));
  CHECK(ids.count("L013") == 1);
  CHECK(ids.count("L005") == 0);
}

TEST_CASE("L001 fires for empty and missing prompts alike") {
  CanonicalConfig c;
  c.agentType = AgentType::Simple;
  c.model = ModelParams{"m", 0.0};
  CHECK(ruleIds(lint(c)).count("L001") == 1);
  c.systemPrompt = "";
  CHECK(ruleIds(lint(c)).count("L001") == 1);
  c.systemPrompt = "real prompt";
  CHECK(ruleIds(lint(c)).count("L001") == 0);
}

TEST_CASE("L002 fires for missing models except under framework defaults") {
  CanonicalConfig c;
  c.agentType = AgentType::Simple;
  c.systemPrompt = "p";
  CHECK(ruleIds(lint(c)).count("L002") == 1);

  c.framework = FrameworkKind::CrewAI;
  CHECK(ruleIds(lint(c)).count("L002") == 0);
}

TEST_CASE("L004 severity stratification across termination hints") {
  CanonicalConfig c;
  c.agentType = AgentType::React;
  c.systemPrompt = "p";
  c.model = ModelParams{"m", 0.0};
  c.maxSteps = 5;
  c.tools = {"search"};  // no terminate

  auto familyFinding = [&](const TerminationHints& hints) {
    CanonicalConfig probe = c;
    probe.terminationHints = hints;
    for (const auto& f : lint(probe)) {
      if (f.ruleId.rfind("L004", 0) == 0) return f;
    }
    FAIL("no L004 family finding");
    return LintFinding{};
  };

  CHECK(familyFinding({}).ruleId == "L004a");
  CHECK(familyFinding({}).severity == Severity::Error);

  LintFinding bounded = familyFinding({{HintKind::MaxIter, 5}});
  CHECK(bounded.ruleId == "L004b");
  CHECK(bounded.severity == Severity::Warn);

  LintFinding internal = familyFinding({{HintKind::FrameworkInternal, 1}});
  CHECK(internal.ruleId == "L004c");
  CHECK(internal.severity == Severity::Info);

  LintFinding msg = familyFinding({{HintKind::IsTerminationMsg, 1}});
  CHECK(msg.ruleId == "L004d");
  CHECK(msg.severity == Severity::Info);

  // Monotonicity: adding hints never increases the severity.
  std::vector<TerminationHints> ladder = {
      {},
      {{HintKind::MaxIter, 5}},
      {{HintKind::MaxIter, 5}, {HintKind::IsTerminationMsg, 1}},
      {{HintKind::MaxIter, 5}, {HintKind::IsTerminationMsg, 1},
       {HintKind::FrameworkInternal, 1}},
  };
  Severity last = Severity::Error;
  for (const auto& hints : ladder) {
    Severity s = familyFinding(hints).severity;
    CHECK(static_cast<int>(s) >= static_cast<int>(last));
    last = s;
  }
}

TEST_CASE("AutoGen termination matching downgrades to L004d") {
  auto ids = ruleIds(lint(loadFixture("configs/autogen_assistant.json")));
  CHECK(ids.count("L004d") == 1);
  CHECK(ids.count("L004a") == 0);
  CHECK(ids.count("L002") == 0);
}

TEST_CASE("L021 guards multi-agent loops without bounds") {
  CanonicalConfig c = loadFixture("configs/multiagent_group.yaml");
  CHECK(ruleIds(lint(c)).count("L021") == 0);
  c.terminationHints.erase(HintKind::MaxRounds);
  CHECK(ruleIds(lint(c)).count("L021") == 1);
}

TEST_CASE("lint recurses into subconfigurations with path prefixes") {
  CanonicalConfig c = loadFixture("baselines/b04_chain_research.yaml");
  c.stages[0].systemPrompt = "";
  auto findings = lint(c);
  bool found = false;
  for (const auto& f : findings) {
    if (f.ruleId == "L001") {
      found = true;
      CHECK(f.path == "stages[0].systemPrompt");
    }
  }
  CHECK(found);
}

TEST_CASE("lint output is deterministic and sorted") {
  CanonicalConfig c = loadFixture("configs/crewai_analyst.yaml");
  auto a = lint(c);
  auto b = lint(c);
  CHECK(renderFindingsStructured(a) == renderFindingsStructured(b));
}

TEST_CASE("rule catalog has unique ids and stable coverage") {
  std::set<std::string> ids;
  for (const auto& rule : ruleCatalog()) CHECK(ids.insert(rule.id).second);
  for (const char* id : {"L001", "L002", "L003", "L004a", "L004b", "L004c", "L004d",
                         "L005", "L013", "L017", "L021"}) {
    const RuleDescriptor* rule = findRule(id);
    REQUIRE(rule != nullptr);
    CHECK(rule->implemented);
  }
  // Reserved ids stay reserved so the id space never shifts.
  for (const char* id : {"L006", "L023"}) {
    const RuleDescriptor* rule = findRule(id);
    REQUIRE(rule != nullptr);
    CHECK_FALSE(rule->implemented);
  }
}

TEST_CASE("summarize aggregates counts and percentages") {
  LintSummary empty = summarize({});
  CHECK(empty.totalConfigs == 0);
  CHECK(empty.configsWithError == 0);

  std::vector<std::vector<LintFinding>> two(2);
  two[0].push_back({"L001", Severity::Error, "systemPrompt", "m", std::nullopt});
  LintSummary s = summarize(two);
  CHECK(s.totalConfigs == 2);
  CHECK(s.configsWithError == 1);
  CHECK(s.errorPct() == doctest::Approx(50.0));
  CHECK(s.cleanConfigs == 1);
  CHECK(s.perRule.at("L001") == 1);
}

// ---------------------------------------------------------------------------
// Fault harness

TEST_CASE("inject mutates a single field") {
  CanonicalConfig baseline = loadFixture("configs/seecoder_react.yaml");
  auto zeroed = inject(baseline, FaultKind::ZeroMaxSteps);
  REQUIRE(zeroed.has_value());
  CHECK(zeroed->maxSteps == 0);
  CanonicalConfig compare = *zeroed;
  compare.maxSteps = baseline.maxSteps;
  CHECK(compare == baseline);
}

TEST_CASE("inject reports inapplicable targets") {
  CanonicalConfig simple = loadFixture("baselines/b03_simple_writer.yaml");
  CHECK_FALSE(inject(simple, FaultKind::RemoveTerminate).has_value());
  CHECK_FALSE(inject(simple, FaultKind::ZeroMaxSteps).has_value());
  CHECK_FALSE(inject(simple, FaultKind::EmptyRoutes).has_value());
  CHECK(inject(simple, FaultKind::EmptySystemPrompt).has_value());
}

TEST_CASE("inject empties router routes") {
  CanonicalConfig router = loadFixture("configs/router_support.yaml");
  auto mutated = inject(router, FaultKind::EmptyRoutes);
  REQUIRE(mutated.has_value());
  CHECK(mutated->routes.empty());
  CHECK(ruleIds(lint(*mutated)).count("L005") == 1);
}

TEST_CASE("single react baseline x zero-max-steps detects one of one") {
  auto report = runMatrix({loadFixture("baselines/b01_react_coder.yaml")},
                          {FaultKind::ZeroMaxSteps});
  CHECK(report.injected == 1);
  CHECK(report.detected == 1);
  CHECK(report.skippedInapplicable == 0);
}

TEST_CASE("empty baseline set yields an all-zero report") {
  auto report = runMatrix({}, allFaultKinds());
  CHECK(report.injected == 0);
  CHECK(report.detected == 0);
  CHECK(report.skippedInapplicable == 0);
  CHECK(report.falsePositivesOnBaselines == 0);
}

TEST_CASE("unclean baselines are a setup error") {
  CanonicalConfig broken;
  broken.agentType = AgentType::Simple;  // no prompt, no model
  CHECK_THROWS_AS(runMatrix({broken}, allFaultKinds()), std::invalid_argument);
}

TEST_CASE("shipped baseline matrix reproduces the 42/8 split at full recall") {
  auto baselines = shippedBaselines();
  REQUIRE(baselines.size() == 10);
  auto report = runMatrix(baselines, allFaultKinds());
  CHECK(report.injected == 42);
  CHECK(report.detected == 42);
  CHECK(report.skippedInapplicable == 8);
  CHECK(report.falsePositivesOnBaselines == 0);
  CHECK(report.recall() == doctest::Approx(1.0));
  CHECK(report.precision() == doctest::Approx(1.0));
}

TEST_CASE("each injection triggers its mapped rule and no other new error") {
  for (const auto& baseline : shippedBaselines()) {
    for (FaultKind k : allFaultKinds()) {
      auto mutated = inject(baseline, k);
      if (!mutated) continue;
      std::multiset<std::string> errors;
      for (const auto& f : lint(*mutated))
        if (f.severity == Severity::Error) errors.insert(f.ruleId);
      CAPTURE(baseline.sourcePath);
      CAPTURE(faultKindName(k));
      REQUIRE(errors.size() == 1);
      CHECK(*errors.begin() == expectedRuleId(k));
    }
  }
}

// ---------------------------------------------------------------------------
// Soundness: ERROR findings correspond to demonstrable runtime defects.

#include "lambdagent/eval.hpp"

TEST_CASE("L003 configs evaluate to the identity with zero oracle calls") {
  CanonicalConfig c = loadFixture("configs/seecoder_react.yaml");
  c.maxSteps = 0;
  REQUIRE(ruleIds(lint(c)).count("L003") == 1);
  TermPtr agent = compiledTerm(compile(c));
  FunctionOracle oracle([](const std::string&, const std::string&) {
    return std::string("ACTION: sum\nARGS: 1 2");
  });
  EvalContext ctx(oracle, builtinToolRegistry(), 0);
  Outcome out = reduce(agent, "untouched input", ctx);
  REQUIRE(out.ok());
  CHECK(*valueText(out.asOk().value) == "untouched input");
  CHECK(ctx.trace.oracleCalls() == 0);
}

TEST_CASE("L004a configs exhaust maxSteps under a never-terminating oracle") {
  CanonicalConfig c = loadFixture("configs/seecoder_react.yaml");
  c.tools.clear();  // drop terminate; online sum/improve remain
  REQUIRE(ruleIds(lint(c)).count("L004a") == 1);
  TermPtr agent = compiledTerm(compile(c));
  FunctionOracle oracle([](const std::string&, const std::string&) {
    return std::string("ACTION: sum\nARGS: 1 2");
  });
  ToolRegistry registry = builtinToolRegistry();
  registry.add("improve", [](const std::string& s) { return s; });
  EvalContext ctx(oracle, registry, 0);
  Outcome out = reduce(agent, "go", ctx);
  REQUIRE(out.ok());
  CHECK(ctx.trace.loopIters() == 20);  // forced truncation at the bound
  CHECK(ctx.trace.llmCalls() == 20);
}

TEST_CASE("L005 configs yield a route error on every input") {
  CanonicalConfig c = loadFixture("configs/router_support.yaml");
  c.routes.clear();
  c.routeDefault.clear();
  REQUIRE(ruleIds(lint(c)).count("L005") == 1);
  TermPtr agent = compiledTerm(compile(c));
  FunctionOracle oracle([](const std::string&, const std::string& input) {
    return "label-for-" + input;
  });
  for (const std::string input : {"a", "billing question", ""}) {
    EvalContext ctx(oracle, builtinToolRegistry(), 0);
    Outcome out = reduce(agent, input, ctx);
    CAPTURE(input);
    CHECK(std::holds_alternative<Outcome::RouteError>(out.node));
  }
}
