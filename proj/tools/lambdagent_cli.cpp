// lambdagent: compile, run and lint agent configurations against the typed
// agent-composition calculus.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lambdagent/http_oracle.hpp"
#include "lambdagent/lambdagent.hpp"

namespace la = lambdagent;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
  explicit CliError(const std::string& what, int code = 2)
      : std::runtime_error(what), exitCode(code) {}
  int exitCode = 2;
};

std::optional<la::FrameworkKind> parseFrameworkFlag(const std::string& flag) {
  if (flag.empty()) return std::nullopt;
  auto kind = la::parseFrameworkName(flag);
  if (!kind) throw CliError("unknown framework: " + flag);
  return kind;
}

la::CanonicalConfig loadConfigOrDie(const std::string& path,
                                    const std::string& framework) {
  try {
    return la::loadCanonicalConfig(path, parseFrameworkFlag(framework));
  } catch (const la::ConfigError& e) {
    throw CliError(std::string(e.what()));
  }
}

/// Lint gate shared by compile/run: ERROR findings block unless forced.
std::vector<la::LintFinding> gate(const la::CanonicalConfig& config, bool force,
                                  bool structured) {
  auto findings = la::lint(config);
  if (!findings.empty()) {
    std::cerr << (structured ? la::renderFindingsStructured(findings)
                             : la::renderFindingsHuman(findings));
  }
  if (la::hasErrorFindings(findings) && !force)
    throw CliError("configuration has lint errors (use --force to compile anyway)");
  return findings;
}

la::TermPtr compileOrDie(const la::CanonicalConfig& config) {
  la::CompileResult result = la::compile(config);
  if (!la::compileOk(result))
    throw CliError("compile error: " + la::compileError(result).render());
  return la::compiledTerm(result);
}

la::ToolRegistry registryFor(const la::CanonicalConfig& config) {
  la::ToolRegistry registry = la::builtinToolRegistry();
  std::vector<std::string> declared;
  la::collectDeclaredTools(config, declared);
  for (const auto& id : declared) {
    if (!registry.contains(id)) {
      registry.add(id, [id](const std::string&) -> std::string {
        throw la::OracleError("tool not available locally: " + id);
      });
    }
  }
  return registry;
}

std::unique_ptr<la::OracleProvider> makeOracle(const std::string& scriptPath) {
  if (!scriptPath.empty())
    return std::make_unique<la::ScriptedOracle>(la::ScriptedOracle::fromFile(scriptPath));
  if (la::oracleEndpointFromEnv())
    return std::make_unique<la::HttpOracle>(la::HttpOracle::fromEnv());
  throw CliError(
      "no oracle configured: pass --oracle-script or set LAMBDAGENT_ORACLE_URL");
}

std::uint64_t seedFor(const la::CanonicalConfig& config,
                      const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  auto it = config.extras.find("seed");
  if (it != config.extras.end()) {
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
    }
  }
  return 0;
}

std::size_t wsTokens(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  std::size_t n = 0;
  while (in >> tok) ++n;
  return n;
}

/// Token accounting over the trace: whitespace tokens of every oracle
/// input and output (LLM and tool calls alike).
std::size_t traceTokens(const la::Trace& trace) {
  std::size_t total = 0;
  for (const auto& event : trace.events) {
    if (const auto* llm = std::get_if<la::TraceEvent::LlmCall>(&event.node))
      total += wsTokens(llm->input) + wsTokens(llm->output);
    else if (const auto* tool = std::get_if<la::TraceEvent::ToolCall>(&event.node))
      total += wsTokens(tool->args) + wsTokens(tool->output);
  }
  return total;
}

int reportOutcome(const la::Outcome& outcome, const la::Trace& trace,
                  bool structured) {
  if (const auto* ok = std::get_if<la::Outcome::Ok>(&outcome.node)) {
    std::string text = la::prettyPrintLambda(la::valueToTerm(ok->value));
    if (const auto* s = std::get_if<la::Value::StrV>(&ok->value->node)) text = s->text;
    std::size_t steps = trace.llmCalls();
    std::size_t tokens = traceTokens(trace);
    if (structured) {
      std::cout << "result\t" << la::quoteText(text) << "\n"
                << "stats\tsteps=" << steps << "\ttokens=" << tokens << "\n";
    } else {
      std::cout << text << "\n"
                << steps << " steps, " << tokens << " tokens\n";
    }
    return 0;
  }
  if (const auto* stuck = std::get_if<la::Outcome::GuardStuck>(&outcome.node)) {
    std::cerr << "guard failure: " << la::printPredicate(stuck->failedPredicate)
              << " rejected "
              << la::prettyPrintLambda(la::valueToTerm(stuck->offendingValue)) << "\n";
    return 2;
  }
  if (const auto* route = std::get_if<la::Outcome::RouteError>(&outcome.node)) {
    std::cerr << "route error: no branch for label '" << route->unmatchedLabel
              << "'\n";
    return 2;
  }
  std::cerr << "oracle failure: "
            << std::get<la::Outcome::OracleFailure>(outcome.node).detail << "\n";
  return 2;
}

std::vector<std::string> configFilesUnder(const std::string& path) {
  std::vector<std::string> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      if (ext == ".yaml" || ext == ".yml" || ext == ".json")
        files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  return files;
}

int runLint(const std::string& path, const std::string& withCode,
            const std::string& framework, bool structured, bool summaryOnly) {
  std::vector<std::string> files = configFilesUnder(path);
  if (files.empty()) throw CliError("no configuration files under " + path);

  la::SupplementIndex index;
  if (!withCode.empty()) index = la::scanRepo(withCode);

  struct FileResult {
    std::string file;
    std::vector<la::LintFinding> findings;
    std::string error;
  };

  // Linting is pure; fan out across files.
  std::vector<std::future<FileResult>> futures;
  futures.reserve(files.size());
  for (const auto& file : files) {
    futures.push_back(std::async(std::launch::async, [&, file]() {
      FileResult out;
      out.file = file;
      try {
        la::CanonicalConfig config =
            la::loadCanonicalConfig(file, parseFrameworkFlag(framework));
        out.findings = la::lint(config);
        if (!withCode.empty()) out.findings = la::reconcile(out.findings, index);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      return out;
    }));
  }

  int exitCode = 0;
  std::vector<std::vector<la::LintFinding>> perConfig;
  for (auto& future : futures) {
    FileResult result = future.get();
    if (!result.error.empty()) {
      std::cerr << result.file << ": " << result.error << "\n";
      exitCode = 2;
      continue;
    }
    perConfig.push_back(result.findings);
    if (!summaryOnly && !result.findings.empty()) {
      if (files.size() > 1) std::cout << result.file << ":\n";
      std::cout << (structured ? la::renderFindingsStructured(result.findings)
                               : la::renderFindingsHuman(result.findings));
    }
    exitCode = std::max(exitCode, la::lintExitCode(result.findings));
  }
  if (files.size() > 1 || summaryOnly)
    std::cout << la::renderSummary(la::summarize(perConfig));
  return exitCode;
}

int runTraceView(const std::string& path, bool structured) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open trace file: " + path);
  std::string line;
  std::size_t lineNo = 0, shown = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::string name;
    std::vector<std::pair<std::string, std::string>> fields;
    if (!la::parseTraceLine(line, name, fields))
      throw CliError("malformed trace line " + std::to_string(lineNo));
    ++shown;
    if (structured) {
      std::cout << line << "\n";
      continue;
    }
    std::cout << "[" << shown << "] " << name;
    for (const auto& [key, value] : fields) {
      std::cout << " " << key << "=";
      if (value.find(' ') != std::string::npos || value.find('\n') != std::string::npos)
        std::cout << la::quoteText(value);
      else
        std::cout << value;
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"typed agent-composition calculus toolchain"};
  app.require_subcommand(1);

  std::string format = "human";
  app.add_option("--format", format, "output mode")
      ->check(CLI::IsMember({"human", "structured"}));

  std::string configPath, framework, oracleScript, withCode, traceOut, inputText;
  std::optional<std::uint64_t> seedFlag;
  bool force = false;

  auto addConfigArg = [&](CLI::App* cmd) {
    cmd->add_option("config", configPath, "agent configuration (YAML or JSON)")
        ->required();
    cmd->add_option("--framework", framework,
                    "override framework detection (CrewAI, LangChain, AutoGen, "
                    "Dify, MultiAgent, Generic, Lambdagent)");
  };

  CLI::App* cmdCompile = app.add_subcommand("compile", "typecheck and export a config");
  addConfigArg(cmdCompile);
  cmdCompile->add_flag("--force", force, "compile despite lint errors");

  CLI::App* cmdRun = app.add_subcommand("run", "compile and execute a config");
  addConfigArg(cmdRun);
  cmdRun->add_option("-i,--input", inputText, "input text")->required();
  cmdRun->add_option("--oracle-script", oracleScript, "scripted oracle file");
  cmdRun->add_option("--seed", seedFlag, "probabilistic-choice seed");
  cmdRun->add_option("--trace-out", traceOut, "write the reduction trace here");
  cmdRun->add_flag("--force", force, "run despite lint errors");

  CLI::App* cmdRepl = app.add_subcommand("repl", "interactive loop over one agent");
  addConfigArg(cmdRepl);
  cmdRepl->add_option("--oracle-script", oracleScript, "scripted oracle file");
  cmdRepl->add_option("--seed", seedFlag, "probabilistic-choice seed");
  cmdRepl->add_flag("--force", force, "start despite lint errors");

  CLI::App* cmdLint = app.add_subcommand("lint", "static analysis of configs");
  cmdLint->add_option("config", configPath, "configuration file or directory")
      ->required();
  cmdLint->add_option("--framework", framework, "override framework detection");
  cmdLint->add_option("--with-code", withCode,
                      "scan this source tree for supplementary definitions");
  bool summaryOnly = false;
  cmdLint->add_flag("--summary", summaryOnly, "print only the aggregate summary");

  CLI::App* cmdTrace = app.add_subcommand("trace", "render a saved reduction trace");
  std::string traceFile;
  cmdTrace->add_option("file", traceFile, "trace file")->required();

  CLI::App* cmdLambda = app.add_subcommand("lambda", "export the λ expression only");
  addConfigArg(cmdLambda);

  CLI::App* cmdTools = app.add_subcommand("tools", "list or test registry tools");
  std::string testTool, testInput;
  cmdTools->add_option("--test", testTool, "invoke this tool");
  cmdTools->add_option("-i,--input", testInput, "test input");

  app.add_subcommand("version", "print the version");

  CLI11_PARSE(app, argc, argv);
  const bool structured = format == "structured";

  try {
    if (cmdCompile->parsed()) {
      la::CanonicalConfig config = loadConfigOrDie(configPath, framework);
      gate(config, force, structured);
      la::TermPtr term = compileOrDie(config);
      la::TypeContext ctx;
      la::applyConfigToolSignatures(ctx, config);
      la::InferResult inferred = la::infer(ctx, term);
      if (!la::inferOk(inferred))
        throw CliError("type error: " + la::inferError(inferred).render());
      std::cout << la::prettyPrintLambda(term) << "\n";
      std::cout << "type: " << la::printType(la::inferType(inferred)) << "\n";
      return 0;
    }

    if (cmdRun->parsed()) {
      la::CanonicalConfig config = loadConfigOrDie(configPath, framework);
      gate(config, force, structured);
      la::TermPtr term = compileOrDie(config);
      auto oracle = makeOracle(oracleScript);
      la::EvalContext ctx(*oracle, registryFor(config), seedFor(config, seedFlag));
      la::Outcome outcome = la::reduce(term, inputText, ctx);
      if (!traceOut.empty()) {
        std::ofstream out(traceOut);
        if (!out) throw CliError("cannot write trace file: " + traceOut);
        la::serializeTrace(ctx.trace, out);
      }
      return reportOutcome(outcome, ctx.trace, structured);
    }

    if (cmdRepl->parsed()) {
      la::CanonicalConfig config = loadConfigOrDie(configPath, framework);
      gate(config, force, structured);
      la::TermPtr term = compileOrDie(config);
      auto oracle = makeOracle(oracleScript);
      // One context for the whole session: the mem store survives turns.
      la::EvalContext ctx(*oracle, registryFor(config), seedFor(config, seedFlag));
      std::string line;
      while (std::getline(std::cin, line)) {
        if (line == ":quit") break;
        std::size_t llmBefore = ctx.trace.llmCalls();
        la::Outcome outcome = la::reduce(term, line, ctx);
        if (const auto* ok = std::get_if<la::Outcome::Ok>(&outcome.node)) {
          std::string text = la::prettyPrintLambda(la::valueToTerm(ok->value));
          if (const auto* s = std::get_if<la::Value::StrV>(&ok->value->node))
            text = s->text;
          std::cout << text << "\n";
          std::cout << (ctx.trace.llmCalls() - llmBefore) << " steps, store holds "
                    << ctx.store.size() << " entries\n";
        } else {
          la::Trace empty;
          reportOutcome(outcome, empty, structured);
        }
      }
      return 0;
    }

    if (cmdLint->parsed())
      return runLint(configPath, withCode, framework, structured, summaryOnly);

    if (cmdTrace->parsed()) return runTraceView(traceFile, structured);

    if (cmdLambda->parsed()) {
      la::CanonicalConfig config = loadConfigOrDie(configPath, framework);
      std::cout << la::prettyPrintLambda(compileOrDie(config)) << "\n";
      return 0;
    }

    if (cmdTools->parsed()) {
      la::ToolRegistry registry = la::builtinToolRegistry();
      if (testTool.empty()) {
        for (const auto& id : registry.toolIds()) {
          const auto& sig = registry.signatures().at(id);
          std::cout << id << " : " << la::printType(sig.first) << " -> "
                    << la::printType(sig.second) << "\n";
        }
        return 0;
      }
      auto out = registry.invoke(testTool, testInput);
      if (!out) throw CliError("unknown tool: " + testTool);
      std::cout << *out << "\n";
      return 0;
    }

    // version
    std::cout << "lambdagent " << la::kVersion << "\n";
    return 0;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exitCode;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
