#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lambdagent/compile.hpp"
#include "lambdagent/config.hpp"

namespace lambdagent {

enum class Severity { Error = 0, Warn = 1, Info = 2 };

inline const char* severityName(Severity s) {
  switch (s) {
    case Severity::Error: return "ERROR";
    case Severity::Warn: return "WARN";
    case Severity::Info: return "INFO";
  }
  return "INFO";
}

struct LintFinding {
  std::string ruleId;
  Severity severity = Severity::Error;  // effective, after stratification
  std::string path;
  std::string message;
  std::optional<std::string> mitigation;  // what downgraded the finding
};

/// Catalog descriptor. Rules whose ids the severity stratification reserves
/// stay listed but unimplemented so ids never shift.
struct RuleDescriptor {
  std::string id;
  Severity level;          // effective level emitted by the rule
  Severity displayBase;    // pre-stratification level used for sorting/rendering
  std::string description;
  bool implemented = false;
};

inline const std::vector<RuleDescriptor>& ruleCatalog() {
  static const std::vector<RuleDescriptor> catalog = {
      {"L001", Severity::Error, Severity::Error, "systemPrompt empty or missing", true},
      {"L002", Severity::Error, Severity::Error, "model missing", true},
      {"L003", Severity::Error, Severity::Error, "maxSteps is zero: the loop is vacuous", true},
      {"L004a", Severity::Error, Severity::Error,
       "no terminate tool and no alternative termination mechanism", true},
      {"L004b", Severity::Warn, Severity::Error,
       "no terminate tool; bounded fallback forces truncation", true},
      {"L004c", Severity::Info, Severity::Error,
       "no terminate tool; framework runtime handles termination", true},
      {"L004d", Severity::Info, Severity::Error,
       "no terminate tool; termination-message matching handles it", true},
      {"L005", Severity::Error, Severity::Error, "router has no routes", true},
      {"L006", Severity::Error, Severity::Error, "reserved, not implemented", false},
      {"L007", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L008", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L009", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L010", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L011", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L012", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L013", Severity::Warn, Severity::Warn, "router has no default route", true},
      {"L014", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L015", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L016", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L017", Severity::Warn, Severity::Warn, "react agent without explicit maxSteps", true},
      {"L018", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L019", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L020", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L021", Severity::Error, Severity::Error,
       "multi-agent loop without max_turns, max_rounds or is_termination_msg", true},
      {"L022", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L023", Severity::Error, Severity::Error, "reserved, not implemented", false},
      {"L024", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
      {"L025", Severity::Warn, Severity::Warn, "reserved, not implemented", false},
  };
  return catalog;
}

inline const RuleDescriptor* findRule(const std::string& id) {
  for (const auto& rule : ruleCatalog())
    if (rule.id == id) return &rule;
  return nullptr;
}

namespace detail {

inline std::string lintPath(const std::string& prefix, const std::string& leaf) {
  return prefix.empty() ? leaf : prefix + leaf;
}

inline bool needsModel(const CanonicalConfig& c) {
  switch (c.agentType) {
    case AgentType::Simple: return !isToolStage(c);
    case AgentType::React: return true;
    case AgentType::Router: return true;  // the classifier is an oracle call
    default: return false;
  }
}

inline void lintNode(const CanonicalConfig& c, const std::string& prefix,
                     std::vector<LintFinding>& out) {
  const bool oracleAgent =
      c.agentType == AgentType::Simple || c.agentType == AgentType::React;

  // L001: an empty prompt is an oracle with an undefined body.
  if (oracleAgent && !isToolStage(c) &&
      (!c.systemPrompt || c.systemPrompt->empty())) {
    out.push_back({"L001", Severity::Error, lintPath(prefix, "systemPrompt"),
                   "systemPrompt is empty or missing", std::nullopt});
  }

  // L002: no LLM, no computation. Frameworks with a built-in default model
  // (CrewAI) are exempt.
  if (!c.model && needsModel(c) && !frameworkProvidesDefaultModel(c.framework)) {
    out.push_back({"L002", Severity::Error, lintPath(prefix, "model"),
                   "model is missing", std::nullopt});
  }

  if (c.agentType == AgentType::React) {
    if (c.maxSteps && *c.maxSteps == 0) {
      out.push_back({"L003", Severity::Error, lintPath(prefix, "react.maxSteps"),
                     "maxSteps is 0: the agent returns its input unchanged",
                     std::nullopt});
    } else if (!c.maxSteps) {
      out.push_back({"L017", Severity::Warn, lintPath(prefix, "react.maxSteps"),
                     "not specified", std::nullopt});
    }

    if (!c.hasTool("terminate")) {
      const auto& hints = c.terminationHints;
      std::string path = lintPath(prefix, "mcp.localTools");
      if (hints.count(HintKind::FrameworkInternal) || hints.count(HintKind::DagEndNode) ||
          hints.count(HintKind::NoDelegation)) {
        std::string why;
        if (hints.count(HintKind::FrameworkInternal))
          why = std::string(frameworkName(c.framework)) + ": handled by framework";
        else if (hints.count(HintKind::DagEndNode))
          why = std::string(frameworkName(c.framework)) + ": DAG end node";
        else
          why = std::string(frameworkName(c.framework)) + ": delegation disabled";
        out.push_back({"L004c", Severity::Info, path, "no terminate tool", why});
      } else if (hints.count(HintKind::IsTerminationMsg)) {
        out.push_back({"L004d", Severity::Info, path, "no terminate tool",
                       "is_termination_msg: LLM output matching"});
      } else if (hints.count(HintKind::MaxIter) || hints.count(HintKind::MaxRounds)) {
        std::uint32_t bound = hints.count(HintKind::MaxIter)
                                  ? hints.at(HintKind::MaxIter)
                                  : hints.at(HintKind::MaxRounds);
        out.push_back({"L004b", Severity::Warn, path, "no terminate tool",
                       "bounded fallback: forced truncation after " +
                           std::to_string(bound) + " iterations"});
      } else {
        out.push_back({"L004a", Severity::Error, path,
                       "no terminate tool and no alternative termination",
                       std::nullopt});
      }
    }
  }

  if (c.agentType == AgentType::Router) {
    if (c.routes.empty()) {
      out.push_back({"L005", Severity::Error, lintPath(prefix, "routes"),
                     "router has no routes: dispatch has no branches to take",
                     std::nullopt});
    } else if (c.routeDefault.empty()) {
      out.push_back({"L013", Severity::Warn, lintPath(prefix, "routes"),
                     "router has no default route: unmatched labels are runtime errors",
                     std::nullopt});
    }
  }

  if (c.framework == FrameworkKind::MultiAgent) {
    if (!c.terminationHints.count(HintKind::MaxRounds) &&
        !c.terminationHints.count(HintKind::IsTerminationMsg)) {
      out.push_back({"L021", Severity::Error, lintPath(prefix, "termination"),
                     "multi-agent loop without max_turns, max_rounds or "
                     "is_termination_msg",
                     std::nullopt});
    }
  }

  // Recurse into subconfigurations.
  for (std::size_t i = 0; i < c.stages.size(); ++i)
    lintNode(c.stages[i], lintPath(prefix, "stages[" + std::to_string(i) + "]."), out);
  for (const auto& [label, sub] : c.routes)
    lintNode(sub, lintPath(prefix, "routes[" + label + "]."), out);
  if (!c.routeDefault.empty())
    lintNode(c.routeDefault[0], lintPath(prefix, "routes[default]."), out);
  for (std::size_t i = 0; i < c.branches.size(); ++i)
    lintNode(c.branches[i], lintPath(prefix, "branches[" + std::to_string(i) + "]."),
             out);
}

inline Severity sortSeverity(const LintFinding& f) {
  const RuleDescriptor* rule = findRule(f.ruleId);
  return rule ? rule->displayBase : f.severity;
}

}  // namespace detail

/// Runs the catalog over a canonical configuration (recursively over its
/// subconfigurations). Findings sort by pre-stratification severity, then
/// rule id, then path; output is deterministic.
inline std::vector<LintFinding> lint(const CanonicalConfig& c) {
  std::vector<LintFinding> out;
  detail::lintNode(c, "", out);
  std::stable_sort(out.begin(), out.end(),
                   [](const LintFinding& a, const LintFinding& b) {
                     auto ka = std::make_tuple(detail::sortSeverity(a), a.ruleId, a.path);
                     auto kb = std::make_tuple(detail::sortSeverity(b), b.ruleId, b.path);
                     return ka < kb;
                   });
  return out;
}

inline bool hasErrorFindings(const std::vector<LintFinding>& findings) {
  return std::any_of(findings.begin(), findings.end(), [](const LintFinding& f) {
    return f.severity == Severity::Error;
  });
}

/// Exit code contract: 0 clean, 1 warnings only, 2 any error.
inline int lintExitCode(const std::vector<LintFinding>& findings) {
  bool warn = false;
  for (const auto& f : findings) {
    if (f.severity == Severity::Error) return 2;
    if (f.severity == Severity::Warn) warn = true;
  }
  return warn ? 1 : 0;
}

namespace detail {

inline std::string padRight(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

/// Human layout mirrors the CLI block: `LEVEL RULE  path: message`, with a
/// continuation line naming the mitigation and the downgraded level.
inline std::string renderFindingsHuman(const std::vector<LintFinding>& findings) {
  std::ostringstream out;
  for (const auto& f : findings) {
    Severity display = detail::sortSeverity(f);
    out << detail::padRight(severityName(display), 5) << " "
        << detail::padRight(f.ruleId, 5) << "  " << f.path << ": " << f.message << "\n";
    if (f.mitigation) {
      out << std::string(13, ' ') << "(" << *f.mitigation << ") -> "
          << severityName(f.severity) << "\n";
    }
  }
  return out.str();
}

/// One finding per line with a stable field order.
inline std::string renderFindingsStructured(const std::vector<LintFinding>& findings) {
  std::ostringstream out;
  for (const auto& f : findings) {
    out << severityName(f.severity) << "\t" << f.ruleId << "\t" << f.path << "\t"
        << f.message << "\t" << (f.mitigation ? *f.mitigation : "") << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Batch summary

struct LintSummary {
  std::size_t totalConfigs = 0;
  std::map<std::string, std::size_t> perRule;  // effective-ERROR findings per rule
  std::size_t configsWithError = 0;
  std::size_t cleanConfigs = 0;  // neither errors nor warnings

  double errorPct() const {
    return totalConfigs == 0 ? 0.0 : 100.0 * configsWithError / totalConfigs;
  }
  double cleanPct() const {
    return totalConfigs == 0 ? 0.0 : 100.0 * cleanConfigs / totalConfigs;
  }
};

inline LintSummary summarize(const std::vector<std::vector<LintFinding>>& perConfig) {
  LintSummary s;
  s.totalConfigs = perConfig.size();
  for (const auto& findings : perConfig) {
    bool anyError = false, anyWarn = false;
    for (const auto& f : findings) {
      if (f.severity == Severity::Error) {
        anyError = true;
        ++s.perRule[f.ruleId];
      } else if (f.severity == Severity::Warn) {
        anyWarn = true;
      }
    }
    if (anyError) ++s.configsWithError;
    if (!anyError && !anyWarn) ++s.cleanConfigs;
  }
  return s;
}

inline std::string renderSummary(const LintSummary& s) {
  std::ostringstream out;
  char line[160];
  out << "Rule    Level  Count  Pct\n";
  for (const auto& [rule, count] : s.perRule) {
    double pct = s.totalConfigs == 0 ? 0.0 : 100.0 * count / s.totalConfigs;
    std::snprintf(line, sizeof(line), "%-7s ERROR %6zu  %.1f%%\n", rule.c_str(), count,
                  pct);
    out << line;
  }
  std::snprintf(line, sizeof(line), "Total configs with >=1 ERROR  %zu  %.1f%%\n",
                s.configsWithError, s.errorPct());
  out << line;
  std::snprintf(line, sizeof(line), "Clean (no ERROR/WARN)         %zu  %.1f%%\n",
                s.cleanConfigs, s.cleanPct());
  out << line;
  return out.str();
}

}  // namespace lambdagent
