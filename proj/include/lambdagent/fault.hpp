#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lambdagent/lint.hpp"

namespace lambdagent {

/// The five injected fault types; each maps to exactly one expected rule.
enum class FaultKind {
  RemoveTerminate,
  EmptySystemPrompt,
  RemoveModel,
  ZeroMaxSteps,
  EmptyRoutes,
};

inline const std::vector<FaultKind>& allFaultKinds() {
  static const std::vector<FaultKind> kinds = {
      FaultKind::RemoveTerminate, FaultKind::EmptySystemPrompt, FaultKind::RemoveModel,
      FaultKind::ZeroMaxSteps, FaultKind::EmptyRoutes};
  return kinds;
}

inline const char* faultKindName(FaultKind k) {
  switch (k) {
    case FaultKind::RemoveTerminate: return "remove-terminate";
    case FaultKind::EmptySystemPrompt: return "empty-system-prompt";
    case FaultKind::RemoveModel: return "remove-model";
    case FaultKind::ZeroMaxSteps: return "zero-max-steps";
    case FaultKind::EmptyRoutes: return "empty-routes";
  }
  return "?";
}

inline const char* expectedRuleId(FaultKind k) {
  switch (k) {
    case FaultKind::RemoveTerminate: return "L004a";
    case FaultKind::EmptySystemPrompt: return "L001";
    case FaultKind::RemoveModel: return "L002";
    case FaultKind::ZeroMaxSteps: return "L003";
    case FaultKind::EmptyRoutes: return "L005";
  }
  return "?";
}

namespace detail {

inline bool faultApplicable(const CanonicalConfig& c, FaultKind k) {
  switch (k) {
    case FaultKind::RemoveTerminate:
      return c.agentType == AgentType::React && c.hasTool("terminate");
    case FaultKind::EmptySystemPrompt:
      return (c.agentType == AgentType::Simple || c.agentType == AgentType::React) &&
             !isToolStage(c) && c.systemPrompt && !c.systemPrompt->empty();
    case FaultKind::RemoveModel:
      return c.model.has_value() && needsModel(c) &&
             !frameworkProvidesDefaultModel(c.framework);
    case FaultKind::ZeroMaxSteps:
      return c.agentType == AgentType::React && c.maxSteps && *c.maxSteps > 0;
    case FaultKind::EmptyRoutes:
      return c.agentType == AgentType::Router && !c.routes.empty();
  }
  return false;
}

inline void applyFault(CanonicalConfig& c, FaultKind k) {
  switch (k) {
    case FaultKind::RemoveTerminate: {
      auto drop = [](std::vector<std::string>& ids) {
        ids.erase(std::remove(ids.begin(), ids.end(), "terminate"), ids.end());
      };
      drop(c.tools);
      for (auto& [_, ids] : c.onlineTools) drop(ids);
      break;
    }
    case FaultKind::EmptySystemPrompt:
      c.systemPrompt = "";
      break;
    case FaultKind::RemoveModel:
      c.model.reset();
      break;
    case FaultKind::ZeroMaxSteps:
      c.maxSteps = 0;
      break;
    case FaultKind::EmptyRoutes:
      c.routes.clear();
      c.routeDefault.clear();
      break;
  }
}

/// Mutates the first applicable site in pre-order (root, stages, routes,
/// default, branches). Returns true when a site was found.
inline bool injectFirst(CanonicalConfig& c, FaultKind k) {
  if (faultApplicable(c, k)) {
    applyFault(c, k);
    return true;
  }
  for (auto& stage : c.stages)
    if (injectFirst(stage, k)) return true;
  for (auto& [_, route] : c.routes)
    if (injectFirst(route, k)) return true;
  for (auto& route : c.routeDefault)
    if (injectFirst(route, k)) return true;
  for (auto& branch : c.branches)
    if (injectFirst(branch, k)) return true;
  return false;
}

}  // namespace detail

/// Minimally mutates a known-good configuration to exhibit the fault, or
/// nullopt when no site in the configuration tree is applicable.
inline std::optional<CanonicalConfig> inject(const CanonicalConfig& c, FaultKind k) {
  CanonicalConfig mutated = c;
  if (!detail::injectFirst(mutated, k)) return std::nullopt;
  return mutated;
}

struct MatrixReport {
  std::size_t injected = 0;
  std::size_t detected = 0;
  std::size_t falsePositivesOnBaselines = 0;
  std::size_t skippedInapplicable = 0;

  struct PerFault {
    std::size_t applicable = 0;
    std::size_t detected = 0;
  };
  std::map<FaultKind, PerFault> perFault;

  double recall() const {
    return injected == 0 ? 1.0 : static_cast<double>(detected) / injected;
  }
  /// Detection precision over the matrix: flagged-and-injected over all
  /// ERROR verdicts (injected detections plus baseline false positives).
  double precision() const {
    std::size_t flagged = detected + falsePositivesOnBaselines;
    return flagged == 0 ? 1.0 : static_cast<double>(detected) / flagged;
  }
};

/// Experiment-A matrix: inject every fault kind into every baseline, lint,
/// and score against the expected rule; unmodified baselines must stay
/// ERROR-free. Baselines that do not lint clean are a setup error.
inline MatrixReport runMatrix(const std::vector<CanonicalConfig>& baselines,
                              const std::vector<FaultKind>& kinds) {
  MatrixReport report;
  for (const auto& baseline : baselines) {
    auto findings = lint(baseline);
    std::size_t errors = 0;
    for (const auto& f : findings)
      if (f.severity == Severity::Error) ++errors;
    if (errors > 0)
      throw std::invalid_argument("baseline does not lint clean: " +
                                  baseline.sourcePath);
    report.falsePositivesOnBaselines += errors;
  }
  for (const auto& baseline : baselines) {
    for (FaultKind k : kinds) {
      auto mutated = inject(baseline, k);
      if (!mutated) {
        ++report.skippedInapplicable;
        continue;
      }
      ++report.injected;
      ++report.perFault[k].applicable;
      auto findings = lint(*mutated);
      bool hit = std::any_of(findings.begin(), findings.end(), [&](const LintFinding& f) {
        return f.ruleId == expectedRuleId(k) && f.severity == Severity::Error;
      });
      if (hit) {
        ++report.detected;
        ++report.perFault[k].detected;
      }
    }
  }
  return report;
}

inline std::string renderMatrixReport(const MatrixReport& r) {
  std::ostringstream out;
  char line[160];
  out << "Fault                Applicable  Detected\n";
  for (const auto& [kind, pf] : r.perFault) {
    std::snprintf(line, sizeof(line), "%-20s %10zu  %8zu\n", faultKindName(kind),
                  pf.applicable, pf.detected);
    out << line;
  }
  std::snprintf(line, sizeof(line),
                "injected=%zu detected=%zu skipped=%zu baseline_fps=%zu\n", r.injected,
                r.detected, r.skippedInapplicable, r.falsePositivesOnBaselines);
  out << line;
  std::snprintf(line, sizeof(line), "recall=%.1f%% precision=%.1f%%\n", 100.0 * r.recall(),
                100.0 * r.precision());
  out << line;
  return out.str();
}

/// Structured mode: one line per (baseline, fault) cell.
inline std::string renderMatrixStructured(const std::vector<CanonicalConfig>& baselines,
                                          const std::vector<FaultKind>& kinds) {
  std::ostringstream out;
  for (const auto& baseline : baselines) {
    for (FaultKind k : kinds) {
      auto mutated = inject(baseline, k);
      out << baseline.sourcePath << "\t" << faultKindName(k) << "\t";
      if (!mutated) {
        out << "inapplicable\t-\n";
        continue;
      }
      auto findings = lint(*mutated);
      bool hit = std::any_of(findings.begin(), findings.end(), [&](const LintFinding& f) {
        return f.ruleId == expectedRuleId(k) && f.severity == Severity::Error;
      });
      out << (hit ? "detected" : "missed") << "\t" << expectedRuleId(k) << "\n";
    }
  }
  return out.str();
}

}  // namespace lambdagent
