#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lambdagent/predicate.hpp"
#include "lambdagent/pretty.hpp"

namespace lambdagent {

/// β-reduction trace: one event per oracle call, tool invocation, loop
/// unfolding, guard check, memory write, probabilistic draw or engine
/// phase, in evaluation order.
struct TraceEvent {
  struct LlmCall {
    std::string prompt;
    std::string input;
    std::string output;
    std::uint64_t stepIndex = 0;
  };
  struct ToolCall {
    std::string toolId;
    std::string args;
    std::string output;
  };
  struct LoopIter {
    std::uint64_t remaining = 0;
  };
  struct GuardCheck {
    PredicatePtr predicate;
    bool passed = false;
  };
  struct MemWrite {
    std::string key;
  };
  struct ProbChoice {
    std::string side;  // "left" | "right"
    double p = 0.0;
    std::uint64_t seed = 0;
  };
  struct Phase {
    std::string name;  // Think | Parse | Route | Invoke | Observe | Update | Check
  };

  using Node =
      std::variant<LlmCall, ToolCall, LoopIter, GuardCheck, MemWrite, ProbChoice, Phase>;
  Node node;
};

struct Trace {
  std::vector<TraceEvent> events;

  void add(TraceEvent::Node node) { events.push_back(TraceEvent{std::move(node)}); }

  std::size_t llmCalls() const { return countKind<TraceEvent::LlmCall>(); }
  std::size_t toolCalls() const { return countKind<TraceEvent::ToolCall>(); }
  std::size_t loopIters() const { return countKind<TraceEvent::LoopIter>(); }
  std::size_t oracleCalls() const { return llmCalls() + toolCalls(); }

  template <typename K>
  std::size_t countKind() const {
    std::size_t n = 0;
    for (const auto& e : events)
      if (std::holds_alternative<K>(e.node)) ++n;
    return n;
  }
};

/// One event per line, tab-separated, stable field order; string payloads
/// are JSON-quoted so the format stays line-delimited.
inline std::string serializeTraceEvent(const TraceEvent& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TraceEvent::LlmCall>) {
          return "llm_call\tstep=" + std::to_string(n.stepIndex) +
                 "\tprompt=" + quoteText(n.prompt) + "\tinput=" + quoteText(n.input) +
                 "\toutput=" + quoteText(n.output);
        } else if constexpr (std::is_same_v<T, TraceEvent::ToolCall>) {
          return "tool_call\ttool=" + n.toolId + "\targs=" + quoteText(n.args) +
                 "\toutput=" + quoteText(n.output);
        } else if constexpr (std::is_same_v<T, TraceEvent::LoopIter>) {
          return "loop_iter\tremaining=" + std::to_string(n.remaining);
        } else if constexpr (std::is_same_v<T, TraceEvent::GuardCheck>) {
          return "guard_check\tpredicate=" + printPredicate(n.predicate) +
                 "\tpassed=" + (n.passed ? "true" : "false");
        } else if constexpr (std::is_same_v<T, TraceEvent::MemWrite>) {
          return "mem_write\tkey=" + quoteText(n.key);
        } else if constexpr (std::is_same_v<T, TraceEvent::ProbChoice>) {
          return "prob_choice\tside=" + n.side + "\tp=" + printReal(n.p) +
                 "\tseed=" + std::to_string(n.seed);
        } else {
          return "phase\tname=" + n.name;
        }
      },
      e.node);
}

inline void serializeTrace(const Trace& trace, std::ostream& out) {
  for (const auto& e : trace.events) out << serializeTraceEvent(e) << "\n";
}

/// Parses one serialized line into (event name, field map). String fields
/// are unquoted back to raw text. Returns false on malformed lines.
inline bool parseTraceLine(const std::string& line, std::string& name,
                           std::vector<std::pair<std::string, std::string>>& fields) {
  fields.clear();
  if (line.empty()) return false;
  std::size_t pos = line.find('\t');
  name = line.substr(0, pos);
  while (pos != std::string::npos) {
    std::size_t next = line.find('\t', pos + 1);
    std::string part = line.substr(pos + 1, next == std::string::npos
                                                 ? std::string::npos
                                                 : next - pos - 1);
    std::size_t eq = part.find('=');
    if (eq == std::string::npos) return false;
    std::string key = part.substr(0, eq);
    std::string value = part.substr(eq + 1);
    if (!value.empty() && value.front() == '"') {
      try {
        value = nlohmann::json::parse(value).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        return false;
      }
    }
    fields.emplace_back(std::move(key), std::move(value));
    pos = next;
  }
  return true;
}

}  // namespace lambdagent
