#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "lambdagent/predicate.hpp"
#include "lambdagent/term.hpp"

namespace lambdagent {

/// Raw parsed configuration document. Insertion order is preserved so that
/// route labels and tool lists keep their authored order.
using ConfigNode = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FrameworkKind { CrewAI, LangChain, AutoGen, Dify, MultiAgent, Generic, Lambdagent };

inline const char* frameworkName(FrameworkKind k) {
  switch (k) {
    case FrameworkKind::CrewAI: return "CrewAI";
    case FrameworkKind::LangChain: return "LangChain";
    case FrameworkKind::AutoGen: return "AutoGen";
    case FrameworkKind::Dify: return "Dify";
    case FrameworkKind::MultiAgent: return "MultiAgent";
    case FrameworkKind::Generic: return "Generic";
    case FrameworkKind::Lambdagent: return "Lambdagent";
  }
  return "Generic";
}

inline std::optional<FrameworkKind> parseFrameworkName(const std::string& name) {
  for (FrameworkKind k :
       {FrameworkKind::CrewAI, FrameworkKind::LangChain, FrameworkKind::AutoGen,
        FrameworkKind::Dify, FrameworkKind::MultiAgent, FrameworkKind::Generic,
        FrameworkKind::Lambdagent}) {
    if (frameworkName(k) == name) return k;
  }
  return std::nullopt;
}

enum class AgentType { Simple, React, Chain, Router, Parallel };

inline const char* agentTypeName(AgentType t) {
  switch (t) {
    case AgentType::Simple: return "simple";
    case AgentType::React: return "react";
    case AgentType::Chain: return "chain";
    case AgentType::Router: return "router";
    case AgentType::Parallel: return "parallel";
  }
  return "simple";
}

inline std::optional<AgentType> parseAgentType(const std::string& name) {
  for (AgentType t : {AgentType::Simple, AgentType::React, AgentType::Chain,
                      AgentType::Router, AgentType::Parallel}) {
    if (agentTypeName(t) == name) return t;
  }
  return std::nullopt;
}

/// Alternative termination mechanisms observable in configurations. They
/// all stop the loop without an explicit terminate tool and drive the
/// L004 severity stratification.
enum class HintKind {
  MaxIter,            // bounded iteration (max_iter and friends)
  IsTerminationMsg,   // LLM output string matching (AutoGen)
  MaxRounds,          // multi-turn limits (max_rounds / max_turns)
  FrameworkInternal,  // framework runtime handles termination (CrewAI, LangChain)
  DagEndNode,         // DAG termination node (Dify)
  NoDelegation,       // delegation disabled (allow_delegation = false)
};

using TerminationHints = std::map<HintKind, std::uint32_t>;

struct MemorySpec {
  std::string strategy;
  std::uint64_t size = 0;
  std::uint64_t ttl = 0;
};

inline bool operator==(const MemorySpec& a, const MemorySpec& b) {
  return a.strategy == b.strategy && a.size == b.size && a.ttl == b.ttl;
}

/// Framework-neutral normalized configuration: the common input of the
/// compiler, the lint engine and the fault harness.
struct CanonicalConfig {
  std::string agentId;
  AgentType agentType = AgentType::Simple;
  std::optional<ModelParams> model;
  std::optional<std::string> systemPrompt;
  std::optional<std::uint32_t> maxSteps;
  std::vector<std::string> tools;  // local tools
  std::vector<std::pair<std::string, std::vector<std::string>>> onlineTools;
  std::vector<std::pair<std::string, CanonicalConfig>> routes;
  std::vector<CanonicalConfig> routeDefault;  // zero or one entry
  std::vector<CanonicalConfig> stages;
  std::vector<CanonicalConfig> branches;
  std::optional<MemorySpec> memory;
  PredicatePtr guard;  // null when absent
  TerminationHints terminationHints;
  FrameworkKind framework = FrameworkKind::Generic;
  std::string sourcePath;
  std::map<std::string, std::string> extras;  // unmapped fields, for path reporting

  std::vector<std::string> allTools() const {
    std::vector<std::string> out;
    for (const auto& [server, ids] : onlineTools)
      out.insert(out.end(), ids.begin(), ids.end());
    out.insert(out.end(), tools.begin(), tools.end());
    return out;
  }

  bool hasTool(const std::string& id) const {
    auto all = allTools();
    return std::find(all.begin(), all.end(), id) != all.end();
  }
};

inline bool operator==(const CanonicalConfig& a, const CanonicalConfig& b);

inline bool configListEqual(const std::vector<CanonicalConfig>& a,
                            const std::vector<CanonicalConfig>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

inline bool operator==(const CanonicalConfig& a, const CanonicalConfig& b) {
  if (!(a.agentId == b.agentId && a.agentType == b.agentType && a.model == b.model &&
        a.systemPrompt == b.systemPrompt && a.maxSteps == b.maxSteps &&
        a.tools == b.tools && a.onlineTools == b.onlineTools &&
        a.memory == b.memory && a.terminationHints == b.terminationHints &&
        a.framework == b.framework && a.sourcePath == b.sourcePath &&
        a.extras == b.extras))
    return false;
  if (!predicateEqual(a.guard, b.guard) && (a.guard || b.guard)) return false;
  if (a.routes.size() != b.routes.size()) return false;
  for (std::size_t i = 0; i < a.routes.size(); ++i) {
    if (a.routes[i].first != b.routes[i].first) return false;
    if (!(a.routes[i].second == b.routes[i].second)) return false;
  }
  return configListEqual(a.routeDefault, b.routeDefault) &&
         configListEqual(a.stages, b.stages) && configListEqual(a.branches, b.branches);
}

inline bool operator==(const std::optional<ModelParams>& a,
                       const std::optional<ModelParams>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || (*a == *b);
}

// ---------------------------------------------------------------------------
// Raw document loading

namespace detail {

inline ConfigNode yamlToConfigNode(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar: {
      const std::string& text = node.Scalar();
      if (node.Tag() == "!") return text;  // explicitly quoted
      if (text == "null" || text == "~") return nullptr;
      if (text == "true") return true;
      if (text == "false") return false;
      try {
        std::size_t used = 0;
        long long asInt = std::stoll(text, &used);
        if (used == text.size()) return asInt;
      } catch (const std::exception&) {
      }
      try {
        std::size_t used = 0;
        double asReal = std::stod(text, &used);
        if (used == text.size()) return asReal;
      } catch (const std::exception&) {
      }
      return text;
    }
    case YAML::NodeType::Sequence: {
      ConfigNode out = ConfigNode::array();
      for (const auto& item : node) out.push_back(yamlToConfigNode(item));
      return out;
    }
    case YAML::NodeType::Map: {
      ConfigNode out = ConfigNode::object();
      for (const auto& kv : node)
        out[kv.first.as<std::string>()] = yamlToConfigNode(kv.second);
      return out;
    }
  }
  return nullptr;
}

}  // namespace detail

inline ConfigNode parseRawConfig(const std::string& text, bool isJson) {
  if (isJson) {
    try {
      return ConfigNode::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("unparseable JSON document: ") + e.what());
    }
  }
  try {
    return detail::yamlToConfigNode(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("unparseable YAML document: ") + e.what());
  }
}

inline ConfigNode loadRawConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  bool isJson = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return parseRawConfig(buffer.str(), isJson);
}

// ---------------------------------------------------------------------------
// Framework detection

/// Detection runs a fixed rule order; the first match wins, so ties cannot
/// occur. Documents without any framework marker are Generic.
inline FrameworkKind detectFramework(const ConfigNode& raw) {
  if (!raw.is_object()) throw ConfigError("configuration root must be a map");

  if (raw.contains("role") && raw.contains("goal") && raw.contains("backstory"))
    return FrameworkKind::CrewAI;
  if (raw.contains("is_termination_msg") || raw.contains("llm_config"))
    return FrameworkKind::AutoGen;
  if (raw.contains("_type")) return FrameworkKind::LangChain;

  auto hasTypedNodes = [](const ConfigNode& n) {
    if (!n.is_array() || n.empty()) return false;
    for (const auto& item : n) {
      if (!item.is_object()) return false;
      if (!item.contains("type") &&
          !(item.contains("data") && item["data"].is_object() &&
            item["data"].contains("type")))
        return false;
    }
    return true;
  };
  const ConfigNode* nodes = nullptr;
  if (raw.contains("nodes")) nodes = &raw["nodes"];
  else if (raw.contains("graph") && raw["graph"].is_object() &&
           raw["graph"].contains("nodes"))
    nodes = &raw["graph"]["nodes"];
  else if (raw.contains("workflow") && raw["workflow"].is_object() &&
           raw["workflow"].contains("graph") && raw["workflow"]["graph"].is_object() &&
           raw["workflow"]["graph"].contains("nodes"))
    nodes = &raw["workflow"]["graph"]["nodes"];
  if (nodes && hasTypedNodes(*nodes)) return FrameworkKind::Dify;

  if (raw.contains("agents") && raw["agents"].is_array()) {
    for (const char* key : {"max_rounds", "max_round", "max_turns",
                            "speaker_selection_method", "turn_taking", "admin_name"}) {
      if (raw.contains(key)) return FrameworkKind::MultiAgent;
    }
  }
  if (raw.contains("agentId") && raw.contains("type")) return FrameworkKind::Lambdagent;
  return FrameworkKind::Generic;
}

// ---------------------------------------------------------------------------
// Normalization

namespace detail {

inline std::optional<std::string> asString(const ConfigNode& n) {
  if (n.is_string()) return n.get<std::string>();
  return std::nullopt;
}

inline std::optional<std::string> getString(const ConfigNode& raw, const char* key) {
  if (raw.contains(key)) return asString(raw[key]);
  return std::nullopt;
}

inline std::optional<double> getNumber(const ConfigNode& raw, const char* key) {
  if (raw.contains(key) && raw[key].is_number()) return raw[key].get<double>();
  return std::nullopt;
}

inline std::optional<std::uint32_t> getCount(const ConfigNode& raw, const char* key) {
  if (raw.contains(key) && raw[key].is_number_integer()) {
    auto v = raw[key].get<long long>();
    if (v >= 0) return static_cast<std::uint32_t>(v);
  }
  return std::nullopt;
}

inline std::vector<std::string> toolNameList(const ConfigNode& n) {
  std::vector<std::string> out;
  if (!n.is_array()) return out;
  for (const auto& item : n) {
    if (item.is_string()) {
      out.push_back(item.get<std::string>());
    } else if (item.is_object() && item.contains("name") && item["name"].is_string()) {
      out.push_back(item["name"].get<std::string>());
    }
  }
  return out;
}

inline std::optional<ModelParams> modelFromNode(const ConfigNode& n) {
  if (n.is_string()) return ModelParams{n.get<std::string>(), 0.0};
  if (n.is_object()) {
    std::optional<std::string> name = getString(n, "name");
    if (!name) name = getString(n, "model");
    if (!name) name = getString(n, "model_name");
    if (!name) return std::nullopt;
    double temp = getNumber(n, "temperature").value_or(0.0);
    return ModelParams{*name, temp};
  }
  return std::nullopt;
}

inline void stashExtra(CanonicalConfig& c, const std::string& key, const ConfigNode& v) {
  c.extras[key] = v.is_string() ? v.get<std::string>() : v.dump();
}

inline PredicatePtr predicateFromNode(const ConfigNode& n) {
  if (!n.is_object() || !n.contains("type") || !n["type"].is_string())
    throw ConfigError("guard predicate needs a type field");
  std::string type = n["type"].get<std::string>();
  if (type == "nonempty") return pred::nonEmpty();
  if (type == "max_words") return pred::maxWords(static_cast<int>(getCount(n, "n").value_or(0)));
  if (type == "min_words") return pred::minWords(static_cast<int>(getCount(n, "n").value_or(0)));
  if (type == "regex") return pred::matchesRegex(getString(n, "pattern").value_or(""));
  if (type == "valid_json") return pred::validJson();
  if (type == "and")
    return pred::conj(predicateFromNode(n.at("left")), predicateFromNode(n.at("right")));
  if (type == "not") return pred::neg(predicateFromNode(n.at("inner")));
  throw ConfigError("unknown guard predicate type: " + type);
}

inline ConfigNode predicateToNode(const PredicatePtr& p) {
  return std::visit(
      [&](const auto& n) -> ConfigNode {
        using T = std::decay_t<decltype(n)>;
        ConfigNode out = ConfigNode::object();
        if constexpr (std::is_same_v<T, Predicate::NonEmpty>) {
          out["type"] = "nonempty";
        } else if constexpr (std::is_same_v<T, Predicate::MaxWords>) {
          out["type"] = "max_words";
          out["n"] = n.n;
        } else if constexpr (std::is_same_v<T, Predicate::MinWords>) {
          out["type"] = "min_words";
          out["n"] = n.n;
        } else if constexpr (std::is_same_v<T, Predicate::MatchesRegex>) {
          out["type"] = "regex";
          out["pattern"] = n.pattern;
        } else if constexpr (std::is_same_v<T, Predicate::ValidJson>) {
          out["type"] = "valid_json";
        } else if constexpr (std::is_same_v<T, Predicate::Conj>) {
          out["type"] = "and";
          out["left"] = predicateToNode(n.left);
          out["right"] = predicateToNode(n.right);
        } else {
          out["type"] = "not";
          out["inner"] = predicateToNode(n.inner);
        }
        return out;
      },
      p->node);
}

}  // namespace detail

inline CanonicalConfig normalize(const ConfigNode& raw, FrameworkKind kind);

namespace detail {

inline CanonicalConfig normalizeSubdocument(const ConfigNode& raw) {
  return normalize(raw, detectFramework(raw));
}

inline CanonicalConfig normalizeLambdagent(const ConfigNode& raw) {
  CanonicalConfig c;
  c.framework = FrameworkKind::Lambdagent;
  static const std::set<std::string> known = {
      "agentId", "type",   "model",    "systemPrompt", "react",
      "mcp",     "memory", "guard",    "routes",       "stages",
      "branches", "framework", "termination", "extras"};

  c.agentId = getString(raw, "agentId").value_or("");
  if (auto type = getString(raw, "type")) {
    auto parsed = parseAgentType(*type);
    if (!parsed) throw ConfigError("unknown agent type: " + *type);
    c.agentType = *parsed;
  }
  if (raw.contains("model")) c.model = modelFromNode(raw["model"]);
  if (auto prompt = getString(raw, "systemPrompt")) c.systemPrompt = prompt;
  if (raw.contains("react") && raw["react"].is_object())
    c.maxSteps = getCount(raw["react"], "maxSteps");
  if (raw.contains("mcp") && raw["mcp"].is_object()) {
    const ConfigNode& mcp = raw["mcp"];
    if (mcp.contains("onlineTool") && mcp["onlineTool"].is_object()) {
      for (const auto& [server, ids] : mcp["onlineTool"].items())
        c.onlineTools.emplace_back(server, toolNameList(ids));
    }
    if (mcp.contains("localTools")) c.tools = toolNameList(mcp["localTools"]);
  }
  if (raw.contains("memory") && raw["memory"].is_object()) {
    const ConfigNode& mem = raw["memory"];
    c.memory = MemorySpec{getString(mem, "strategy").value_or(""),
                          static_cast<std::uint64_t>(getCount(mem, "size").value_or(0)),
                          static_cast<std::uint64_t>(getCount(mem, "ttl").value_or(0))};
  }
  if (raw.contains("guard")) c.guard = predicateFromNode(raw["guard"]);
  if (raw.contains("routes") && raw["routes"].is_object()) {
    for (const auto& [label, sub] : raw["routes"].items()) {
      if (label == "default")
        c.routeDefault.push_back(normalizeSubdocument(sub));
      else
        c.routes.emplace_back(label, normalizeSubdocument(sub));
    }
  }
  if (raw.contains("stages") && raw["stages"].is_array()) {
    for (const auto& sub : raw["stages"]) c.stages.push_back(normalizeSubdocument(sub));
  }
  if (raw.contains("branches") && raw["branches"].is_array()) {
    for (const auto& sub : raw["branches"])
      c.branches.push_back(normalizeSubdocument(sub));
  }
  if (auto fw = getString(raw, "framework")) {
    if (auto parsed = parseFrameworkName(*fw)) c.framework = *parsed;
  }
  if (raw.contains("termination") && raw["termination"].is_object()) {
    const ConfigNode& t = raw["termination"];
    if (auto n = getCount(t, "max_iter")) c.terminationHints[HintKind::MaxIter] = *n;
    if (auto n = getCount(t, "max_rounds")) c.terminationHints[HintKind::MaxRounds] = *n;
    if (t.value("is_termination_msg", false))
      c.terminationHints[HintKind::IsTerminationMsg] = 1;
    if (t.value("framework_internal", false))
      c.terminationHints[HintKind::FrameworkInternal] = 1;
    if (t.value("dag_end_node", false)) c.terminationHints[HintKind::DagEndNode] = 1;
    if (t.value("no_delegation", false)) c.terminationHints[HintKind::NoDelegation] = 1;
  }
  if (raw.contains("extras") && raw["extras"].is_object()) {
    for (const auto& [key, v] : raw["extras"].items())
      c.extras[key] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  for (const auto& [key, v] : raw.items()) {
    if (!known.count(key)) stashExtra(c, key, v);
  }
  return c;
}

inline CanonicalConfig normalizeCrewAI(const ConfigNode& raw) {
  CanonicalConfig c;
  c.framework = FrameworkKind::CrewAI;
  c.agentType = AgentType::React;  // role agents run the framework's agentic loop
  c.terminationHints[HintKind::FrameworkInternal] = 1;

  std::string prompt;
  for (const char* key : {"role", "goal", "backstory"}) {
    if (auto part = getString(raw, key)) {
      if (!prompt.empty()) prompt += "\n";
      prompt += *part;
    }
  }
  if (!prompt.empty()) c.systemPrompt = prompt;
  c.agentId = getString(raw, "role").value_or("");

  if (raw.contains("tools")) c.tools = toolNameList(raw["tools"]);
  if (raw.contains("llm")) c.model = modelFromNode(raw["llm"]);
  if (auto n = getCount(raw, "max_iter")) {
    c.maxSteps = n;
    c.terminationHints[HintKind::MaxIter] = *n;
  }
  if (raw.contains("allow_delegation") && raw["allow_delegation"].is_boolean() &&
      !raw["allow_delegation"].get<bool>())
    c.terminationHints[HintKind::NoDelegation] = 1;

  static const std::set<std::string> known = {"role", "goal", "backstory", "tools",
                                              "llm",  "max_iter", "allow_delegation"};
  for (const auto& [key, v] : raw.items())
    if (!known.count(key)) stashExtra(c, key, v);
  return c;
}

inline CanonicalConfig normalizeAutoGen(const ConfigNode& raw) {
  CanonicalConfig c;
  c.framework = FrameworkKind::AutoGen;
  c.agentType = AgentType::React;
  c.agentId = getString(raw, "name").value_or("");
  if (auto msg = getString(raw, "system_message")) c.systemPrompt = msg;
  if (raw.contains("llm_config") && raw["llm_config"].is_object()) {
    const ConfigNode& llm = raw["llm_config"];
    if (llm.contains("config_list") && llm["config_list"].is_array() &&
        !llm["config_list"].empty()) {
      c.model = modelFromNode(llm["config_list"][0]);
    } else {
      c.model = modelFromNode(llm);
    }
    if (c.model && llm.contains("temperature") && llm["temperature"].is_number())
      c.model->temperature = llm["temperature"].get<double>();
  }
  if (raw.contains("is_termination_msg"))
    c.terminationHints[HintKind::IsTerminationMsg] = 1;
  if (auto n = getCount(raw, "max_consecutive_auto_reply")) {
    c.maxSteps = n;
    c.terminationHints[HintKind::MaxIter] = *n;
  }
  if (raw.contains("tools")) c.tools = toolNameList(raw["tools"]);

  static const std::set<std::string> known = {"name", "system_message", "llm_config",
                                              "is_termination_msg",
                                              "max_consecutive_auto_reply", "tools"};
  for (const auto& [key, v] : raw.items())
    if (!known.count(key)) stashExtra(c, key, v);
  return c;
}

inline CanonicalConfig normalizeLangChain(const ConfigNode& raw) {
  CanonicalConfig c;
  c.framework = FrameworkKind::LangChain;
  std::string type = getString(raw, "_type").value_or("");
  bool agentic = type.find("react") != std::string::npos ||
                 type.find("agent") != std::string::npos;
  c.agentType = agentic ? AgentType::React : AgentType::Simple;
  if (agentic) c.terminationHints[HintKind::FrameworkInternal] = 1;  // AgentFinish

  if (raw.contains("llm")) c.model = modelFromNode(raw["llm"]);
  std::string prompt;
  if (raw.contains("prompt") && raw["prompt"].is_object()) {
    if (auto tmpl = getString(raw["prompt"], "template")) prompt = *tmpl;
  }
  for (const char* key : {"prefix", "suffix"}) {
    if (auto part = getString(raw, key)) {
      if (!prompt.empty()) prompt += "\n";
      prompt += *part;
    }
  }
  if (!prompt.empty()) c.systemPrompt = prompt;
  if (raw.contains("tools")) c.tools = toolNameList(raw["tools"]);
  if (auto n = getCount(raw, "max_iterations")) {
    c.maxSteps = n;
    c.terminationHints[HintKind::MaxIter] = *n;
  }

  static const std::set<std::string> known = {"_type", "llm",   "prompt", "prefix",
                                              "suffix", "tools", "max_iterations"};
  for (const auto& [key, v] : raw.items())
    if (!known.count(key)) stashExtra(c, key, v);
  return c;
}

inline CanonicalConfig normalizeDify(const ConfigNode& raw) {
  CanonicalConfig c;
  c.framework = FrameworkKind::Dify;
  c.agentType = AgentType::Chain;
  c.agentId = getString(raw, "name").value_or(getString(raw, "app_name").value_or(""));

  const ConfigNode* nodes = nullptr;
  if (raw.contains("nodes")) nodes = &raw["nodes"];
  else if (raw.contains("graph") && raw["graph"].contains("nodes"))
    nodes = &raw["graph"]["nodes"];
  else if (raw.contains("workflow") && raw["workflow"].contains("graph") &&
           raw["workflow"]["graph"].contains("nodes"))
    nodes = &raw["workflow"]["graph"]["nodes"];
  if (!nodes) throw ConfigError("Dify document without a node graph");

  bool endNode = false;
  for (const auto& rawNode : *nodes) {
    const ConfigNode& node =
        rawNode.contains("data") && rawNode["data"].is_object() ? rawNode["data"] : rawNode;
    std::string type = getString(node, "type").value_or("");
    if (type == "start") continue;
    if (type == "end") {
      endNode = true;
      continue;
    }
    if (type == "llm") {
      CanonicalConfig stage;
      stage.framework = FrameworkKind::Dify;
      stage.agentType = AgentType::Simple;
      stage.agentId = getString(node, "title").value_or("llm");
      if (node.contains("model")) stage.model = modelFromNode(node["model"]);
      if (auto prompt = getString(node, "prompt_template")) stage.systemPrompt = prompt;
      c.stages.push_back(std::move(stage));
    } else if (type == "tool") {
      CanonicalConfig stage;
      stage.framework = FrameworkKind::Dify;
      stage.agentType = AgentType::Simple;
      std::string toolName = getString(node, "tool_name")
                                 .value_or(getString(node, "title").value_or("tool"));
      stage.agentId = toolName;
      stage.tools.push_back(toolName);
      c.stages.push_back(std::move(stage));
    } else if (type == "if-else") {
      CanonicalConfig stage;
      stage.framework = FrameworkKind::Dify;
      stage.agentType = AgentType::Router;
      stage.agentId = getString(node, "title").value_or("if-else");
      if (node.contains("model")) stage.model = modelFromNode(node["model"]);
      if (node.contains("cases") && node["cases"].is_array()) {
        for (const auto& cs : node["cases"]) {
          std::string label = getString(cs, "label").value_or(
              getString(cs, "case_id").value_or("case"));
          CanonicalConfig routeStage;
          routeStage.framework = FrameworkKind::Dify;
          routeStage.agentType = AgentType::Simple;
          routeStage.agentId = label;
          if (auto prompt = getString(cs, "prompt_template")) routeStage.systemPrompt = prompt;
          if (cs.contains("model")) routeStage.model = modelFromNode(cs["model"]);
          stage.routes.emplace_back(label, std::move(routeStage));
        }
      }
      c.stages.push_back(std::move(stage));
    } else if (type == "iteration") {
      CanonicalConfig stage;
      stage.framework = FrameworkKind::Dify;
      stage.agentType = AgentType::React;
      stage.agentId = getString(node, "title").value_or("iteration");
      if (node.contains("model")) stage.model = modelFromNode(node["model"]);
      if (auto prompt = getString(node, "prompt_template")) stage.systemPrompt = prompt;
      stage.maxSteps = getCount(node, "max_iterations");
      if (node.contains("tools")) stage.tools = toolNameList(node["tools"]);
      c.stages.push_back(std::move(stage));
    }
    // other node kinds are outside the supported subset
  }
  if (endNode) {
    c.terminationHints[HintKind::DagEndNode] = 1;
    for (auto& stage : c.stages)
      if (stage.agentType == AgentType::React)
        stage.terminationHints[HintKind::DagEndNode] = 1;
  }
  return c;
}

inline CanonicalConfig normalizeMultiAgent(const ConfigNode& raw) {
  CanonicalConfig c;
  c.framework = FrameworkKind::MultiAgent;
  c.agentType = AgentType::Chain;  // one conversation round visits each agent
  c.agentId = getString(raw, "name").value_or("group");

  if (raw.contains("agents") && raw["agents"].is_array()) {
    for (const auto& agent : raw["agents"])
      c.stages.push_back(normalizeSubdocument(agent));
  }
  for (const char* key : {"max_rounds", "max_round", "max_turns"}) {
    if (auto n = getCount(raw, key)) {
      c.terminationHints[HintKind::MaxRounds] = *n;
      break;
    }
  }
  if (raw.contains("is_termination_msg"))
    c.terminationHints[HintKind::IsTerminationMsg] = 1;

  static const std::set<std::string> known = {"agents", "max_rounds", "max_round",
                                              "max_turns", "is_termination_msg", "name"};
  for (const auto& [key, v] : raw.items())
    if (!known.count(key)) stashExtra(c, key, v);
  return c;
}

inline CanonicalConfig normalizeGeneric(const ConfigNode& raw) {
  CanonicalConfig c;
  c.framework = FrameworkKind::Generic;
  c.agentId = getString(raw, "agentId").value_or(getString(raw, "name").value_or(""));

  for (const char* key : {"systemPrompt", "system_prompt", "prompt", "instructions"}) {
    if (auto prompt = getString(raw, key)) {
      c.systemPrompt = prompt;
      break;
    }
  }
  if (raw.contains("model")) c.model = modelFromNode(raw["model"]);
  if (!c.model && raw.contains("model_name")) c.model = modelFromNode(raw["model_name"]);
  if (!c.model && raw.contains("llm")) c.model = modelFromNode(raw["llm"]);
  if (raw.contains("tools")) c.tools = toolNameList(raw["tools"]);
  for (const char* key : {"maxSteps", "max_steps"}) {
    if (auto n = getCount(raw, key)) {
      c.maxSteps = n;
      break;
    }
  }
  if (auto n = getCount(raw, "max_iter")) {
    if (!c.maxSteps) c.maxSteps = n;
    c.terminationHints[HintKind::MaxIter] = *n;
  }
  if (raw.contains("routes") && raw["routes"].is_object()) {
    for (const auto& [label, sub] : raw["routes"].items()) {
      if (label == "default")
        c.routeDefault.push_back(normalizeSubdocument(sub));
      else
        c.routes.emplace_back(label, normalizeSubdocument(sub));
    }
  }
  if (raw.contains("stages") && raw["stages"].is_array())
    for (const auto& sub : raw["stages"]) c.stages.push_back(normalizeSubdocument(sub));
  if (raw.contains("branches") && raw["branches"].is_array())
    for (const auto& sub : raw["branches"])
      c.branches.push_back(normalizeSubdocument(sub));
  if (raw.contains("memory") && raw["memory"].is_object()) {
    const ConfigNode& mem = raw["memory"];
    c.memory = MemorySpec{getString(mem, "strategy").value_or(""),
                          static_cast<std::uint64_t>(getCount(mem, "size").value_or(0)),
                          static_cast<std::uint64_t>(getCount(mem, "ttl").value_or(0))};
  }

  std::optional<AgentType> declared;
  for (const char* key : {"type", "agentType", "agent_type"}) {
    if (auto type = getString(raw, key)) {
      declared = parseAgentType(*type);
      if (declared) break;
    }
  }
  if (declared) {
    c.agentType = *declared;
  } else if (!c.routes.empty() || !c.routeDefault.empty()) {
    c.agentType = AgentType::Router;
  } else if (!c.stages.empty()) {
    c.agentType = AgentType::Chain;
  } else if (!c.branches.empty()) {
    c.agentType = AgentType::Parallel;
  } else if (!c.tools.empty() || c.maxSteps) {
    c.agentType = AgentType::React;
  } else {
    c.agentType = AgentType::Simple;
  }

  static const std::set<std::string> known = {
      "agentId", "name",  "systemPrompt", "system_prompt", "prompt",  "instructions",
      "model",   "model_name", "llm",     "tools",         "maxSteps", "max_steps",
      "max_iter", "routes", "stages",     "branches",      "memory",  "type",
      "agentType", "agent_type"};
  for (const auto& [key, v] : raw.items())
    if (!known.count(key)) stashExtra(c, key, v);
  return c;
}

}  // namespace detail

/// Maps a raw framework document onto the canonical shape. Unmapped fields
/// are preserved in the extras bag for lint path reporting.
inline CanonicalConfig normalize(const ConfigNode& raw, FrameworkKind kind) {
  if (!raw.is_object()) throw ConfigError("configuration root must be a map");
  switch (kind) {
    case FrameworkKind::CrewAI: return detail::normalizeCrewAI(raw);
    case FrameworkKind::AutoGen: return detail::normalizeAutoGen(raw);
    case FrameworkKind::LangChain: return detail::normalizeLangChain(raw);
    case FrameworkKind::Dify: return detail::normalizeDify(raw);
    case FrameworkKind::MultiAgent: return detail::normalizeMultiAgent(raw);
    case FrameworkKind::Lambdagent: return detail::normalizeLambdagent(raw);
    case FrameworkKind::Generic: return detail::normalizeGeneric(raw);
  }
  return detail::normalizeGeneric(raw);
}

inline CanonicalConfig loadCanonicalConfig(const std::string& path,
                                           std::optional<FrameworkKind> overrideKind =
                                               std::nullopt) {
  ConfigNode raw = loadRawConfig(path);
  FrameworkKind kind = overrideKind ? *overrideKind : detectFramework(raw);
  CanonicalConfig c = normalize(raw, kind);
  c.sourcePath = path;
  return c;
}

/// Serializes a canonical configuration back to the reference document
/// schema. normalize(toRawDocument(c), Lambdagent) reproduces c.
inline ConfigNode toRawDocument(const CanonicalConfig& c) {
  ConfigNode out = ConfigNode::object();
  out["agentId"] = c.agentId;
  out["type"] = agentTypeName(c.agentType);
  if (c.model) {
    out["model"] = ConfigNode::object();
    out["model"]["name"] = c.model->modelName;
    out["model"]["temperature"] = c.model->temperature;
  }
  if (c.systemPrompt) out["systemPrompt"] = *c.systemPrompt;
  if (c.maxSteps) {
    out["react"] = ConfigNode::object();
    out["react"]["maxSteps"] = *c.maxSteps;
  }
  if (!c.tools.empty() || !c.onlineTools.empty()) {
    out["mcp"] = ConfigNode::object();
    if (!c.onlineTools.empty()) {
      ConfigNode online = ConfigNode::object();
      for (const auto& [server, ids] : c.onlineTools) online[server] = ids;
      out["mcp"]["onlineTool"] = online;
    }
    if (!c.tools.empty()) out["mcp"]["localTools"] = c.tools;
  }
  if (c.memory) {
    out["memory"] = ConfigNode::object();
    out["memory"]["strategy"] = c.memory->strategy;
    out["memory"]["size"] = c.memory->size;
    out["memory"]["ttl"] = c.memory->ttl;
  }
  if (c.guard) out["guard"] = detail::predicateToNode(c.guard);
  if (!c.routes.empty() || !c.routeDefault.empty()) {
    ConfigNode routes = ConfigNode::object();
    for (const auto& [label, sub] : c.routes) routes[label] = toRawDocument(sub);
    if (!c.routeDefault.empty()) routes["default"] = toRawDocument(c.routeDefault[0]);
    out["routes"] = routes;
  }
  if (!c.stages.empty()) {
    ConfigNode stages = ConfigNode::array();
    for (const auto& sub : c.stages) stages.push_back(toRawDocument(sub));
    out["stages"] = stages;
  }
  if (!c.branches.empty()) {
    ConfigNode branches = ConfigNode::array();
    for (const auto& sub : c.branches) branches.push_back(toRawDocument(sub));
    out["branches"] = branches;
  }
  out["framework"] = frameworkName(c.framework);
  if (!c.terminationHints.empty()) {
    ConfigNode t = ConfigNode::object();
    for (const auto& [kind, n] : c.terminationHints) {
      switch (kind) {
        case HintKind::MaxIter: t["max_iter"] = n; break;
        case HintKind::MaxRounds: t["max_rounds"] = n; break;
        case HintKind::IsTerminationMsg: t["is_termination_msg"] = true; break;
        case HintKind::FrameworkInternal: t["framework_internal"] = true; break;
        case HintKind::DagEndNode: t["dag_end_node"] = true; break;
        case HintKind::NoDelegation: t["no_delegation"] = true; break;
      }
    }
    out["termination"] = t;
  }
  if (!c.extras.empty()) {
    ConfigNode extras = ConfigNode::object();
    for (const auto& [key, v] : c.extras) extras[key] = v;
    out["extras"] = extras;
  }
  return out;
}

}  // namespace lambdagent
