#pragma once

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "lambdagent/term.hpp"

namespace lambdagent {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// External string-to-string oracle. At temperature 0 identical
/// (prompt, input) pairs must yield identical text.
class OracleProvider {
 public:
  virtual ~OracleProvider() = default;
  virtual std::string complete(const std::string& prompt, const ModelParams& params,
                               const std::string& input) = 0;
};

/// Deterministic test double: a finite (prompt, input) -> output map with an
/// optional fallback. Misses without a fallback raise OracleError.
class ScriptedOracle : public OracleProvider {
 public:
  ScriptedOracle() = default;

  ScriptedOracle& add(const std::string& prompt, const std::string& input,
                      std::string output) {
    entries_[key(prompt, input)] = std::move(output);
    return *this;
  }

  ScriptedOracle& setFallback(std::string output) {
    fallback_ = std::move(output);
    return *this;
  }

  std::string complete(const std::string& prompt, const ModelParams&,
                       const std::string& input) override {
    auto it = entries_.find(key(prompt, input));
    if (it != entries_.end()) return it->second;
    if (fallback_) return *fallback_;
    throw OracleError("scripted oracle has no entry for input: " + input);
  }

  /// File format: {"entries": [{"prompt":p, "input":i, "output":o}, ...],
  /// "fallback": "..."} — fallback optional.
  static ScriptedOracle fromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OracleError("cannot open oracle script: " + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw OracleError("malformed oracle script " + path + ": " + e.what());
    }
    ScriptedOracle oracle;
    for (const auto& entry : doc.value("entries", nlohmann::json::array())) {
      oracle.add(entry.value("prompt", ""), entry.value("input", ""),
                 entry.value("output", ""));
    }
    if (doc.contains("fallback")) oracle.setFallback(doc["fallback"].get<std::string>());
    return oracle;
  }

 private:
  static std::string key(const std::string& prompt, const std::string& input) {
    return prompt + '\x1f' + input;
  }

  std::map<std::string, std::string> entries_;
  std::optional<std::string> fallback_;
};

/// Wraps an arbitrary deterministic function. Handy for property suites
/// that need total oracles over generated inputs.
class FunctionOracle : public OracleProvider {
 public:
  using Fn = std::function<std::string(const std::string&, const std::string&)>;
  explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}

  std::string complete(const std::string& prompt, const ModelParams&,
                       const std::string& input) override {
    return fn_(prompt, input);
  }

 private:
  Fn fn_;
};

/// Environment variables naming the optional external completion endpoint.
/// When unset, only scripted oracles are available.
inline constexpr const char* kOracleUrlEnv = "LAMBDAGENT_ORACLE_URL";
inline constexpr const char* kOracleApiKeyEnv = "LAMBDAGENT_ORACLE_API_KEY";

inline std::optional<std::string> oracleEndpointFromEnv() {
  const char* url = std::getenv(kOracleUrlEnv);
  if (!url || !*url) return std::nullopt;
  return std::string(url);
}

}  // namespace lambdagent
